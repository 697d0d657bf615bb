#include "cand/monitor.hpp"

#include <algorithm>
#include <cmath>

#include "cand/error.hpp"

namespace cand {

void validate(const MonitorConfig& c) {
    if (c.window == 0) throw ConfigError("monitor window must be positive");
    if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) throw ConfigError("detection threshold must lie in [0,1]");
    if (!(c.delay_start >= 0.0 && c.delay_start < 1.0)) throw ConfigError("delay_start must lie in [0,1)");
}

MonitorState start_monitor(const std::string& set_id, std::size_t total_minutes,
                           const std::vector<std::string>& channels) {
    if (channels.size() != 2) throw InvalidArgument("monitoring expects two channels");
    MonitorState s;
    s.set_id = set_id;
    s.total_minutes = total_minutes;
    s.observed.set_id = set_id;
    for (const auto& name : channels) s.observed.channels.push_back({set_id, name, {}});
    return s;
}

double Detector::probability(const MeasurementSet& observed) const {
    if (!representer || !classifier) throw InvalidArgument("detector is not initialised");
    const auto features = (*representer)(observed);
    return classifier->predict_probability(features);
}

void monitor_step(MonitorState& state, const std::array<std::span<const double>, 2>& window,
                  const Detector& detector, const MonitorConfig& config) {
    if (state.halted) throw StreamError("set " + state.set_id + ": monitoring already halted");
    const std::size_t t0 = state.observed_minutes();
    const std::size_t n = window[0].size();
    if (window[1].size() != n) throw StreamError("set " + state.set_id + ": channel windows differ in length");
    const bool final_partial = n < config.window && t0 + n == state.total_minutes;
    if ((n != config.window && !final_partial) || n == 0)
        throw StreamError("set " + state.set_id + ": window of " + std::to_string(n) + " minutes, expected " +
                          std::to_string(config.window));
    if (t0 + n > state.total_minutes)
        throw StreamError("set " + state.set_id + ": stream exceeds " + std::to_string(state.total_minutes) + " minutes");
    for (std::size_t c = 0; c < 2; ++c) {
        for (double v : window[c])
            if (!std::isfinite(v)) throw StreamError("set " + state.set_id + ": non-finite reading");
        auto& values = state.observed.channels[c].values;
        values.insert(values.end(), window[c].begin(), window[c].end());
    }
    const std::size_t t = t0 + n;
    const auto earliest = static_cast<std::size_t>(std::ceil(config.delay_start * static_cast<double>(state.total_minutes) - 1e-9));
    WindowRecord rec{t, detector.probability(state.observed), t >= earliest, false};
    if (rec.eligible && rec.probability >= config.threshold) {
        state.halted = true;
        state.detection_minute = t;
        rec.halted = true;
    }
    state.trace.push_back(rec);
}

MonitorState run_monitor(const MeasurementSet& set, const Detector& detector, const MonitorConfig& config) {
    validate(config);
    std::vector<std::string> names;
    for (const auto& ch : set.channels) names.push_back(ch.channel);
    MonitorState state = start_monitor(set.set_id, set.length(), names);
    const std::size_t total = set.length();
    for (std::size_t t = 0; t < total && !state.halted; t += config.window) {
        const std::size_t n = std::min(config.window, total - t);
        monitor_step(state,
                     {std::span<const double>(set.channel(0).values).subspan(t, n),
                      std::span<const double>(set.channel(1).values).subspan(t, n)},
                     detector, config);
    }
    return state;
}

SubjectOutcome outcome(const MonitorState& state, Label label) {
    SubjectOutcome o;
    o.positive = label == Label::deteriorating;
    o.detected = state.halted;
    o.decision_minute = state.detection_minute.value_or(state.total_minutes);
    for (const auto& r : state.trace)
        if (r.eligible) o.score = std::max(o.score, r.probability);
    return o;
}

}  // namespace cand
