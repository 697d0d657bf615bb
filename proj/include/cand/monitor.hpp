#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cand/classifier.hpp"
#include "cand/metrics.hpp"
#include "cand/representation.hpp"
#include "cand/series.hpp"

namespace cand {

struct MonitorConfig {
    std::size_t window = 30;      // minutes per transmitted window
    double threshold = 0.5;
    double delay_start = 0.0;     // fraction of T observed before decisions are allowed
};

void validate(const MonitorConfig& config);

struct WindowRecord {
    std::size_t t = 0;            // minutes observed after this window
    double probability = 0.0;
    bool eligible = true;         // false while decisions are suppressed
    bool halted = false;
};

struct MonitorState {
    std::string set_id;
    std::size_t total_minutes = 0;
    MeasurementSet observed;      // everything received so far
    bool halted = false;
    std::optional<std::size_t> detection_minute;
    std::vector<WindowRecord> trace;

    std::size_t observed_minutes() const { return observed.length(); }
};

MonitorState start_monitor(const std::string& set_id, std::size_t total_minutes,
                           const std::vector<std::string>& channels = {"X1", "X2"});

/// Representation + classifier: the decision statistic for a prefix.
struct Detector {
    const Representer* representer = nullptr;
    const Classifier* classifier = nullptr;

    double probability(const MeasurementSet& observed) const;
};

/// Appends one window per channel, re-represents all observed data and halts
/// when the probability reaches the threshold (once decisions are allowed).
/// Throws StreamError on a halted state or a mis-sized window; the last
/// window may be shorter when it completes T.
void monitor_step(MonitorState& state, const std::array<std::span<const double>, 2>& window,
                  const Detector& detector, const MonitorConfig& config);

/// Streams a complete set window by window until it halts or ends.
MonitorState run_monitor(const MeasurementSet& set, const Detector& detector, const MonitorConfig& config);

/// Decision summary; the AUC score is the maximum probability over eligible
/// windows (0 when none was eligible).
SubjectOutcome outcome(const MonitorState& state, Label label);

}  // namespace cand
