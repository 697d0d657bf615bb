#include "cand/series.hpp"

#include <algorithm>
#include <cmath>

#include "cand/error.hpp"

namespace cand {

std::string_view to_string(Label label) {
    switch (label) {
        case Label::deteriorating: return "deteriorating";
        case Label::recovering: return "recovering";
        case Label::unknown: break;
    }
    return "unknown";
}

Label parse_label(std::string_view text) {
    if (text == "deteriorating") return Label::deteriorating;
    if (text == "recovering") return Label::recovering;
    if (text == "unknown" || text.empty()) return Label::unknown;
    throw DataError("unknown label '" + std::string(text) + "'");
}

void validate(const TimeSeries& series) {
    if (series.values.empty())
        throw DataError("series " + series.set_id + "/" + series.channel + " is empty");
    for (double v : series.values)
        if (!std::isfinite(v))
            throw DataError("series " + series.set_id + "/" + series.channel + " holds a non-finite reading");
}

MeasurementSet MeasurementSet::prefix(std::size_t minutes) const {
    MeasurementSet out{set_id, {}, label};
    out.channels.reserve(channels.size());
    for (const auto& ch : channels) {
        TimeSeries s{ch.set_id, ch.channel, {}};
        const auto n = std::min(minutes, ch.values.size());
        s.values.assign(ch.values.begin(), ch.values.begin() + static_cast<std::ptrdiff_t>(n));
        out.channels.push_back(std::move(s));
    }
    return out;
}

void validate(const MeasurementSet& set) {
    if (set.channels.empty()) throw DataError("set " + set.set_id + " has no channels");
    for (const auto& ch : set.channels) {
        validate(ch);
        if (ch.size() != set.length())
            throw DataError("set " + set.set_id + ": channel " + ch.channel + " has length " +
                            std::to_string(ch.size()) + ", expected " + std::to_string(set.length()));
    }
}

std::vector<TimeSeries> channel_slice(const Dataset& dataset, std::size_t index) {
    std::vector<TimeSeries> out;
    out.reserve(dataset.size());
    for (const auto& set : dataset) out.push_back(set.channel(index));
    return out;
}

std::size_t count_label(const Dataset& dataset, Label label) {
    return static_cast<std::size_t>(
        std::count_if(dataset.begin(), dataset.end(), [label](const MeasurementSet& s) { return s.label == label; }));
}

}  // namespace cand
