#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cand {

enum class Label { deteriorating, recovering, unknown };

std::string_view to_string(Label label);
Label parse_label(std::string_view text);

/// One channel of one measurement set, sampled at 1-minute resolution.
struct TimeSeries {
    std::string set_id;
    std::string channel;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Throws DataError when the series is empty or holds non-finite readings.
void validate(const TimeSeries& series);

/// A subject's aligned multichannel recording. Channel order is fixed
/// across a dataset (index 0 = X1, index 1 = X2).
struct MeasurementSet {
    std::string set_id;
    std::vector<TimeSeries> channels;
    Label label = Label::unknown;

    std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
    const TimeSeries& channel(std::size_t index) const { return channels.at(index); }

    /// The first `minutes` readings of every channel.
    MeasurementSet prefix(std::size_t minutes) const;
};

void validate(const MeasurementSet& set);

using Dataset = std::vector<MeasurementSet>;

/// Collects channel `index` of every set.
std::vector<TimeSeries> channel_slice(const Dataset& dataset, std::size_t index);

std::size_t count_label(const Dataset& dataset, Label label);

}  // namespace cand
