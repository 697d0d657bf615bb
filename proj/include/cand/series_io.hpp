#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "cand/series.hpp"
#include "cand/shapelets.hpp"

namespace cand {

inline const std::vector<std::string> kDefaultChannels{"X1", "X2"};

/// Reads `set_id,channel,minute,value` rows. Channels are ordered as in
/// `channels`; every set must carry every channel over minutes 0..T-1.
Dataset read_series_csv(std::istream& in, const std::vector<std::string>& channels = kDefaultChannels);
Dataset read_series_csv(const std::filesystem::path& path,
                        const std::vector<std::string>& channels = kDefaultChannels);

void write_series_csv(std::ostream& out, const Dataset& dataset);
void write_series_csv(const std::filesystem::path& path, const Dataset& dataset);

/// `set_id,label` rows.
std::map<std::string, Label> read_labels_csv(std::istream& in);
std::map<std::string, Label> read_labels_csv(const std::filesystem::path& path);
void write_labels_csv(std::ostream& out, const Dataset& dataset);
void write_labels_csv(const std::filesystem::path& path, const Dataset& dataset);

/// Sets each set's label from `labels`; sets absent from the map keep theirs.
void apply_labels(Dataset& dataset, const std::map<std::string, Label>& labels);

nlohmann::json to_json(const ShapeletDictionary& dict);
ShapeletDictionary dictionary_from_json(const nlohmann::json& j);

/// Shortest round-trip decimal text for a double.
std::string format_double(double value);

/// Opens a file for reading or throws ArtifactError.
std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace cand
