#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "cand/knowledge.hpp"
#include "cand/trainer.hpp"

namespace cand {

/// A trained embedding with everything needed to re-derive its strengths.
struct TrainedModel {
    TrainConfig config;
    std::array<std::string, 2> channels{"X1", "X2"};
    std::vector<CrossPair> pairs;            // cross triplet order of the strength rows
    std::vector<int> pair_correlation;
    EmbeddingStore store;
    MFParams mf;
    StrengthTable strengths;
    std::vector<EpochLog> history;
};

TrainedModel make_trained_model(TrainResult result, const KnowledgeBundle& knowledge, const TrainConfig& config);

nlohmann::json to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& doc);

/// Little-endian binary: "CANDMDL1" magic, uint32 format version, uint32
/// dimension, then a length-prefixed JSON header and raw parameter blocks.
void write_model_binary(std::ostream& out, const TrainedModel& model);
TrainedModel read_model_binary(std::istream& in);

/// Binary when the path ends in ".bin", JSON otherwise.
void save_model(const std::filesystem::path& path, const TrainedModel& model);
/// Detects the format from the file's first bytes.
TrainedModel load_model(const std::filesystem::path& path);

/// StrengthTable as `head,tail,correlation,view,strength` rows.
void write_strengths_csv(std::ostream& out, const TrainedModel& model);

}  // namespace cand
