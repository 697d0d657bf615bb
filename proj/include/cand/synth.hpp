#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "cand/series.hpp"
#include "cand/shapelets.hpp"
#include "cand/knowledge.hpp"

namespace cand {

struct SynthConfig {
    std::size_t n_sets = 150;
    std::size_t length = 480;                 // T, minutes
    std::size_t motifs = 12;                  // per channel
    std::size_t motif_length = 15;
    double noise = 0.1;                       // additive Gaussian std
    double deteriorating_fraction = 0.4;
    std::array<double, 4> gap_probabilities{0.55, 0.3, 0.1, 0.05};  // per interval bucket
    std::size_t class_motifs = 6;             // motifs each class's chain visits
    double dominant_probability = 0.75;       // P(class successor) in each chain row
    std::size_t coupled_pairs = 4;            // cross-channel pairs per class
    double coupling = 0.9;
    std::uint64_t seed = 7;
};

void validate(const SynthConfig& config);

struct Coupling {
    int first = 0;    // channel-0 motif
    int second = 0;   // channel-1 motif
    double probability = 0.0;
};

/// Everything the generator samples from; derived from the config by default
/// but replaceable for hand-built scenarios.
struct SynthStructure {
    std::array<std::vector<std::vector<double>>, 2> motifs;                     // [channel][motif] -> values
    /// [class][channel] row-stochastic matrix over motifs; class 0 is
    /// deteriorating, class 1 recovering.
    std::array<std::array<std::vector<std::vector<double>>, 2>, 2> transitions;
    std::array<std::array<std::vector<double>, 2>, 2> initial;                  // [class][channel]
    std::array<std::vector<Coupling>, 2> couplings;                             // per class
};

SynthStructure default_structure(const SynthConfig& config);
void validate(const SynthStructure& structure, const SynthConfig& config);

struct PlantedMotif {
    int motif = 0;
    std::size_t channel = 0;
    std::size_t start_minute = 0;
};

struct SetTruth {
    std::string set_id;
    Label label = Label::unknown;
    std::vector<PlantedMotif> planted;                 // sorted by channel, then minute
    std::vector<std::pair<int, int>> cooccurring;      // distinct (channel-0 motif, channel-1 motif)
};

struct GroundTruth {
    SynthStructure structure;
    std::vector<SetTruth> sets;
};

struct SynthOutput {
    Dataset dataset;
    GroundTruth truth;
};

SynthOutput generate(const SynthConfig& config);
SynthOutput generate(const SynthConfig& config, const SynthStructure& structure);

nlohmann::json to_json(const GroundTruth& truth);

struct OracleReport {
    double motif_recovery = 0.0;        // planted motifs matched by some discovered shapelet
    double transition_fidelity = 0.0;   // planted high-probability transitions present as triplets
    double coupling_fidelity = 0.0;     // fully coupled pairs binned into the top correlation
    std::size_t high_transitions = 0;
    std::size_t full_couplings = 0;
};

/// `dicts` and `knowledge` come from the pipeline run on `truth`'s dataset.
/// A motif counts as recovered when its nearest shapelet lies within
/// `noise_bound` combined distance. Transitions with probability >= 0.5 in
/// either class are checked for a triplet between the shapelets that best
/// match the two motifs; couplings with probability 1 for the top bin.
OracleReport oracle_checks(const GroundTruth& truth, const std::array<ShapeletDictionary, 2>& dicts,
                           const KnowledgeBundle& knowledge, double noise_bound);

nlohmann::json to_json(const OracleReport& report);

}  // namespace cand
