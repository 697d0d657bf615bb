#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cand/classifier.hpp"
#include "cand/config.hpp"
#include "cand/knowledge.hpp"
#include "cand/model_io.hpp"
#include "cand/representation.hpp"
#include "cand/series.hpp"
#include "cand/shapelets.hpp"

namespace cand {

std::array<ShapeletDictionary, 2> discover_dictionaries(const Dataset& dataset, const ShapeletConfig& config,
                                                        std::uint64_t seed);

AssignOptions assign_options(const ShapeletConfig& config);

/// Per-channel assignments of every set, in dataset order.
std::array<SetAssignments, 2> assign_dataset(const Dataset& dataset, const std::array<ShapeletDictionary, 2>& dicts,
                                             const AssignOptions& options, std::size_t threads = 1);

KnowledgeBundle build_dataset_knowledge(const Dataset& dataset, const std::array<ShapeletDictionary, 2>& dicts,
                                        const PipelineConfig& config);

struct FittedPipeline {
    std::array<ShapeletDictionary, 2> dicts;
    KnowledgeBundle knowledge;
    TrainedModel model;
    std::unique_ptr<Classifier> classifier;
    double rho = 0.8;
    AssignOptions assign;

    Representer representer() const { return Representer(dicts, knowledge, model.store, rho, assign); }
};

/// Shapelets, knowledge structures and the joint embedding (no classifier).
FittedPipeline fit_embedding(const Dataset& train, const PipelineConfig& config, std::uint64_t seed,
                             const EpochCallback& on_epoch = {});

struct TrainingTable {
    FeatureMatrix features;
    std::vector<int> labels;       // 1 = deteriorating
    std::vector<std::size_t> set_index;
    std::vector<std::size_t> observed_minutes;
};

/// One row per labelled set, or one per window prefix when configured.
TrainingTable training_table(const Dataset& train, const Representer& representer, const DetectionConfig& config,
                             std::size_t threads = 1);

/// Labels of `table` replaced set-wise by a seeded permutation of the sets' labels.
TrainingTable shuffle_labels(TrainingTable table, const Dataset& train, std::uint64_t seed);

FittedPipeline fit_pipeline(const Dataset& train, const PipelineConfig& config, std::uint64_t seed);

}  // namespace cand
