#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "cand/monitor.hpp"
#include "cand/synth.hpp"
#include "cand/trainer.hpp"

namespace cand {

struct ShapeletConfig {
    std::array<std::size_t, 2> counts{60, 80};  // K per channel
    std::size_t length = 15;                    // L_s
    std::size_t stride = 0;                     // sampling stride; 0 = length
    std::size_t max_samples = 50000;
    int iterations = 50;
    double min_score = 0.7;
    std::size_t top_k = 3;
};

struct KnowledgeConfig {
    std::vector<int> bucket_bounds{0, 30, 60, 90};
    int correlation_types = 5;
};

struct DetectionConfig {
    double rho = 0.8;
    std::string classifier = "logistic";
    bool train_on_prefixes = true;  // one training row per window prefix instead of per full set
    MonitorConfig monitor;
};

struct EvaluationConfig {
    std::size_t folds = 3;
    std::vector<double> prune{0.0};
    std::vector<double> delay_starts{0.0};
    bool shuffled_control = false;
};

struct PipelineConfig {
    SynthConfig synth;
    ShapeletConfig shapelets;
    KnowledgeConfig knowledge;
    TrainConfig train;               // train.seed is derived from `seed`
    DetectionConfig detection;
    EvaluationConfig evaluation;
    std::uint64_t seed = 1;
    std::size_t threads = 1;         // 0 = hardware concurrency
};

/// Full-size settings: d=256, 500 epochs, 60/80 shapelets.
PipelineConfig full_preset();
/// Desk-scale settings for the synthetic data: d=32, 300 epochs.
PipelineConfig desk_preset();
PipelineConfig preset(const std::string& name);

void validate(const PipelineConfig& config);

/// Overlays `doc` on `base`; unknown keys and ill-typed values raise ConfigError.
PipelineConfig config_from_json(const nlohmann::json& doc, PipelineConfig base);
nlohmann::json to_json(const PipelineConfig& config);

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& doc, TrainConfig base = {});

nlohmann::json to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const nlohmann::json& doc, SynthConfig base = {});

}  // namespace cand
