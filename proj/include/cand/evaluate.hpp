#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "cand/config.hpp"
#include "cand/metrics.hpp"
#include "cand/monitor.hpp"
#include "cand/pipeline.hpp"

namespace cand {

/// Streams every set through the fitted detector.
std::vector<MonitorState> monitor_dataset(const Dataset& dataset, const FittedPipeline& pipeline,
                                          const MonitorConfig& config, std::size_t threads = 1);

MetricsReport score_monitoring(const Dataset& dataset, const std::vector<MonitorState>& states);

struct RunResult {
    double prune = 0.0;
    double delay_start = 0.0;
    bool control = false;                          // classifier fit on shuffled labels
    std::vector<std::optional<MetricsReport>> folds;  // nullopt for skipped folds
    MetricsReport mean;
};

struct EvaluationResult {
    std::vector<RunResult> runs;

    const RunResult* find(double prune, double delay_start, bool control) const;
};

/// k-fold protocol: per fold and prune level, fit on the (pruned) training
/// part and monitor the untouched test part at every delay start. The
/// shuffled-label control reuses the unpruned fit of each fold.
EvaluationResult evaluate(const Dataset& dataset, const PipelineConfig& config);

nlohmann::json to_json(const EvaluationResult& result);

}  // namespace cand
