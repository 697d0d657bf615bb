#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "cand/series.hpp"

namespace cand {

/// (T - t) / T. Throws InvalidArgument unless 0 < t <= T.
double earliness(std::size_t total_minutes, std::size_t detection_minute);

/// Arithmetic mean of F1 and earliness.
double composite(double f1, double earliness_score);

/// Severity level 1..8 of an Apache II score (five-point bins, 35+ is 8).
int apache_level(int score);

/// Removes round(fraction * #deteriorating) deteriorating sets chosen
/// uniformly with `seed`; everything else is kept in order.
Dataset prune_training(const Dataset& dataset, double fraction, std::uint64_t seed);

/// Area under the ROC curve via the Mann-Whitney statistic with midranks
/// (ties count one half). labels: 1 = positive. Throws InvalidArgument when
/// a class is missing.
double auc(std::span<const double> scores, std::span<const int> labels);

/// Per-subject outcome of a monitoring run.
struct SubjectOutcome {
    bool positive = false;          // true label is deteriorating
    bool detected = false;          // monitor halted
    std::size_t decision_minute = 0;  // detection minute, or T when never detected
    double score = 0.0;             // max per-window probability, for AUC
};

struct MetricsReport {
    double accuracy = 0.0, recall = 0.0, precision = 0.0, f1 = 0.0, auc = 0.0, earliness = 0.0, composite = 0.0;
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

/// Earliness is averaged over all subjects, each contributing (T - t)/T at
/// its decision minute (0 when never detected).
MetricsReport compute_report(std::span<const SubjectOutcome> outcomes, std::size_t total_minutes);

/// Mean of each metric; composite recomputed from the mean F1 and earliness.
MetricsReport mean_report(std::span<const MetricsReport> reports);

nlohmann::json to_json(const MetricsReport& report);

/// Stratified k-fold split of set indices: each class is shuffled with
/// `seed` and dealt round-robin. Returns test-index lists per fold.
std::vector<std::vector<std::size_t>> kfold_split(const Dataset& dataset, std::size_t folds, std::uint64_t seed);

}  // namespace cand
