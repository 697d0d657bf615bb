#include "cand/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cand/error.hpp"

namespace cand {

double earliness(std::size_t total_minutes, std::size_t detection_minute) {
    if (detection_minute == 0 || detection_minute > total_minutes)
        throw InvalidArgument("earliness: detection minute " + std::to_string(detection_minute) +
                              " outside (0, " + std::to_string(total_minutes) + "]");
    return static_cast<double>(total_minutes - detection_minute) / static_cast<double>(total_minutes);
}

double composite(double f1, double earliness_score) { return (f1 + earliness_score) / 2.0; }

int apache_level(int score) {
    if (score < 0) throw InvalidArgument("apache_level: negative score");
    return std::min(score / 5 + 1, 8);
}

Dataset prune_training(const Dataset& dataset, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction < 1.0)) throw InvalidArgument("prune fraction must lie in [0, 1)");
    std::vector<std::size_t> positives;
    for (std::size_t i = 0; i < dataset.size(); ++i)
        if (dataset[i].label == Label::deteriorating) positives.push_back(i);
    const auto remove = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(positives.size())));
    std::mt19937_64 rng(seed);
    std::shuffle(positives.begin(), positives.end(), rng);
    std::vector<bool> drop(dataset.size(), false);
    for (std::size_t k = 0; k < remove; ++k) drop[positives[k]] = true;
    Dataset out;
    for (std::size_t i = 0; i < dataset.size(); ++i)
        if (!drop[i]) out.push_back(dataset[i]);
    return out;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw InvalidArgument("auc: score and label counts differ");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum = 0.0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] == 1) {
                rank_sum += midrank;
                ++pos;
            }
        i = j;
    }
    const std::size_t neg = scores.size() - pos;
    if (pos == 0 || neg == 0) throw InvalidArgument("auc: both classes are required");
    const double np = static_cast<double>(pos), nn = static_cast<double>(neg);
    return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

MetricsReport compute_report(std::span<const SubjectOutcome> outcomes, std::size_t total_minutes) {
    MetricsReport r;
    if (outcomes.empty()) return r;
    std::vector<double> scores;
    std::vector<int> labels;
    double ear = 0.0;
    for (const auto& o : outcomes) {
        if (o.positive) (o.detected ? r.tp : r.fn)++;
        else (o.detected ? r.fp : r.tn)++;
        ear += o.detected ? earliness(total_minutes, o.decision_minute) : 0.0;
        scores.push_back(o.score);
        labels.push_back(o.positive ? 1 : 0);
    }
    const double n = static_cast<double>(outcomes.size());
    r.accuracy = static_cast<double>(r.tp + r.tn) / n;
    r.recall = r.tp + r.fn ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
    r.precision = r.tp + r.fp ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
    r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    const bool both = r.tp + r.fn > 0 && r.fp + r.tn > 0;
    r.auc = both ? auc(scores, labels) : 0.5;
    r.earliness = ear / n;
    r.composite = composite(r.f1, r.earliness);
    return r;
}

MetricsReport mean_report(std::span<const MetricsReport> reports) {
    MetricsReport m;
    if (reports.empty()) return m;
    const double n = static_cast<double>(reports.size());
    for (const auto& r : reports) {
        m.accuracy += r.accuracy / n;
        m.recall += r.recall / n;
        m.precision += r.precision / n;
        m.f1 += r.f1 / n;
        m.auc += r.auc / n;
        m.earliness += r.earliness / n;
        m.tp += r.tp;
        m.fp += r.fp;
        m.tn += r.tn;
        m.fn += r.fn;
    }
    m.composite = composite(m.f1, m.earliness);
    return m;
}

nlohmann::json to_json(const MetricsReport& r) {
    return {{"accuracy", r.accuracy}, {"recall", r.recall},       {"precision", r.precision},
            {"f1", r.f1},             {"auc", r.auc},             {"earliness", r.earliness},
            {"composite", r.composite}, {"tp", r.tp}, {"fp", r.fp}, {"tn", r.tn}, {"fn", r.fn}};
}

std::vector<std::vector<std::size_t>> kfold_split(const Dataset& dataset, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw ConfigError("at least two folds are required");
    if (dataset.size() < folds) throw ConfigError("fewer sets than folds");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> out(folds);
    std::size_t next = 0;
    for (Label label : {Label::deteriorating, Label::recovering, Label::unknown}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < dataset.size(); ++i)
            if (dataset[i].label == label) members.push_back(i);
        std::shuffle(members.begin(), members.end(), rng);
        for (auto i : members) out[next++ % folds].push_back(i);
    }
    for (auto& fold : out) std::sort(fold.begin(), fold.end());
    return out;
}

}  // namespace cand
