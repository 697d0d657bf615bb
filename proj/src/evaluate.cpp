#include "cand/evaluate.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "cand/artifact.hpp"
#include "cand/error.hpp"
#include "cand/log.hpp"
#include "cand/parallel.hpp"
#include "cand/random.hpp"

namespace cand {

std::vector<MonitorState> monitor_dataset(const Dataset& dataset, const FittedPipeline& pipeline,
                                          const MonitorConfig& config, std::size_t threads) {
    if (!pipeline.classifier) throw InvalidArgument("pipeline has no classifier");
    const Representer representer = pipeline.representer();
    const Detector detector{&representer, pipeline.classifier.get()};
    std::vector<MonitorState> states(dataset.size());
    parallel_for(dataset.size(), threads, [&](std::size_t i) { states[i] = run_monitor(dataset[i], detector, config); });
    return states;
}

MetricsReport score_monitoring(const Dataset& dataset, const std::vector<MonitorState>& states) {
    std::vector<SubjectOutcome> outcomes;
    std::size_t total = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        outcomes.push_back(outcome(states[i], dataset[i].label));
        total = std::max(total, dataset[i].length());
    }
    for (const auto& s : dataset)
        if (s.length() != total) throw DataError("evaluation expects sets of equal length");
    return compute_report(outcomes, total);
}

const RunResult* EvaluationResult::find(double prune, double delay_start, bool control) const {
    for (const auto& r : runs)
        if (std::abs(r.prune - prune) < 1e-12 && std::abs(r.delay_start - delay_start) < 1e-12 && r.control == control)
            return &r;
    return nullptr;
}

namespace {

bool has_both_classes(const Dataset& d) {
    return count_label(d, Label::deteriorating) > 0 && count_label(d, Label::recovering) > 0;
}

}  // namespace

EvaluationResult evaluate(const Dataset& dataset, const PipelineConfig& config) {
    validate(config);
    for (const auto& s : dataset)
        if (s.label == Label::unknown) throw DataError("evaluation needs labels; set " + s.set_id + " has none");
    const auto& ev = config.evaluation;
    const auto folds = kfold_split(dataset, ev.folds, derive_seed(config.seed, {10}));

    // Result slots: [fold][prune][delay] plus [fold][delay] for the control.
    const std::size_t np = ev.prune.size(), nd = ev.delay_starts.size();
    std::vector<std::optional<MetricsReport>> slots(folds.size() * np * nd);
    std::vector<std::optional<MetricsReport>> control(folds.size() * nd);

    struct Job {
        std::size_t fold, prune;
    };
    std::vector<Job> jobs;
    for (std::size_t f = 0; f < folds.size(); ++f)
        for (std::size_t p = 0; p < np; ++p) jobs.push_back({f, p});

    // Folds run in parallel; work inside a job stays single-threaded so the
    // thread count never changes results.
    PipelineConfig inner = config;
    inner.threads = 1;
    parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
        const auto [f, p] = jobs[j];
        Dataset train, test;
        std::vector<bool> in_test(dataset.size(), false);
        for (auto i : folds[f]) in_test[i] = true;
        for (std::size_t i = 0; i < dataset.size(); ++i) (in_test[i] ? test : train).push_back(dataset[i]);
        train = prune_training(train, ev.prune[p], derive_seed(config.seed, {11, f, p}));
        if (!has_both_classes(train) || !has_both_classes(test)) {
            log::warn("fold " + std::to_string(f + 1) + " holds a single class; skipped");
            return;
        }
        FittedPipeline fitted = fit_embedding(train, inner, derive_seed(config.seed, {12, f, p}));
        const auto table = training_table(train, fitted.representer(), inner.detection);
        fitted.classifier = fit_builtin_classifier(table.features, table.labels, inner.detection.classifier,
                                                   derive_seed(config.seed, {13, f, p}));
        for (std::size_t d = 0; d < nd; ++d) {
            MonitorConfig mc = inner.detection.monitor;
            mc.delay_start = ev.delay_starts[d];
            slots[(f * np + p) * nd + d] = score_monitoring(test, monitor_dataset(test, fitted, mc));
        }
        log::info("fold " + std::to_string(f + 1) + ", prune " + std::to_string(ev.prune[p]) + " done");
        if (ev.shuffled_control && p == 0) {
            const auto shuffled = shuffle_labels(table, train, derive_seed(config.seed, {14, f}));
            try {
                fitted.classifier = fit_builtin_classifier(shuffled.features, shuffled.labels,
                                                           inner.detection.classifier, derive_seed(config.seed, {15, f}));
            } catch (const FitError&) {
                return;
            }
            for (std::size_t d = 0; d < nd; ++d) {
                MonitorConfig mc = inner.detection.monitor;
                mc.delay_start = ev.delay_starts[d];
                control[f * nd + d] = score_monitoring(test, monitor_dataset(test, fitted, mc));
            }
        }
    });

    EvaluationResult result;
    auto collect = [&](RunResult run, auto slot_of) {
        std::vector<MetricsReport> present;
        for (std::size_t f = 0; f < folds.size(); ++f) {
            run.folds.push_back(slot_of(f));
            if (run.folds.back()) present.push_back(*run.folds.back());
        }
        run.mean = mean_report(present);
        result.runs.push_back(std::move(run));
    };
    for (std::size_t p = 0; p < np; ++p)
        for (std::size_t d = 0; d < nd; ++d)
            collect(RunResult{ev.prune[p], ev.delay_starts[d], false, {}, {}},
                    [&](std::size_t f) { return slots[(f * np + p) * nd + d]; });
    if (ev.shuffled_control)
        for (std::size_t d = 0; d < nd; ++d)
            collect(RunResult{ev.prune.front(), ev.delay_starts[d], true, {}, {}},
                    [&](std::size_t f) { return control[f * nd + d]; });
    return result;
}

nlohmann::json to_json(const EvaluationResult& result) {
    nlohmann::json doc = artifact_header("evaluation");
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : result.runs) {
        nlohmann::json folds = nlohmann::json::array();
        for (const auto& f : r.folds) folds.push_back(f ? to_json(*f) : nlohmann::json(nullptr));
        runs.push_back({{"prune", r.prune},
                        {"delay_start", r.delay_start},
                        {"shuffled_labels", r.control},
                        {"folds", folds},
                        {"mean", to_json(r.mean)}});
    }
    doc["runs"] = runs;
    return doc;
}

}  // namespace cand
