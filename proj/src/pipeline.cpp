#include "cand/pipeline.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "cand/error.hpp"
#include "cand/log.hpp"
#include "cand/parallel.hpp"
#include "cand/random.hpp"

namespace cand {

std::array<ShapeletDictionary, 2> discover_dictionaries(const Dataset& dataset, const ShapeletConfig& config,
                                                        std::uint64_t seed) {
    std::array<ShapeletDictionary, 2> dicts;
    for (std::size_t c = 0; c < 2; ++c) {
        DiscoveryOptions opt;
        opt.count = config.counts[c];
        opt.length = config.length;
        opt.stride = config.stride;
        opt.max_samples = config.max_samples;
        opt.iterations = config.iterations;
        opt.seed = derive_seed(seed, {c});
        const auto slice = channel_slice(dataset, c);
        dicts[c] = discover_shapelets(slice, opt);
    }
    return dicts;
}

AssignOptions assign_options(const ShapeletConfig& config) { return {config.min_score, config.top_k}; }

std::array<SetAssignments, 2> assign_dataset(const Dataset& dataset, const std::array<ShapeletDictionary, 2>& dicts,
                                             const AssignOptions& options, std::size_t threads) {
    std::array<SetAssignments, 2> out;
    for (auto& a : out) a.resize(dataset.size());
    parallel_for(dataset.size(), threads, [&](std::size_t i) {
        for (std::size_t c = 0; c < 2; ++c) out[c][i] = assign_concepts(dataset[i].channel(c).values, dicts[c], options);
    });
    return out;
}

KnowledgeBundle build_dataset_knowledge(const Dataset& dataset, const std::array<ShapeletDictionary, 2>& dicts,
                                        const PipelineConfig& config) {
    const auto assignments = assign_dataset(dataset, dicts, assign_options(config.shapelets), config.threads);
    KnowledgeOptions opt;
    opt.relations.lower_bounds = config.knowledge.bucket_bounds;
    opt.correlation_types = config.knowledge.correlation_types;
    return build_knowledge(assignments, {dicts[0].channel, dicts[1].channel}, opt);
}

FittedPipeline fit_embedding(const Dataset& train, const PipelineConfig& config, std::uint64_t seed,
                             const EpochCallback& on_epoch) {
    if (train.empty()) throw DataError("cannot fit on an empty training set");
    FittedPipeline p;
    p.dicts = discover_dictionaries(train, config.shapelets, derive_seed(seed, {1}));
    p.knowledge = build_dataset_knowledge(train, p.dicts, config);
    TrainConfig tc = config.train;
    tc.seed = derive_seed(seed, {2});
    p.model = make_trained_model(cand::train(p.knowledge, tc, on_epoch), p.knowledge, tc);
    p.rho = config.detection.rho;
    p.assign = assign_options(config.shapelets);
    return p;
}

TrainingTable training_table(const Dataset& train, const Representer& representer, const DetectionConfig& config,
                             std::size_t threads) {
    struct Job {
        std::size_t set, minutes;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (train[i].label == Label::unknown) continue;
        const std::size_t total = train[i].length();
        if (config.train_on_prefixes) {
            for (std::size_t t = config.monitor.window; t < total + config.monitor.window; t += config.monitor.window)
                jobs.push_back({i, std::min(t, total)});
        } else {
            jobs.push_back({i, total});
        }
    }
    TrainingTable table;
    table.features.resize(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t k) {
        table.features[k] = representer(train[jobs[k].set], jobs[k].minutes);
    });
    for (const auto& j : jobs) {
        table.labels.push_back(train[j.set].label == Label::deteriorating ? 1 : 0);
        table.set_index.push_back(j.set);
        table.observed_minutes.push_back(j.minutes);
    }
    return table;
}

TrainingTable shuffle_labels(TrainingTable table, const Dataset& train, std::uint64_t seed) {
    std::vector<Label> labels;
    for (const auto& s : train) labels.push_back(s.label);
    std::mt19937_64 rng(seed);
    std::shuffle(labels.begin(), labels.end(), rng);
    for (std::size_t k = 0; k < table.labels.size(); ++k)
        table.labels[k] = labels[table.set_index[k]] == Label::deteriorating ? 1 : 0;
    return table;
}

FittedPipeline fit_pipeline(const Dataset& train, const PipelineConfig& config, std::uint64_t seed) {
    FittedPipeline p = fit_embedding(train, config, seed);
    const auto table = training_table(train, p.representer(), config.detection, config.threads);
    p.classifier = fit_builtin_classifier(table.features, table.labels, config.detection.classifier, derive_seed(seed, {3}));
    return p;
}

}  // namespace cand
