#include "cand/config.hpp"

#include <set>

#include "cand/error.hpp"

namespace cand {

using nlohmann::json;

NLOHMANN_JSON_SERIALIZE_ENUM(StrengthScope, {{StrengthScope::all, "all"},
                                             {StrengthScope::per_correlation, "per_correlation"}})

namespace {

template <typename F>
void visit(TrainConfig& c, F&& f, bool with_seed) {
    f("margin", c.margin);
    f("margin_scale", c.margin_scale);
    f("context_weight", c.context_weight);
    f("cross_balance", c.cross_balance);
    f("learning_rate", c.learning_rate);
    f("negatives", c.negatives);
    f("adversarial_temperature", c.adversarial_temperature);
    f("epochs", c.epochs);
    f("dim", c.dim);
    f("walk_length", c.walk_length);
    f("walks_per_concept", c.walks_per_concept);
    f("exploration_bias", c.exploration_bias);
    f("max_path_length", c.max_path_length);
    f("max_paths_per_pair", c.max_paths_per_pair);
    f("mf_dim", c.mf_dim);
    f("rank_threshold", c.rank_threshold);
    f("mf_learning_rate", c.mf_learning_rate);
    f("mf_regularization", c.mf_regularization);
    f("strength_softmax_scope", c.strength_scope);
    f("adam_beta1", c.adam_beta1);
    f("adam_beta2", c.adam_beta2);
    f("adam_epsilon", c.adam_epsilon);
    if (with_seed) f("seed", c.seed);
}

template <typename F>
void visit(SynthConfig& c, F&& f) {
    f("n_sets", c.n_sets);
    f("length", c.length);
    f("motifs", c.motifs);
    f("motif_length", c.motif_length);
    f("noise", c.noise);
    f("deteriorating_fraction", c.deteriorating_fraction);
    f("gap_probabilities", c.gap_probabilities);
    f("class_motifs", c.class_motifs);
    f("dominant_probability", c.dominant_probability);
    f("coupled_pairs", c.coupled_pairs);
    f("coupling", c.coupling);
    f("seed", c.seed);
}

template <typename F>
void visit(ShapeletConfig& c, F&& f) {
    f("counts", c.counts);
    f("length", c.length);
    f("stride", c.stride);
    f("max_samples", c.max_samples);
    f("iterations", c.iterations);
    f("min_score", c.min_score);
    f("top_k", c.top_k);
}

template <typename F>
void visit(KnowledgeConfig& c, F&& f) {
    f("bucket_bounds", c.bucket_bounds);
    f("correlation_types", c.correlation_types);
}

template <typename F>
void visit(DetectionConfig& c, F&& f) {
    f("rho", c.rho);
    f("classifier", c.classifier);
    f("train_on_prefixes", c.train_on_prefixes);
    f("window", c.monitor.window);
    f("threshold", c.monitor.threshold);
    f("delay_start", c.monitor.delay_start);
}

template <typename F>
void visit(EvaluationConfig& c, F&& f) {
    f("folds", c.folds);
    f("prune", c.prune);
    f("delay_starts", c.delay_starts);
    f("shuffled_control", c.shuffled_control);
}

template <typename T, typename... Extra>
json write_section(T value, Extra... extra) {
    json out = json::object();
    visit(value, [&](const char* key, const auto& field) { out[key] = field; }, extra...);
    return out;
}

template <typename T, typename... Extra>
void read_section(const json& doc, T& target, const std::string& section, Extra... extra) {
    if (!doc.is_object()) throw ConfigError("config section '" + section + "' must be an object");
    std::set<std::string> known;
    visit(target, [&](const char* key, auto&) { known.insert(key); }, extra...);
    for (const auto& [key, value] : doc.items())
        if (!known.count(key)) throw ConfigError("unknown config key '" + section + (section.empty() ? "" : ".") + key + "'");
    visit(target, [&](const char* key, auto& field) {
        if (!doc.contains(key)) return;
        try {
            doc.at(key).get_to(field);
        } catch (const json::exception& e) {
            throw ConfigError("config key '" + section + "." + key + "': " + e.what());
        }
    }, extra...);
}

}  // namespace

PipelineConfig full_preset() { return PipelineConfig{}; }

PipelineConfig desk_preset() {
    PipelineConfig c;
    c.shapelets.counts = {24, 24};
    c.train.dim = 32;
    c.train.epochs = 300;
    c.train.max_paths_per_pair = 64;
    return c;
}

PipelineConfig preset(const std::string& name) {
    if (name == "desk") return desk_preset();
    if (name == "full") return full_preset();
    throw ConfigError("unknown preset '" + name + "' (expected desk or full)");
}

void validate(const PipelineConfig& c) {
    validate(c.synth);
    validate(c.train);
    validate(c.detection.monitor);
    if (c.shapelets.counts[0] == 0 || c.shapelets.counts[1] == 0) throw ConfigError("shapelet counts must be positive");
    if (c.shapelets.length == 0) throw ConfigError("shapelet length must be positive");
    if (c.shapelets.iterations < 0) throw ConfigError("k-means iterations must be non-negative");
    if (c.shapelets.min_score < 0.0 || c.shapelets.min_score > 1.0) throw ConfigError("min_score must lie in [0,1]");
    if (c.shapelets.top_k == 0) throw ConfigError("top_k must be positive");
    IntervalRelations rel{c.knowledge.bucket_bounds};
    validate(rel);
    if (c.knowledge.correlation_types < 1) throw ConfigError("at least one correlation type is required");
    if (!(c.detection.rho > 0.0 && c.detection.rho <= 1.0)) throw ConfigError("rho must lie in (0,1]");
    if (c.detection.classifier != "logistic" && c.detection.classifier != "gbdt")
        throw ConfigError("classifier must be logistic or gbdt");
    if (c.evaluation.folds < 2) throw ConfigError("at least two folds are required");
    for (double p : c.evaluation.prune)
        if (!(p >= 0.0 && p < 1.0)) throw ConfigError("prune fractions must lie in [0,1)");
    for (double d : c.evaluation.delay_starts)
        if (!(d >= 0.0 && d < 1.0)) throw ConfigError("delay starts must lie in [0,1)");
}

json to_json(const TrainConfig& c) { return write_section(c, true); }

TrainConfig train_config_from_json(const json& doc, TrainConfig base) {
    read_section(doc, base, "train", true);
    return base;
}

json to_json(const SynthConfig& c) { return write_section(c); }

SynthConfig synth_config_from_json(const json& doc, SynthConfig base) {
    read_section(doc, base, "synth");
    return base;
}

json to_json(const PipelineConfig& c) {
    return {{"synth", write_section(c.synth)},
            {"shapelets", write_section(c.shapelets)},
            {"knowledge", write_section(c.knowledge)},
            {"train", write_section(c.train, false)},
            {"detection", write_section(c.detection)},
            {"evaluation", write_section(c.evaluation)},
            {"seed", c.seed},
            {"threads", c.threads}};
}

PipelineConfig config_from_json(const json& doc, PipelineConfig base) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (key == "synth") read_section(value, base.synth, key);
        else if (key == "shapelets") read_section(value, base.shapelets, key);
        else if (key == "knowledge") read_section(value, base.knowledge, key);
        else if (key == "train") read_section(value, base.train, key, false);
        else if (key == "detection") read_section(value, base.detection, key);
        else if (key == "evaluation") read_section(value, base.evaluation, key);
        else if (key == "seed" || key == "threads") {
            if (!value.is_number_unsigned()) throw ConfigError("config key '" + key + "' must be a non-negative integer");
            (key == "seed" ? base.seed : base.threads) = value.get<std::uint64_t>();
        }
        else throw ConfigError("unknown config key '" + key + "'");
    }
    validate(base);
    return base;
}

}  // namespace cand
