#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "cand/artifact.hpp"
#include "cand/config.hpp"
#include "cand/error.hpp"
#include "cand/evaluate.hpp"
#include "cand/knowledge_io.hpp"
#include "cand/log.hpp"
#include "cand/model_io.hpp"
#include "cand/parallel.hpp"
#include "cand/pipeline.hpp"
#include "cand/random.hpp"
#include "cand/series_io.hpp"
#include "cand/synth.hpp"

namespace cand::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string config_path;
    std::optional<std::size_t> threads;
    std::string preset = "desk";
    bool verbose = false;
    bool quiet = false;

    PipelineConfig config() const {
        PipelineConfig c = cand::preset(preset);
        if (!config_path.empty()) c = config_from_json(read_json_file(config_path), c);
        if (seed) c.seed = *seed;
        if (threads) c.threads = *threads;
        validate(c);
        return c;
    }
};

// ---- artifacts -------------------------------------------------------------

json shapelets_artifact(const std::array<ShapeletDictionary, 2>& dicts) {
    json doc = artifact_header("shapelets");
    doc["dictionaries"] = {to_json(dicts[0]), to_json(dicts[1])};
    return doc;
}

std::array<ShapeletDictionary, 2> load_shapelets(const fs::path& path) {
    const json doc = read_json_file(path);
    check_artifact(doc, "shapelets");
    const auto& list = doc.at("dictionaries");
    if (!list.is_array() || list.size() != 2) throw ArtifactError("shapelets artifact must hold two dictionaries");
    return {dictionary_from_json(list[0]), dictionary_from_json(list[1])};
}

KnowledgeBundle load_knowledge(const fs::path& path) { return knowledge_from_json(read_json_file(path)); }

std::unique_ptr<Classifier> load_classifier(const fs::path& path) { return classifier_from_json(read_json_file(path)); }

Dataset load_dataset(const fs::path& series, const std::string& labels) {
    Dataset d = read_series_csv(series);
    if (!labels.empty()) apply_labels(d, read_labels_csv(fs::path(labels)));
    return d;
}

FittedPipeline load_pipeline(const fs::path& shapelets, const fs::path& knowledge, const fs::path& model,
                             const std::string& classifier, const PipelineConfig& config) {
    FittedPipeline p;
    p.dicts = load_shapelets(shapelets);
    p.knowledge = load_knowledge(knowledge);
    p.model = load_model(model);
    if (!classifier.empty()) p.classifier = load_classifier(classifier);
    p.rho = config.detection.rho;
    p.assign = assign_options(config.shapelets);
    for (std::size_t c = 0; c < 2; ++c)
        if (p.knowledge.domains[c].channel != p.model.channels[c] || p.dicts[c].channel != p.model.channels[c])
            throw ArtifactError("shapelets, knowledge and model disagree on channel names");
    return p;
}

const MeasurementSet& find_set(const Dataset& d, const std::string& id) {
    for (const auto& s : d)
        if (s.set_id == id) return s;
    throw DataError("no set '" + id + "' in the series file");
}

void write_lines(const fs::path& path, const std::vector<json>& lines) {
    auto out = open_output(path);
    for (const auto& l : lines) out << l.dump() << '\n';
    if (!out) throw ArtifactError("failed writing " + path.string());
}

// ---- commands --------------------------------------------------------------

struct SynthArgs {
    fs::path out_dir;
    std::optional<std::size_t> sets;
};

void cmd_synth(const Globals& g, const SynthArgs& a) {
    PipelineConfig c = g.config();
    if (g.seed) c.synth.seed = *g.seed;
    if (a.sets) c.synth.n_sets = *a.sets;
    const auto out = generate(c.synth);
    fs::create_directories(a.out_dir);
    write_series_csv(a.out_dir / "series.csv", out.dataset);
    write_labels_csv(a.out_dir / "labels.csv", out.dataset);
    write_json_file(a.out_dir / "truth.json", to_json(out.truth));
}

struct ShapeletArgs {
    fs::path series, out;
    std::vector<std::string> imports;
};

void cmd_shapelets(const Globals& g, const ShapeletArgs& a) {
    const PipelineConfig c = g.config();
    std::array<ShapeletDictionary, 2> dicts;
    if (!a.imports.empty()) {
        if (a.imports.size() != 2) throw ConfigError("--import needs one dictionary per channel (two files)");
        for (std::size_t i = 0; i < 2; ++i) dicts[i] = dictionary_from_json(read_json_file(a.imports[i]));
    } else {
        dicts = discover_dictionaries(read_series_csv(a.series), c.shapelets, derive_seed(c.seed, {1}));
    }
    write_json_file(a.out, shapelets_artifact(dicts));
}

struct BuildArgs {
    fs::path series, shapelets, out;
};

void cmd_build_ks(const Globals& g, const BuildArgs& a) {
    const PipelineConfig c = g.config();
    const auto dicts = load_shapelets(a.shapelets);
    write_json_file(a.out, to_json(build_dataset_knowledge(read_series_csv(a.series), dicts, c)));
}

struct TrainArgs {
    fs::path knowledge, out;
    std::optional<std::size_t> epochs;
};

void cmd_train(const Globals& g, const TrainArgs& a) {
    const PipelineConfig c = g.config();
    const auto knowledge = load_knowledge(a.knowledge);
    TrainConfig tc = c.train;
    tc.seed = derive_seed(c.seed, {2});
    if (a.epochs) tc.epochs = *a.epochs;
    auto progress = [&](const EpochLog& e) {
        if (e.epoch % 50 == 0 || e.epoch == tc.epochs)
            log::info("epoch " + std::to_string(e.epoch) + ": cross " + std::to_string(e.cross_loss) + ", domain " +
                      std::to_string(e.domain_loss));
    };
    try {
        save_model(a.out, make_trained_model(train(knowledge, tc, progress), knowledge, tc));
    } catch (const DivergenceError& e) {
        TrainResult partial;
        partial.store = e.checkpoint();
        const fs::path checkpoint = a.out.string() + ".checkpoint.json";
        log::warn("training diverged; last finite embedding written to " + checkpoint.string());
        TrainedModel m = make_trained_model(std::move(partial), knowledge, tc);
        m.mf = MFParams::random(m.pairs.size(), kViewCount * knowledge.cross.n_types(), tc.mf_dim, 0);
        save_model(checkpoint, m);
        throw;
    }
}

struct ArtifactArgs {
    fs::path series, shapelets, knowledge, model;
    std::string labels, classifier;
};

struct RepresentArgs {
    ArtifactArgs in;
    fs::path out;
    std::optional<std::size_t> observed;
    bool prefixes = false;
};

void cmd_represent(const Globals& g, const RepresentArgs& a) {
    const PipelineConfig c = g.config();
    const Dataset d = load_dataset(a.in.series, a.in.labels);
    const FittedPipeline p = load_pipeline(a.in.shapelets, a.in.knowledge, a.in.model, "", c);
    const Representer rep = p.representer();
    std::vector<FeatureRow> rows;
    for (const auto& s : d) {
        std::vector<std::size_t> minutes;
        if (a.prefixes) {
            for (std::size_t t = c.detection.monitor.window; t < s.length() + c.detection.monitor.window;
                 t += c.detection.monitor.window)
                minutes.push_back(std::min(t, s.length()));
        } else {
            minutes.push_back(a.observed ? std::min(*a.observed, s.length()) : s.length());
        }
        for (auto t : minutes) rows.push_back({s.set_id, t, rep(s, t), s.label});
    }
    auto out = open_output(a.out);
    write_features_csv(out, rows);
}

struct FitArgs {
    ArtifactArgs in;
    fs::path out;
    std::string kind;
};

void cmd_fit(const Globals& g, const FitArgs& a) {
    PipelineConfig c = g.config();
    if (!a.kind.empty()) c.detection.classifier = a.kind;
    validate(c);
    const Dataset d = load_dataset(a.in.series, a.in.labels);
    const FittedPipeline p = load_pipeline(a.in.shapelets, a.in.knowledge, a.in.model, "", c);
    const auto table = training_table(d, p.representer(), c.detection, c.threads);
    const auto model = fit_builtin_classifier(table.features, table.labels, c.detection.classifier, derive_seed(c.seed, {3}));
    write_json_file(a.out, classifier_artifact(*model));
}

struct MonitorArgs {
    ArtifactArgs in;
    fs::path out;
    std::string set;
    std::optional<double> delay;
};

json window_line(const MonitorState& s, const WindowRecord& r) {
    return {{"set_id", s.set_id}, {"t", r.t}, {"probability", r.probability}, {"eligible", r.eligible},
            {"halted", r.halted}};
}

void cmd_monitor(const Globals& g, const MonitorArgs& a) {
    PipelineConfig c = g.config();
    if (a.delay) c.detection.monitor.delay_start = *a.delay;
    validate(c);
    const Dataset d = load_dataset(a.in.series, a.in.labels);
    const FittedPipeline p = load_pipeline(a.in.shapelets, a.in.knowledge, a.in.model, a.in.classifier, c);
    Dataset chosen;
    if (a.set.empty()) chosen = d;
    else chosen.push_back(find_set(d, a.set));
    const auto states = monitor_dataset(chosen, p, c.detection.monitor, c.threads);
    std::vector<json> lines;
    for (const auto& s : states)
        for (const auto& r : s.trace) lines.push_back(window_line(s, r));
    write_lines(a.out, lines);
}

struct EvaluateArgs {
    fs::path series, out;
    std::string labels;
    std::optional<std::size_t> folds;
    std::vector<double> prune, delay;
    bool control = false;
};

void cmd_evaluate(const Globals& g, const EvaluateArgs& a) {
    PipelineConfig c = g.config();
    if (a.folds) c.evaluation.folds = *a.folds;
    if (!a.prune.empty()) c.evaluation.prune = a.prune;
    if (!a.delay.empty()) c.evaluation.delay_starts = a.delay;
    if (a.control) c.evaluation.shuffled_control = true;
    validate(c);
    if (a.labels.empty()) throw ConfigError("evaluate needs --labels");
    const Dataset d = load_dataset(a.series, a.labels);
    json doc = to_json(evaluate(d, c));
    doc["config"] = to_json(c);
    write_json_file(a.out, doc);
}

struct TraceArgs {
    ArtifactArgs in;
    fs::path out;
    std::string set, strengths_csv, walks;
    std::size_t top = 3;
};

void cmd_trace(const Globals& g, const TraceArgs& a) {
    const PipelineConfig c = g.config();
    const Dataset d = load_dataset(a.in.series, a.in.labels);
    const FittedPipeline p = load_pipeline(a.in.shapelets, a.in.knowledge, a.in.model, a.in.classifier, c);
    const auto& set = find_set(d, a.set);
    const Representer rep = p.representer();
    const Detector detector{&rep, p.classifier.get()};
    const MonitorState state = run_monitor(set, detector, c.detection.monitor);
    const auto& cross = p.knowledge.cross;
    const auto& names = p.model.channels;

    std::vector<json> lines;
    for (const auto& r : state.trace) {
        std::array<std::set<int>, 2> matched;
        json concepts = json::object();
        for (std::size_t ch = 0; ch < 2; ++ch) {
            const std::span<const double> prefix(set.channel(ch).values.data(), r.t);
            for (const auto& asg : assign_concepts(prefix, p.dicts[ch], p.assign)) matched[ch].insert(asg.concept_id);
            concepts[names[ch]] = std::vector<int>(matched[ch].begin(), matched[ch].end());
        }
        struct Edge {
            double strength;
            std::size_t pair;
            View view;
        };
        std::vector<Edge> edges;
        for (std::size_t u = 0; u < cross.triplets.size(); ++u) {
            const auto& t = cross.triplets[u];
            if (!matched[0].count(t.head) || !matched[1].count(t.tail)) continue;
            for (std::size_t v = 0; v < kViewCount; ++v) {
                const AmbiguityType type{t.correlation, static_cast<View>(v)};
                edges.push_back({p.model.strengths.strength(u, type), u, type.view});
            }
        }
        std::stable_sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.strength > y.strength; });
        if (edges.size() > a.top) edges.resize(a.top);
        json top = json::array();
        for (const auto& e : edges) {
            const auto& t = cross.triplets[e.pair];
            top.push_back({{"head", names[0] + ":" + std::to_string(t.head)},
                           {"tail", names[1] + ":" + std::to_string(t.tail)},
                           {"correlation", t.correlation},
                           {"view", std::string(to_string(e.view))},
                           {"strength", e.strength}});
        }
        json line = window_line(state, r);
        line["matched_concepts"] = concepts;
        line["top_strength_edges"] = top;
        lines.push_back(std::move(line));
    }
    write_lines(a.out, lines);

    if (!a.strengths_csv.empty()) {
        auto out = open_output(a.strengths_csv);
        write_strengths_csv(out, p.model);
    }
    if (!a.walks.empty()) {
        const TrainingContexts contexts = prepare_contexts(p.knowledge, p.model.store, p.model.config);
        json walks = json::array();
        for (const auto& [node, list] : contexts.walks) {
            json items = json::array();
            for (const auto& w : list) items.push_back(to_json(w));
            walks.push_back({{"concept", names[node.channel] + ":" + std::to_string(node.id)}, {"walks", items}});
        }
        json paths = json::array();
        for (std::size_t u = 0; u < cross.triplets.size(); ++u) {
            json items = json::array();
            for (const auto& path : contexts.paths[u]) items.push_back(to_json(path));
            paths.push_back({{"head", names[0] + ":" + std::to_string(cross.triplets[u].head)},
                             {"tail", names[1] + ":" + std::to_string(cross.triplets[u].tail)},
                             {"paths", items}});
        }
        json doc = artifact_header("contexts");
        doc["walks"] = walks;
        doc["correlation_paths"] = paths;
        write_json_file(a.walks, doc);
    }
}

void add_artifact_options(CLI::App* cmd, ArtifactArgs& a, bool classifier) {
    cmd->add_option("--series", a.series, "series CSV")->required();
    cmd->add_option("--labels", a.labels, "labels CSV");
    cmd->add_option("--shapelets", a.shapelets, "shapelets artifact")->required();
    cmd->add_option("--knowledge", a.knowledge, "knowledge artifact")->required();
    cmd->add_option("--model", a.model, "model file (.json or .bin)")->required();
    if (classifier) cmd->add_option("--classifier", a.classifier, "classifier artifact")->required();
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Knowledge-structure embedding and early deterioration detection for two-channel vital signs"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "root seed (for synth: the generator seed)");
    app.add_option("--config", g.config_path, "JSON config overlaid on the preset");
    app.add_option("--threads", g.threads, "worker threads (0 = all cores)");
    app.add_option("--preset", g.preset, "base settings: desk or full")->capture_default_str();
    app.add_flag("-v,--verbose", g.verbose, "progress messages");
    app.add_flag("-q,--quiet", g.quiet, "suppress warnings");

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "generate a labelled synthetic dataset");
    c_synth->add_option("--out-dir", synth.out_dir, "directory for series.csv, labels.csv, truth.json")->required();
    c_synth->add_option("--sets", synth.sets, "number of measurement sets");

    ShapeletArgs shp;
    auto* c_shp = app.add_subcommand("shapelets", "discover (or import) shapelet dictionaries");
    c_shp->add_option("--series", shp.series, "series CSV");
    c_shp->add_option("--import", shp.imports, "external dictionary JSON, one per channel in channel order");
    c_shp->add_option("--out", shp.out, "shapelets artifact")->required();

    BuildArgs bks;
    auto* c_bks = app.add_subcommand("build-ks", "build domain and cross knowledge structures");
    c_bks->add_option("--series", bks.series, "series CSV")->required();
    c_bks->add_option("--shapelets", bks.shapelets, "shapelets artifact")->required();
    c_bks->add_option("--out", bks.out, "knowledge artifact")->required();

    TrainArgs tr;
    auto* c_tr = app.add_subcommand("train", "jointly embed the knowledge structures");
    c_tr->add_option("--knowledge", tr.knowledge, "knowledge artifact")->required();
    c_tr->add_option("--out", tr.out, "model file (.bin for the binary format)")->required();
    c_tr->add_option("--epochs", tr.epochs, "override the epoch count");

    RepresentArgs rep;
    auto* c_rep = app.add_subcommand("represent", "export representation vectors as CSV");
    add_artifact_options(c_rep, rep.in, false);
    c_rep->add_option("--out", rep.out, "features CSV")->required();
    c_rep->add_option("--observed", rep.observed, "minutes observed per set (default: all)");
    c_rep->add_flag("--prefixes", rep.prefixes, "one row per monitoring window prefix");

    FitArgs fit;
    auto* c_fit = app.add_subcommand("fit", "fit the detection classifier");
    add_artifact_options(c_fit, fit.in, false);
    c_fit->add_option("--out", fit.out, "classifier artifact")->required();
    c_fit->add_option("--kind", fit.kind, "logistic or gbdt");

    MonitorArgs mon;
    auto* c_mon = app.add_subcommand("monitor", "stream sets window by window and report decisions");
    add_artifact_options(c_mon, mon.in, true);
    c_mon->add_option("--out", mon.out, "JSON lines output")->required();
    c_mon->add_option("--set", mon.set, "only this set id");
    c_mon->add_option("--delay-start", mon.delay, "fraction of T observed before decisions");

    EvaluateArgs ev;
    auto* c_ev = app.add_subcommand("evaluate", "k-fold evaluation of the full pipeline");
    c_ev->add_option("--series", ev.series, "series CSV")->required();
    c_ev->add_option("--labels", ev.labels, "labels CSV")->required();
    c_ev->add_option("--out", ev.out, "metrics JSON")->required();
    c_ev->add_option("--folds", ev.folds, "number of folds");
    c_ev->add_option("--prune", ev.prune, "fractions of deteriorating training sets to remove")->delimiter(',');
    c_ev->add_option("--delay-start", ev.delay, "fractions of T observed before decisions")->delimiter(',');
    c_ev->add_flag("--shuffled-control", ev.control, "also fit on shuffled training labels");

    TraceArgs trc;
    auto* c_trc = app.add_subcommand("trace", "per-window case inspection for one set");
    add_artifact_options(c_trc, trc.in, true);
    c_trc->add_option("--set", trc.set, "set id")->required();
    c_trc->add_option("--out", trc.out, "JSON lines output")->required();
    c_trc->add_option("--top", trc.top, "strength edges per window")->capture_default_str();
    c_trc->add_option("--strengths-csv", trc.strengths_csv, "also write the strength table");
    c_trc->add_option("--contexts", trc.walks, "also write sampled walks and correlation paths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    log::set_level(g.quiet ? log::Level::quiet : g.verbose ? log::Level::info : log::Level::warn);
    try {
        if (*c_synth) cmd_synth(g, synth);
        else if (*c_shp) {
            if (shp.imports.empty() && shp.series.empty()) throw ConfigError("shapelets needs --series or --import");
            cmd_shapelets(g, shp);
        } else if (*c_bks) cmd_build_ks(g, bks);
        else if (*c_tr) cmd_train(g, tr);
        else if (*c_rep) cmd_represent(g, rep);
        else if (*c_fit) cmd_fit(g, fit);
        else if (*c_mon) cmd_monitor(g, mon);
        else if (*c_ev) cmd_evaluate(g, ev);
        else if (*c_trc) cmd_trace(g, trc);
    } catch (const ArtifactError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

}  // namespace cand::cli
