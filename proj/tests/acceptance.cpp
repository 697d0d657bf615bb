// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "cand/complex_score.hpp"
#include "cand/config.hpp"
#include "cand/context.hpp"
#include "cand/distance.hpp"
#include "cand/evaluate.hpp"
#include "cand/losses.hpp"
#include "cand/metrics.hpp"
#include "cand/model_io.hpp"
#include "cand/pipeline.hpp"
#include "cand/strength.hpp"
#include "cand/synth.hpp"
#include "oracles.hpp"

using namespace cand;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  %-28s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

std::vector<double> normal_vector(std::size_t n, std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> d(0.0, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

// ---- gradients ----------------------------------------------------------------

// Flat layout: (1 + negatives) triplets x (head, relation, tail) x width.
using VectorLossFn = std::function<VectorLoss(const TripletVectors&, std::span<const TripletVectors>)>;

double triplet_gradient_error(const VectorLossFn& fn, std::size_t width, std::size_t negatives, std::mt19937_64& rng) {
    const std::size_t block = 3 * width;
    const auto x0 = normal_vector((1 + negatives) * block, rng, 0.5);
    auto views = [&](const std::vector<double>& x) {
        std::vector<TripletVectors> t;
        for (std::size_t k = 0; k <= negatives; ++k) {
            const double* p = x.data() + k * block;
            t.push_back({{p, width}, {p + width, width}, {p + 2 * width, width}});
        }
        return t;
    };
    const auto t0 = views(x0);
    const auto loss = fn(t0[0], std::span<const TripletVectors>(t0).subspan(1));
    std::vector<double> analytic;
    auto append = [&](const TripletGradient& g) {
        for (const auto* v : {&g.head, &g.relation, &g.tail}) analytic.insert(analytic.end(), v->begin(), v->end());
    };
    append(loss.positive);
    for (const auto& g : loss.negatives) append(g);
    const auto numeric = oracle::numeric_gradient(
        [&](const std::vector<double>& x) {
            const auto t = views(x);
            return fn(t[0], std::span<const TripletVectors>(t).subspan(1)).loss;
        },
        x0);
    return oracle::relative_error(analytic, numeric);
}

void gradient_suite() {
    const auto start = Clock::now();
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t points = 100;

    double bpr_max = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
        const std::size_t pairs = 2 + rng() % 5, types = 3 + rng() % 7, dim = 2 + rng() % 4;
        const auto base = MFParams::random(pairs, types, dim, rng());
        RankSet ranks(pairs);
        for (auto& list : ranks)
            for (std::size_t r = 0, n = rng() % 6; r < n; ++r) {
                const int a = static_cast<int>(rng() % types), b = static_cast<int>(rng() % types);
                if (a != b) list.push_back({a, b});
            }
        const double lambda = 0.01 * u(rng);
        const auto g = bpr_gradient(base, ranks, lambda);
        std::vector<double> x = base.pairs, analytic = g.pairs;
        x.insert(x.end(), base.types.begin(), base.types.end());
        analytic.insert(analytic.end(), g.types.begin(), g.types.end());
        const auto numeric = oracle::numeric_gradient(
            [&](const std::vector<double>& v) {
                MFParams p = base;
                std::copy(v.begin(), v.begin() + static_cast<long>(p.pairs.size()), p.pairs.begin());
                std::copy(v.begin() + static_cast<long>(p.pairs.size()), v.end(), p.types.begin());
                return bpr_loss(p, ranks, lambda);
            },
            x, 1e-5);
        bpr_max = std::max(bpr_max, oracle::relative_error(analytic, numeric));
    }

    double triplet_max = 0.0, adversarial_max = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
        const std::size_t width = 2 * (2 + rng() % 4), negatives = 1 + rng() % 5;
        const double margin = dynamic_margin(1.0 + 5.0 * u(rng), u(rng), 0.5 * u(rng));
        triplet_max = std::max(triplet_max, triplet_gradient_error(
                                                [&](const TripletVectors& p, std::span<const TripletVectors> n) {
                                                    return sigmoid_triplet_loss(p, n, margin);
                                                },
                                                width, negatives, rng));
        const double temperature = 0.2 + 1.8 * u(rng);
        adversarial_max = std::max(adversarial_max, triplet_gradient_error(
                                                        [&](const TripletVectors& p, std::span<const TripletVectors> n) {
                                                            return self_adversarial_loss(p, n, margin, temperature);
                                                        },
                                                        width, negatives, rng));
    }
    const double elapsed = seconds_since(start);
    const bool ok = bpr_max < 1e-4 && triplet_max < 1e-4 && adversarial_max < 1e-4 && elapsed < 30.0;
    report("gradient suite", ok,
           fmt("max rel err bpr %.2e, triplet %.2e, self-adversarial %.2e over %zu points each; %.1f s", bpr_max,
               triplet_max, adversarial_max, points, elapsed));
}

// ---- normalization and symmetry ------------------------------------------------

struct ToyDomain {
    DomainKS ks;
    TransitionStats stats;
};

ToyDomain bias_graph() {
    ToyDomain t;
    const std::vector<std::tuple<int, int, double>> edges{{0, 1, 0.6}, {0, 2, 0.4},  {1, 0, 0.2}, {1, 2, 0.3},
                                                          {1, 3, 0.25}, {1, 4, 0.25}, {2, 5, 1.0}, {3, 5, 1.0}};
    std::set<int> ids;
    for (const auto& [a, b, w] : edges) {
        t.ks.triplets[{a, 0, b}] = 1;
        t.stats.rows[a][b] = w;
        ids.insert(a);
        ids.insert(b);
    }
    t.ks.concepts.assign(ids.begin(), ids.end());
    return t;
}

void normalization_suite() {
    // strength rows
    double strength_dev = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto params = MFParams::random(12, 15, 6, seed);
        std::vector<int> corr(12);
        for (std::size_t i = 0; i < corr.size(); ++i) corr[i] = static_cast<int>(i % 5);
        for (auto scope : {StrengthScope::all, StrengthScope::per_correlation})
            for (const auto& row : compute_strengths(params, corr, 5, scope).rows)
                strength_dev = std::max(strength_dev, std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0));
    }

    // correlation scores are symmetric because correlation vectors are real
    EmbeddingStore store(16, {std::vector<int>{0, 1, 2, 3, 4}, std::vector<int>{0, 1, 2, 3}}, {4, 4}, 5);
    store.initialize_uniform(3);
    store.zero_correlation_imaginary();
    double asym = 0.0;
    for (int a = 0; a < 5; ++a)
        for (int c = 0; c < 5; ++c)
            for (int c2 = 0; c2 < 4; ++c2) {
                const auto h = store.vector(store.concept_slot(0, c)), t = store.vector(store.concept_slot(1, c2));
                const auto r = store.vector(store.correlation_slot(a));
                asym = std::max(asym, std::abs(complex_score(h, r, t) - complex_score(t, r, h)));
            }

    // guided-walk step distribution
    const auto g = bias_graph();
    const GuidedExplorer ex(g.ks, g.stats, {1, 4}, 4.0);
    double sum_dev = 0.0;
    for (int x : g.ks.concepts) {
        std::vector<std::optional<int>> previous{std::nullopt};
        for (int p : g.ks.concepts)
            if (g.stats.probability(p, x) > 0.0) previous.push_back(p);
        for (const auto& prev : previous) {
            const auto w = ex.weights(x, prev);
            if (w.empty()) continue;
            double z = 0.0;
            for (const auto& [y, v] : w) z += v;
            double total = 0.0;
            for (const auto& [y, v] : w) total += v / z;
            sum_dev = std::max(sum_dev, std::abs(total - 1.0));
        }
    }
    const std::size_t samples = 100000;
    const auto walks = ex.sample(0, samples, 2, std::uint64_t{17});
    std::map<int, double> first, second;
    double n_second = 0.0, recorded_dev = 0.0;
    auto normalized = [&](int x, std::optional<int> prev) {
        std::map<int, double> p;
        double z = 0.0;
        for (const auto& [y, v] : ex.weights(x, prev)) z += v;
        for (const auto& [y, v] : ex.weights(x, prev)) p[y] = v / z;
        return p;
    };
    const auto p_first = normalized(0, std::nullopt), p_second = normalized(1, 0);
    for (const auto& w : walks) {
        first[w.steps[0].concept_id] += 1.0;
        recorded_dev = std::max(recorded_dev, std::abs(w.steps[0].probability - p_first.at(w.steps[0].concept_id)));
        if (w.steps[0].concept_id == 1 && w.steps.size() > 1) {
            second[w.steps[1].concept_id] += 1.0;
            n_second += 1.0;
        }
    }
    double freq_dev = 0.0;
    for (const auto& [y, p] : p_first) freq_dev = std::max(freq_dev, std::abs(first[y] / samples - p));
    for (const auto& [y, p] : p_second) freq_dev = std::max(freq_dev, std::abs(second[y] / n_second - p));

    const bool ok = strength_dev <= 1e-9 && asym <= 1e-12 && sum_dev <= 1e-9 && recorded_dev <= 1e-9 && freq_dev <= 0.01;
    report("normalization/symmetry", ok,
           fmt("strength row dev %.1e, score asymmetry %.1e, walk sum dev %.1e, max freq dev %.4f (100k walks)",
               strength_dev, asym, sum_dev, freq_dev));
}

// ---- oracle equivalence -----------------------------------------------------------

Assignment at(int concept_id, int minute) { return {concept_id, static_cast<std::size_t>(minute / 15), minute, 1.0}; }

void oracle_suite() {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::size_t dtw_cases = 0, dtw_bad = 0;
    for (std::size_t n = 1; n <= 8; ++n)
        for (std::size_t m = 1; m <= 8; ++m)
            for (int rep = 0; rep < 3; ++rep) {
                std::vector<double> a(n), b(m);
                for (auto& v : a) v = u(rng);
                for (auto& v : b) v = u(rng);
                const double got = dtw_distance(a, b), want = oracle::dtw(a, b);
                ++dtw_cases;
                dtw_bad += std::abs(got - want) > 1e-12 * std::max(1.0, want);
            }

    std::size_t ks_cases = 0, ks_bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n_concepts = 2 + static_cast<int>(rng() % 9);
        SetAssignments sets(1 + rng() % 5);
        for (auto& s : sets) {
            for (std::size_t w = 0, windows = 2 + rng() % 12; w < windows; ++w)
                for (std::size_t k = 0, n = rng() % 3; k < n; ++k)
                    s.push_back(at(static_cast<int>(rng() % n_concepts), static_cast<int>(w * 15)));
            std::sort(s.begin(), s.end(), [](const Assignment& a, const Assignment& b) {
                return std::tie(a.start_minute, a.concept_id) < std::tie(b.start_minute, b.concept_id);
            });
            s.erase(std::unique(s.begin(), s.end()), s.end());
        }
        std::vector<int> concepts(n_concepts);
        std::iota(concepts.begin(), concepts.end(), 0);
        ++ks_cases;
        ks_bad += build_domain_ks("X1", sets).triplets != oracle::domain_triplets(sets, concepts, {0, 30, 60, 90});
    }

    std::size_t path_cases = 0, path_bad = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int n0 = 2 + static_cast<int>(rng() % 4), n1 = 2 + static_cast<int>(rng() % 4);
        PairLikelihoods l;
        for (int a = 0; a < n0; ++a)
            for (int b = 0; b < n1; ++b)
                if (rng() % 3 != 0) l[{a, b}] = 0.1 + static_cast<double>(rng() % 9) / 10.0;
        if (l.empty()) continue;
        const auto cross = build_cross_ks(l, 5);
        const CrossGraph graph(cross);
        for (const auto& t : cross.triplets) {
            const CrossNode from{0, t.head}, to{1, t.tail};
            const std::size_t max_len = 2 + rng() % 8;
            std::vector<std::vector<CrossNode>> seqs;
            bool labels_ok = true;
            for (const auto& p : enumerate_correlation_paths(graph, from, to, max_len)) {
                seqs.push_back(p.nodes);
                for (std::size_t k = 0; k < p.correlations.size(); ++k)
                    labels_ok = labels_ok && cross.correlation_between({p.nodes[k].channel, p.nodes[k].id},
                                                                         {p.nodes[k + 1].channel, p.nodes[k + 1].id}) ==
                                               p.correlations[k];
            }
            std::sort(seqs.begin(), seqs.end());
            ++path_cases;
            path_bad += !labels_ok || seqs != oracle::simple_paths(cross, from, to, max_len);
        }
    }

    std::size_t auc_cases = 0, auc_bad = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 99;
        std::vector<double> s(n);
        std::vector<int> l(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = trial % 2 ? static_cast<double>(rng() % 10) : u(rng);
            l[i] = static_cast<int>(rng() % 2);
        }
        l[0] = 1;
        l[1] = 0;
        ++auc_cases;
        auc_bad += std::abs(auc(s, l) - oracle::pairwise_auc(s, l)) > 1e-12;
    }
    const bool ok = dtw_bad == 0 && ks_bad == 0 && path_bad == 0 && auc_bad == 0;
    report("oracle equivalence", ok,
           fmt("mismatches: dtw %zu/%zu, domain KS %zu/%zu, paths %zu/%zu, auc %zu/%zu", dtw_bad, dtw_cases, ks_bad,
               ks_cases, path_bad, path_cases, auc_bad, auc_cases));
}

// ---- BPR recovery --------------------------------------------------------------------

void bpr_recovery() {
    const auto start = Clock::now();
    const std::size_t pairs = 20, types = 15;
    std::mt19937_64 rng(303);
    RankSet ranks(pairs);
    for (auto& list : ranks) {
        std::vector<int> order(types);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i = 0; i < types; ++i)
            for (std::size_t j = i + 1; j < types; ++j) list.push_back({order[i], order[j]});
    }
    auto params = MFParams::random(pairs, types, 16, 4);
    std::mt19937_64 shuffle(5);
    for (int pass = 0; pass < 500; ++pass) bpr_update(params, ranks, 0.05, 0.001, shuffle);
    std::size_t right = 0, total = 0;
    for (std::size_t u = 0; u < pairs; ++u)
        for (const auto& r : ranks[u]) {
            ++total;
            right += params.logit(u, static_cast<std::size_t>(r.better)) > params.logit(u, static_cast<std::size_t>(r.worse));
        }
    const double accuracy = static_cast<double>(right) / static_cast<double>(total);
    const double elapsed = seconds_since(start);
    report("BPR recovery", accuracy >= 0.95 && elapsed < 60.0,
           fmt("pairwise accuracy %.4f after 500 passes (%zu pairs x %zu types); %.1f s", accuracy, pairs, types, elapsed));
}

// ---- end to end ------------------------------------------------------------------------

PipelineConfig end_to_end_config(std::size_t threads) {
    auto c = desk_preset();
    c.evaluation.folds = 3;
    c.evaluation.prune = {0.0, 0.5};
    c.evaluation.delay_starts = {0.0, 0.5};
    c.evaluation.shuffled_control = true;
    c.threads = threads;
    return c;
}

void end_to_end(const Dataset& data, const EvaluationResult& result, double elapsed) {
    const auto* main = result.find(0.0, 0.0, false);
    const auto* control = result.find(0.0, 0.0, true);
    if (!main || !control) {
        report("end-to-end desk run", false, "missing runs in the evaluation result");
        return;
    }
    const auto& m = main->mean;
    double positives = 0.0;
    for (const auto& s : data) positives += s.label == Label::deteriorating;
    const double prevalence = positives / static_cast<double>(data.size());
    const bool ok = m.f1 >= 0.80 && m.recall >= 0.85 && m.earliness >= 0.30 && control->mean.f1 <= 0.60 &&
                    elapsed < 600.0;
    report("end-to-end desk run", ok,
           fmt("F1 %.3f, recall %.3f, earliness %.3f, control F1 %.3f (always-alarm F1 %.3f); %.0f s", m.f1, m.recall,
               m.earliness, control->mean.f1, 2.0 * prevalence / (1.0 + prevalence), elapsed));

    const auto* pruned = result.find(0.5, 0.0, false);
    if (pruned)
        report("pruning robustness", m.f1 - pruned->mean.f1 <= 0.15,
               fmt("F1 %.3f at 0%% pruning, %.3f at 50%%; drop %.3f", m.f1, pruned->mean.f1, m.f1 - pruned->mean.f1));
    else
        report("pruning robustness", false, "missing pruned run");

    const auto* delayed = result.find(0.0, 0.5, false);
    if (delayed) {
        const auto& d = delayed->mean;
        report("delayed start", d.accuracy >= m.accuracy && d.auc >= m.auc && d.earliness < m.earliness,
               fmt("accuracy %.3f -> %.3f, AUC %.3f -> %.3f, earliness %.3f -> %.3f", m.accuracy, d.accuracy, m.auc,
                   d.auc, m.earliness, d.earliness));
    } else {
        report("delayed start", false, "missing delayed run");
    }
}

std::string model_bytes(const TrainedModel& model) {
    std::ostringstream out(std::ios::binary);
    write_model_binary(out, model);
    return out.str();
}

void determinism(const Dataset& data, const EvaluationResult& first) {
    const auto config = end_to_end_config(4);
    const auto a = fit_pipeline(data, config, config.seed);
    const auto b = fit_pipeline(data, config, config.seed);
    const bool model_json = to_json(a.model).dump() == to_json(b.model).dump();
    const bool model_bin = model_bytes(a.model) == model_bytes(b.model);
    const bool classifier = classifier_artifact(*a.classifier).dump() == classifier_artifact(*b.classifier).dump();
    // the second report run uses one thread: results may not depend on scheduling
    const auto again = evaluate(data, end_to_end_config(1));
    const bool reports = to_json(first).dump() == to_json(again).dump();
    report("determinism", model_json && model_bin && classifier && reports,
           fmt("model json %s, model binary %s, classifier %s, report (4 vs 1 threads) %s", model_json ? "equal" : "DIFFER",
               model_bin ? "equal" : "DIFFER", classifier ? "equal" : "DIFFER", reports ? "equal" : "DIFFER"));
}

void spot_values() {
    const bool e = earliness(480, 60) == 0.875;
    const bool d = dynamic_margin(4.0, 0.0, 0.1) == 4.0 * std::exp(-0.1);
    const bool c = composite(0.6839, 0.4308) == 0.55735;
    const bool a = apache_level(7) == 2;
    report("formula spot values", e && d && c && a,
           fmt("earliness(480,60)=%.17g, dynamic_margin(4,0,0.1)=%.17g, composite(0.6839,0.4308)=%.17g, apache_level(7)=%d",
               earliness(480, 60), dynamic_margin(4.0, 0.0, 0.1), composite(0.6839, 0.4308), apache_level(7)));
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
    try {
        spot_values();
        gradient_suite();
        normalization_suite();
        oracle_suite();
        bpr_recovery();
        if (!quick) {
            const auto config = end_to_end_config(4);
            const auto data = generate(config.synth).dataset;
            const auto start = Clock::now();
            const auto result = evaluate(data, config);
            end_to_end(data, result, seconds_since(start));
            determinism(data, result);
        }
    } catch (const std::exception& e) {
        report("acceptance run", false, std::string("aborted: ") + e.what());
    }
    std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "OK", failures);
    return failures ? 1 : 0;
}
