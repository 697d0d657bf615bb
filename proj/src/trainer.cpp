#include "cand/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "cand/complex_score.hpp"
#include "cand/log.hpp"
#include "cand/losses.hpp"
#include "cand/random.hpp"

namespace cand {

void validate(const TrainConfig& c) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(what);
    };
    require(c.margin > 0.0, "margin (gamma) must be positive");
    require(c.margin_scale >= 0.0, "margin scale (xi) must be non-negative");
    require(c.context_weight >= 0.0 && c.context_weight <= 1.0, "context weight (lambda_c) must lie in [0,1]");
    require(c.cross_balance > 0.0, "cross balance (epsilon) must be positive");
    require(c.learning_rate > 0.0, "learning rate must be positive");
    require(c.negatives >= 1, "at least one negative per positive is required");
    require(c.dim >= 1, "embedding dimension must be positive");
    require(c.exploration_bias > 1.0, "exploration bias (phi) must exceed 1");
    require(c.max_path_length >= 2, "maximum correlation path length must be at least 2");
    require(c.walks_per_concept >= 1, "walks per concept must be at least 1");
    require(c.mf_dim >= 1, "MF dimension must be positive");
    require(c.rank_threshold >= 0.0, "rank threshold (kappa) must be non-negative");
    require(c.mf_learning_rate > 0.0, "MF learning rate must be positive");
    require(c.mf_regularization >= 0.0, "MF regularization must be non-negative");
}

Adam::Adam(std::size_t size, double beta1, double beta2, double epsilon)
    : beta1_(beta1), beta2_(beta2), epsilon_(epsilon), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad, double learning_rate) {
    if (params.size() != m_.size() || grad.size() != m_.size()) throw InvalidArgument("Adam::step: size mismatch");
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        params[i] -= learning_rate * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + epsilon_);
    }
}

EmbeddingStore make_store(const KnowledgeBundle& bundle, std::size_t dim) {
    std::array<std::vector<int>, 2> concepts;
    for (std::size_t c = 0; c < 2; ++c) {
        std::set<int> ids(bundle.domains[c].concepts.begin(), bundle.domains[c].concepts.end());
        const auto& cross = c == 0 ? bundle.cross.head_concepts : bundle.cross.tail_concepts;
        ids.insert(cross.begin(), cross.end());
        concepts[c].assign(ids.begin(), ids.end());
    }
    return EmbeddingStore(dim, std::move(concepts),
                          {bundle.domains[0].relations.size(), bundle.domains[1].relations.size()},
                          bundle.cross.n_types());
}

TrainingContexts prepare_contexts(const KnowledgeBundle& bundle, const EmbeddingStore& store,
                                  const TrainConfig& config) {
    TrainingContexts ctx;
    for (std::size_t c = 0; c < 2; ++c) {
        const auto& members = c == 0 ? bundle.cross.head_concepts : bundle.cross.tail_concepts;
        const GuidedExplorer explorer(bundle.domains[c], bundle.transitions[c], members, config.exploration_bias);
        for (int id : members) {
            const CrossNode node{c, id};
            if (!bundle.domains[c].has_concept(id)) continue;
            auto walks = explorer.sample(id, config.walks_per_concept, config.walk_length,
                                         derive_seed(config.seed, {2, c, static_cast<std::uint64_t>(id)}));
            ctx.concept_mixtures[node] = metapath_mixture(walks, store, c);
            ctx.walks[node] = std::move(walks);
        }
    }
    const CrossGraph graph(bundle.cross);
    for (const auto& t : bundle.cross.triplets)
        ctx.paths.push_back(enumerate_correlation_paths(graph, {0, t.head}, {1, t.tail}, config.max_path_length,
                                                        config.max_paths_per_pair));
    return ctx;
}

std::vector<CrossViews> current_views(const KnowledgeBundle& bundle, const EmbeddingStore& store,
                                      const TrainingContexts& contexts) {
    const auto& cross = bundle.cross;
    // Hop scores are fixed within an epoch; cache one per cross triplet.
    std::vector<double> edge_score(cross.triplets.size());
    for (std::size_t u = 0; u < cross.triplets.size(); ++u) {
        const auto& t = cross.triplets[u];
        edge_score[u] = complex_score(store.vector(store.concept_slot(0, t.head)),
                                      store.vector(store.correlation_slot(t.correlation)),
                                      store.vector(store.concept_slot(1, t.tail)));
    }
    const EdgeScorer scorer = [&](const CrossNode& a, int, const CrossNode& b) {
        const auto& head = a.channel == 0 ? a : b;
        const auto& tail = a.channel == 0 ? b : a;
        return edge_score[*cross.index_of(head.id, tail.id)];
    };

    auto concept_view = [&](const CrossNode& node) {
        auto it = contexts.concept_mixtures.find(node);
        if (it == contexts.concept_mixtures.end() || it->second.empty())
            return Mixture::single(store.concept_slot(node.channel, node.id));
        return it->second;
    };

    std::vector<CrossViews> views;
    views.reserve(cross.triplets.size());
    for (std::size_t u = 0; u < cross.triplets.size(); ++u) {
        const auto& t = cross.triplets[u];
        CrossViews v{concept_view({0, t.head}), concept_view({1, t.tail}), {}};
        if (u < contexts.paths.size() && !contexts.paths[u].empty())
            v.correlation_context = depth_aware_mixture(contexts.paths[u], store, scorer);
        if (v.correlation_context.empty()) v.correlation_context = Mixture::single(store.correlation_slot(t.correlation));
        views.push_back(std::move(v));
    }
    return views;
}

std::vector<std::array<double, kViewCount>> view_scores(const KnowledgeBundle& bundle, const EmbeddingStore& store,
                                                        std::span<const CrossViews> views) {
    std::vector<std::array<double, kViewCount>> out;
    for (std::size_t u = 0; u < bundle.cross.triplets.size(); ++u) {
        const auto& t = bundle.cross.triplets[u];
        const auto h = store.vector(store.concept_slot(0, t.head));
        const auto r = store.vector(store.correlation_slot(t.correlation));
        const auto tl = store.vector(store.concept_slot(1, t.tail));
        out.push_back({complex_score(h, r, tl),
                       complex_score(evaluate(views[u].head_context, store), r, evaluate(views[u].tail_context, store)),
                       complex_score(h, evaluate(views[u].correlation_context, store), tl)});
    }
    return out;
}

namespace {

/// Accumulates weight * L(triplet) with `negatives` corruptions drawn from the
/// candidate lists; the corrupted slot always takes a plain concept vector.
/// Returns the unweighted loss.
template <typename ScalarLoss>
double accumulate_triplet(const EmbeddingStore& store, const Mixture& head, const Mixture& relation,
                          const Mixture& tail, std::size_t head_channel, std::span<const int> head_candidates,
                          std::size_t tail_channel, std::span<const int> tail_candidates, std::size_t negatives,
                          double weight, ScalarLoss&& scalar, std::mt19937_64& rng, std::span<double> grad) {
    const std::size_t w = store.width();
    const ComplexVector h = evaluate(head, store);
    const ComplexVector r = evaluate(relation, store);
    const ComplexVector t = evaluate(tail, store);

    struct Negative {
        bool head_corrupted;
        std::size_t slot;
    };
    std::bernoulli_distribution coin(0.5);
    std::vector<Negative> negs;
    std::vector<double> f_neg;
    for (std::size_t i = 0; i < negatives; ++i) {
        bool corrupt_head = coin(rng);
        if (corrupt_head && head_candidates.empty()) corrupt_head = false;
        if (!corrupt_head && tail_candidates.empty()) corrupt_head = true;
        const auto& pool = corrupt_head ? head_candidates : tail_candidates;
        const int id = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
        const std::size_t slot = store.concept_slot(corrupt_head ? head_channel : tail_channel, id);
        negs.push_back({corrupt_head, slot});
        f_neg.push_back(corrupt_head ? complex_score(store.vector(slot), r, t) : complex_score(h, r, store.vector(slot)));
    }

    const ScoreLoss s = scalar(complex_score(h, r, t), f_neg);
    ComplexVector gh(w, 0.0), gr(w, 0.0), gt(w, 0.0);
    accumulate_score_gradient(h, r, t, weight * s.d_positive, gh, gr, gt);
    for (std::size_t i = 0; i < negs.size(); ++i) {
        auto gslot = grad.subspan(negs[i].slot * w, w);
        const double coeff = weight * s.d_negatives[i];
        if (negs[i].head_corrupted)
            accumulate_score_gradient(store.vector(negs[i].slot), r, t, coeff, gslot, gr, gt);
        else
            accumulate_score_gradient(h, r, store.vector(negs[i].slot), coeff, gh, gr, gslot);
    }
    scatter_gradient(head, gh, grad, w);
    scatter_gradient(relation, gr, grad, w);
    scatter_gradient(tail, gt, grad, w);
    return s.loss;
}

}  // namespace

LossAndGradient cross_loss(const EmbeddingStore& store, const KnowledgeBundle& bundle,
                           std::span<const CrossViews> views, const StrengthTable& strengths,
                           const TrainConfig& config, std::mt19937_64& rng) {
    LossAndGradient out{0.0, std::vector<double>(store.parameters().size(), 0.0)};
    const auto& cross = bundle.cross;
    if (cross.triplets.empty()) return out;

    const std::vector<int> heads(cross.head_concepts.begin(), cross.head_concepts.end());
    const std::vector<int> tails(cross.tail_concepts.begin(), cross.tail_concepts.end());
    const double per_triplet = 1.0 / static_cast<double>(cross.triplets.size());
    const double per_context = config.context_weight * 0.5 * per_triplet;

    for (std::size_t u = 0; u < cross.triplets.size(); ++u) {
        const auto& t = cross.triplets[u];
        const Mixture head = Mixture::single(store.concept_slot(0, t.head));
        const Mixture tail = Mixture::single(store.concept_slot(1, t.tail));
        const Mixture corr = Mixture::single(store.correlation_slot(t.correlation));
        auto margin = [&](View view) {
            return dynamic_margin(config.margin, strengths.strength(u, {t.correlation, view}), config.margin_scale);
        };
        auto loss_with = [](double m) {
            return [m](double fp, std::span<const double> fn) { return sigmoid_triplet_loss(fp, fn, m); };
        };

        const double origin = accumulate_triplet(store, head, corr, tail, 0, heads, 1, tails, config.negatives,
                                                 per_triplet, loss_with(margin(View::origin)), rng, out.gradient);
        double contextual = 0.0;
        if (config.context_weight > 0.0) {
            contextual += accumulate_triplet(store, views[u].head_context, corr, views[u].tail_context, 0, heads, 1,
                                             tails, config.negatives, per_context, loss_with(margin(View::concept_context)),
                                             rng, out.gradient);
            contextual += accumulate_triplet(store, head, views[u].correlation_context, tail, 0, heads, 1, tails,
                                             config.negatives, per_context, loss_with(margin(View::correlation)),
                                             rng, out.gradient);
        }
        out.loss += per_triplet * origin + per_context * contextual;
    }
    return out;
}

LossAndGradient domain_loss(const EmbeddingStore& store, const KnowledgeBundle& bundle, const TrainConfig& config,
                            std::mt19937_64& rng) {
    LossAndGradient out{0.0, std::vector<double>(store.parameters().size(), 0.0)};
    for (std::size_t c = 0; c < 2; ++c) {
        const auto& ks = bundle.domains[c];
        if (ks.triplets.empty()) continue;
        const double weight = 1.0 / static_cast<double>(ks.triplets.size());
        auto loss = [&](double fp, std::span<const double> fn) {
            return self_adversarial_loss(fp, fn, config.margin, config.adversarial_temperature);
        };
        for (const auto& [t, count] : ks.triplets) {
            const double l = accumulate_triplet(store, Mixture::single(store.concept_slot(c, t.head)),
                                                Mixture::single(store.relation_slot(c, t.relation)),
                                                Mixture::single(store.concept_slot(c, t.tail)), c, ks.concepts, c,
                                                ks.concepts, config.negatives, weight, loss, rng, out.gradient);
            out.loss += weight * l;
        }
    }
    return out;
}

namespace {

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

TrainResult train(const KnowledgeBundle& bundle, const TrainConfig& config, const EpochCallback& on_epoch) {
    validate(config);
    TrainResult result;
    result.store = make_store(bundle, config.dim);
    result.store.initialize_uniform(derive_seed(config.seed, {1}));
    auto& store = result.store;

    const TrainingContexts contexts = prepare_contexts(bundle, store, config);
    const auto& cross = bundle.cross;
    const std::size_t n_types = cross.n_types();
    std::vector<int> pair_correlation;
    for (const auto& t : cross.triplets) pair_correlation.push_back(t.correlation);

    result.mf = MFParams::random(cross.triplets.size(), n_types * kViewCount, config.mf_dim, derive_seed(config.seed, {3}));
    result.strengths = compute_strengths(result.mf, pair_correlation, n_types, config.strength_scope);
    std::mt19937_64 bpr_rng(derive_seed(config.seed, {4}));
    std::mt19937_64 negative_rng(derive_seed(config.seed, {5}));

    const std::size_t n_params = store.parameters().size();
    Adam cross_adam(n_params, config.adam_beta1, config.adam_beta2, config.adam_epsilon);
    Adam domain_adam(n_params, config.adam_beta1, config.adam_beta2, config.adam_epsilon);
    if (cross.triplets.empty()) log::warn("cross structure is empty; the cross loss reduces to the inference term");

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const std::vector<CrossViews> views = current_views(bundle, store, contexts);
        const auto scores = view_scores(bundle, store, views);
        RankSet ranks(cross.triplets.size());
        std::size_t rank_count = 0;
        for (std::size_t u = 0; u < scores.size(); ++u) {
            const auto p = view_plausibilities(scores[u][0], scores[u][1], scores[u][2]);
            ranks[u] = derive_partial_ranks(p, pair_correlation[u], config.rank_threshold);
            rank_count += ranks[u].size();
        }
        const double infer = bpr_update(result.mf, ranks, config.mf_learning_rate, config.mf_regularization, bpr_rng);
        result.strengths = compute_strengths(result.mf, pair_correlation, n_types, config.strength_scope);

        const EmbeddingStore checkpoint = store;
        auto diverged = [&](const char* what) {
            return DivergenceError(std::string(what) + " became non-finite at epoch " + std::to_string(epoch),
                                   checkpoint, epoch);
        };

        LossAndGradient cl;
        try {
            cl = cross_loss(store, bundle, views, result.strengths, config, negative_rng);
        } catch (const TrainingError&) {
            throw diverged("cross loss");
        }
        const double cross_total = cl.loss + infer;
        if (!std::isfinite(cross_total) || !all_finite(cl.gradient)) throw diverged("cross loss");
        if (!cross.triplets.empty()) {
            cross_adam.step(store.parameters(), cl.gradient, config.cross_balance * config.learning_rate);
            store.zero_correlation_imaginary();
        }

        LossAndGradient dl;
        try {
            dl = domain_loss(store, bundle, config, negative_rng);
        } catch (const TrainingError&) {
            throw diverged("domain loss");
        }
        if (!std::isfinite(dl.loss) || !all_finite(dl.gradient)) throw diverged("domain loss");
        domain_adam.step(store.parameters(), dl.gradient, config.learning_rate);
        store.zero_correlation_imaginary();
        if (!all_finite(store.parameters())) throw diverged("embedding");

        const EpochLog entry{epoch, cross_total, dl.loss, infer, rank_count};
        result.history.push_back(entry);
        if (on_epoch) on_epoch(entry);
    }
    return result;
}

}  // namespace cand
