#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "cand/context.hpp"
#include "cand/embedding_store.hpp"
#include "cand/error.hpp"
#include "cand/knowledge.hpp"
#include "cand/strength.hpp"

namespace cand {

struct TrainConfig {
    double margin = 4.0;                  // gamma
    double margin_scale = 0.1;            // xi
    double context_weight = 1.0;          // lambda_c
    double cross_balance = 0.5;           // epsilon
    double learning_rate = 1e-3;          // eta
    std::size_t negatives = 10;
    double adversarial_temperature = 1.0; // alpha
    std::size_t epochs = 500;
    std::size_t dim = 256;
    std::size_t walk_length = 7;          // L
    std::size_t walks_per_concept = 20;   // N
    double exploration_bias = 4.0;        // phi
    std::size_t max_path_length = 7;      // L'
    std::size_t max_paths_per_pair = 512;
    std::size_t mf_dim = 32;
    double rank_threshold = 0.05;         // kappa, on the sigmoid scale
    double mf_learning_rate = 0.05;
    double mf_regularization = 0.01;      // lambda_theta
    StrengthScope strength_scope = StrengthScope::all;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t seed = 1;
};

/// Throws ConfigError on out-of-range values.
void validate(const TrainConfig& config);

/// Adam with bias-corrected moments; the learning rate is supplied per step.
class Adam {
public:
    Adam() = default;
    Adam(std::size_t size, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

    void step(std::span<double> params, std::span<const double> grad, double learning_rate);
    std::size_t steps() const { return t_; }

private:
    double beta1_ = 0.9, beta2_ = 0.999, epsilon_ = 1e-8;
    std::size_t t_ = 0;
    std::vector<double> m_, v_;
};

/// Store shaped for a knowledge bundle: every domain concept of both
/// channels, each channel's relations, and every correlation type.
EmbeddingStore make_store(const KnowledgeBundle& bundle, std::size_t dim);

/// Static context of the cross triplets: walks are sampled once, paths
/// enumerated once.
struct TrainingContexts {
    std::map<CrossNode, std::vector<Walk>> walks;
    std::map<CrossNode, Mixture> concept_mixtures;       // empty when no walk moved
    std::vector<std::vector<CorrelationPath>> paths;     // per cross triplet
};

TrainingContexts prepare_contexts(const KnowledgeBundle& bundle, const EmbeddingStore& store,
                                  const TrainConfig& config);

/// Operands of the three views of one cross triplet for the current epoch.
/// Missing contexts fall back to the plain element.
struct CrossViews {
    Mixture head_context;
    Mixture tail_context;
    Mixture correlation_context;
};

std::vector<CrossViews> current_views(const KnowledgeBundle& bundle, const EmbeddingStore& store,
                                      const TrainingContexts& contexts);

/// Origin, concept-view and correlation-view scores of every cross triplet.
std::vector<std::array<double, kViewCount>> view_scores(const KnowledgeBundle& bundle, const EmbeddingStore& store,
                                                        std::span<const CrossViews> views);

struct LossAndGradient {
    double loss = 0.0;
    std::vector<double> gradient;  // same layout as EmbeddingStore::parameters()
};

/// Averaged origin + contextual sigmoid losses over the cross triplets
/// (excluding the inference term). Negatives are drawn from `rng`.
LossAndGradient cross_loss(const EmbeddingStore& store, const KnowledgeBundle& bundle,
                           std::span<const CrossViews> views, const StrengthTable& strengths,
                           const TrainConfig& config, std::mt19937_64& rng);

/// Sum over both channels of the mean self-adversarial loss over each
/// domain structure's triplets.
LossAndGradient domain_loss(const EmbeddingStore& store, const KnowledgeBundle& bundle, const TrainConfig& config,
                            std::mt19937_64& rng);

struct EpochLog {
    std::size_t epoch = 0;
    double cross_loss = 0.0;   // includes the inference term
    double domain_loss = 0.0;
    double infer_loss = 0.0;
    std::size_t ranks = 0;
};

struct TrainResult {
    EmbeddingStore store;
    MFParams mf;
    StrengthTable strengths;
    std::vector<EpochLog> history;
};

/// Raised when a loss turns non-finite; carries the last finite store.
class DivergenceError : public TrainingError {
public:
    DivergenceError(const std::string& message, EmbeddingStore checkpoint, std::size_t epoch)
        : TrainingError(message), checkpoint_(std::move(checkpoint)), epoch_(epoch) {}

    const EmbeddingStore& checkpoint() const { return checkpoint_; }
    std::size_t epoch() const { return epoch_; }

private:
    EmbeddingStore checkpoint_;
    std::size_t epoch_;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Alternating optimization: per epoch refresh contexts, one BPR pass over
/// freshly derived ranks, recompute strengths, an Adam step on the cross loss
/// at epsilon*eta, then an Adam step on the domain loss at eta.
TrainResult train(const KnowledgeBundle& bundle, const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace cand
