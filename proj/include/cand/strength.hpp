#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace cand {

enum class View { origin = 0, concept_context = 1, correlation = 2 };

inline constexpr std::size_t kViewCount = 3;

std::string_view to_string(View view);

/// One (correlation, view) combination. Index layout: correlation * 3 + view.
struct AmbiguityType {
    int correlation = 0;
    View view = View::origin;

    int index() const { return correlation * static_cast<int>(kViewCount) + static_cast<int>(view); }
    static AmbiguityType from_index(int index);
};

/// sigmoid of the origin, concept-view and correlation-view scores.
std::array<double, kViewCount> view_plausibilities(double f_origin, double f_concept, double f_correlation);

/// Ambiguity-type indices with better ranked above worse.
struct PartialRank {
    int better = 0;
    int worse = 0;

    friend bool operator==(const PartialRank&, const PartialRank&) = default;
};

/// (i, j) is included iff plausibility[i] - plausibility[j] > kappa.
std::vector<PartialRank> derive_partial_ranks(std::span<const double> plausibility, std::span<const int> types,
                                              double kappa);

/// Ranks among the three views of one correlation.
std::vector<PartialRank> derive_partial_ranks(const std::array<double, kViewCount>& plausibility, int correlation,
                                              double kappa);

/// Partial ranks per cross pair.
using RankSet = std::vector<std::vector<PartialRank>>;

/// Matrix-factorization latent vectors: one per cross pair, one per
/// ambiguity type.
struct MFParams {
    std::size_t dim = 0;
    std::size_t pair_count = 0;
    std::size_t type_count = 0;
    std::vector<double> pairs;
    std::vector<double> types;

    static MFParams random(std::size_t pair_count, std::size_t type_count, std::size_t dim, std::uint64_t seed);

    std::span<double> pair(std::size_t i) { return std::span<double>(pairs).subspan(i * dim, dim); }
    std::span<const double> pair(std::size_t i) const { return std::span<const double>(pairs).subspan(i * dim, dim); }
    std::span<double> type(std::size_t i) { return std::span<double>(types).subspan(i * dim, dim); }
    std::span<const double> type(std::size_t i) const { return std::span<const double>(types).subspan(i * dim, dim); }

    /// v_pair . v_type
    double logit(std::size_t pair_index, std::size_t type_index) const;

    friend bool operator==(const MFParams&, const MFParams&) = default;
};

/// sum -ln s(v_i - v_j) + lambda * ||theta||^2.
double bpr_loss(const MFParams& params, const RankSet& ranks, double lambda);

/// Full-batch gradient of bpr_loss, laid out like `params`.
MFParams bpr_gradient(const MFParams& params, const RankSet& ranks, double lambda);

/// One stochastic pass over all ranks in seeded shuffled order. Each sample
/// applies its log-sigmoid gradient plus the L2 term of the vectors it
/// touches. Returns bpr_loss evaluated before the pass.
double bpr_update(MFParams& params, const RankSet& ranks, double learning_rate, double lambda,
                  std::mt19937_64& rng);

enum class StrengthScope { all, per_correlation };

/// Softmax-normalized strengths per cross pair. With scope `all` a row spans
/// every ambiguity type; with `per_correlation` it spans the three views of
/// the pair's own correlation.
struct StrengthTable {
    std::size_t correlation_count = 0;
    StrengthScope scope = StrengthScope::all;
    std::vector<int> pair_correlation;
    std::vector<std::vector<double>> rows;

    double strength(std::size_t pair_index, AmbiguityType type) const;
};

StrengthTable compute_strengths(const MFParams& params, std::span<const int> pair_correlation,
                                std::size_t correlation_count, StrengthScope scope = StrengthScope::all);

}  // namespace cand
