#include "cand/strength.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cand/error.hpp"
#include "cand/losses.hpp"

namespace cand {

std::string_view to_string(View view) {
    switch (view) {
        case View::origin: return "origin";
        case View::concept_context: return "concept";
        case View::correlation: return "correlation";
    }
    return "?";
}

AmbiguityType AmbiguityType::from_index(int index) {
    return {index / static_cast<int>(kViewCount), static_cast<View>(index % static_cast<int>(kViewCount))};
}

std::array<double, kViewCount> view_plausibilities(double f_origin, double f_concept, double f_correlation) {
    return {sigmoid(f_origin), sigmoid(f_concept), sigmoid(f_correlation)};
}

std::vector<PartialRank> derive_partial_ranks(std::span<const double> plausibility, std::span<const int> types,
                                              double kappa) {
    if (plausibility.size() != types.size()) throw InvalidArgument("derive_partial_ranks: size mismatch");
    std::vector<PartialRank> out;
    for (std::size_t i = 0; i < types.size(); ++i)
        for (std::size_t j = 0; j < types.size(); ++j)
            if (i != j && plausibility[i] - plausibility[j] > kappa) out.push_back({types[i], types[j]});
    return out;
}

std::vector<PartialRank> derive_partial_ranks(const std::array<double, kViewCount>& plausibility, int correlation,
                                              double kappa) {
    std::array<int, kViewCount> types{};
    for (std::size_t v = 0; v < kViewCount; ++v) types[v] = AmbiguityType{correlation, static_cast<View>(v)}.index();
    return derive_partial_ranks(plausibility, types, kappa);
}

MFParams MFParams::random(std::size_t pair_count, std::size_t type_count, std::size_t dim, std::uint64_t seed) {
    MFParams p{dim, pair_count, type_count, std::vector<double>(pair_count * dim), std::vector<double>(type_count * dim)};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 0.1);
    for (auto& v : p.pairs) v = dist(rng);
    for (auto& v : p.types) v = dist(rng);
    return p;
}

double MFParams::logit(std::size_t pair_index, std::size_t type_index) const {
    const auto a = pair(pair_index);
    const auto b = type(type_index);
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

namespace {

double squared_norm(const std::vector<double>& v) { return std::inner_product(v.begin(), v.end(), v.begin(), 0.0); }

double rank_margin(const MFParams& p, std::size_t pair, const PartialRank& r) {
    return p.logit(pair, static_cast<std::size_t>(r.better)) - p.logit(pair, static_cast<std::size_t>(r.worse));
}

void check_ranks(const MFParams& p, const RankSet& ranks) {
    if (ranks.size() > p.pair_count) throw InvalidArgument("rank set covers more pairs than the MF parameters");
    for (const auto& list : ranks)
        for (const auto& r : list)
            if (r.better < 0 || r.worse < 0 || static_cast<std::size_t>(r.better) >= p.type_count ||
                static_cast<std::size_t>(r.worse) >= p.type_count)
                throw InvalidArgument("partial rank references an unknown ambiguity type");
}

}  // namespace

double bpr_loss(const MFParams& params, const RankSet& ranks, double lambda) {
    check_ranks(params, ranks);
    double loss = lambda * (squared_norm(params.pairs) + squared_norm(params.types));
    for (std::size_t u = 0; u < ranks.size(); ++u)
        for (const auto& r : ranks[u]) loss -= log_sigmoid(rank_margin(params, u, r));
    return loss;
}

MFParams bpr_gradient(const MFParams& params, const RankSet& ranks, double lambda) {
    check_ranks(params, ranks);
    MFParams g = params;
    for (auto& v : g.pairs) v *= 2.0 * lambda;
    for (auto& v : g.types) v *= 2.0 * lambda;
    for (std::size_t u = 0; u < ranks.size(); ++u) {
        for (const auto& r : ranks[u]) {
            const double coeff = -sigmoid(-rank_margin(params, u, r));
            const auto vu = params.pair(u);
            const auto ti = params.type(static_cast<std::size_t>(r.better));
            const auto tj = params.type(static_cast<std::size_t>(r.worse));
            auto gu = g.pair(u);
            auto gi = g.type(static_cast<std::size_t>(r.better));
            auto gj = g.type(static_cast<std::size_t>(r.worse));
            for (std::size_t k = 0; k < params.dim; ++k) {
                gu[k] += coeff * (ti[k] - tj[k]);
                gi[k] += coeff * vu[k];
                gj[k] -= coeff * vu[k];
            }
        }
    }
    return g;
}

double bpr_update(MFParams& params, const RankSet& ranks, double learning_rate, double lambda,
                  std::mt19937_64& rng) {
    const double loss = bpr_loss(params, ranks, lambda);
    std::vector<std::pair<std::size_t, PartialRank>> samples;
    for (std::size_t u = 0; u < ranks.size(); ++u)
        for (const auto& r : ranks[u]) samples.emplace_back(u, r);
    std::shuffle(samples.begin(), samples.end(), rng);

    std::vector<double> gu(params.dim), gi(params.dim), gj(params.dim);
    for (const auto& [u, r] : samples) {
        const double coeff = -sigmoid(-rank_margin(params, u, r));
        auto vu = params.pair(u);
        auto ti = params.type(static_cast<std::size_t>(r.better));
        auto tj = params.type(static_cast<std::size_t>(r.worse));
        for (std::size_t k = 0; k < params.dim; ++k) {
            gu[k] = coeff * (ti[k] - tj[k]) + 2.0 * lambda * vu[k];
            gi[k] = coeff * vu[k] + 2.0 * lambda * ti[k];
            gj[k] = -coeff * vu[k] + 2.0 * lambda * tj[k];
        }
        for (std::size_t k = 0; k < params.dim; ++k) {
            if (!std::isfinite(gu[k]) || !std::isfinite(gi[k]) || !std::isfinite(gj[k]))
                throw TrainingError("bpr_update: non-finite gradient for pair " + std::to_string(u) + ", types " +
                                    std::to_string(r.better) + " > " + std::to_string(r.worse));
            vu[k] -= learning_rate * gu[k];
            ti[k] -= learning_rate * gi[k];
            tj[k] -= learning_rate * gj[k];
        }
    }
    return loss;
}

double StrengthTable::strength(std::size_t pair_index, AmbiguityType type) const {
    const auto& row = rows.at(pair_index);
    if (scope == StrengthScope::all) return row.at(static_cast<std::size_t>(type.index()));
    if (type.correlation != pair_correlation.at(pair_index))
        throw InvalidArgument("strength: ambiguity type outside the pair's own correlation");
    return row.at(static_cast<std::size_t>(type.view));
}

StrengthTable compute_strengths(const MFParams& params, std::span<const int> pair_correlation,
                                std::size_t correlation_count, StrengthScope scope) {
    if (params.type_count != correlation_count * kViewCount)
        throw InvalidArgument("compute_strengths: MF type count does not match the correlation count");
    StrengthTable table;
    table.correlation_count = correlation_count;
    table.scope = scope;
    table.pair_correlation.assign(pair_correlation.begin(), pair_correlation.end());
    for (std::size_t u = 0; u < params.pair_count; ++u) {
        std::vector<double> logits;
        if (scope == StrengthScope::all) {
            for (std::size_t t = 0; t < params.type_count; ++t) logits.push_back(params.logit(u, t));
        } else {
            for (std::size_t v = 0; v < kViewCount; ++v)
                logits.push_back(params.logit(
                    u, static_cast<std::size_t>(AmbiguityType{pair_correlation[u], static_cast<View>(v)}.index())));
        }
        const double top = *std::max_element(logits.begin(), logits.end());
        double z = 0.0;
        for (auto& l : logits) z += (l = std::exp(l - top));
        for (auto& l : logits) l /= z;
        table.rows.push_back(std::move(logits));
    }
    return table;
}

}  // namespace cand
