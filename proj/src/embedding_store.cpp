#include "cand/embedding_store.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "cand/error.hpp"

namespace cand {

EmbeddingStore::EmbeddingStore(std::size_t dim, std::array<std::vector<int>, 2> concepts,
                               std::array<std::size_t, 2> relations, std::size_t correlations)
    : dim_(dim), concept_ids_(std::move(concepts)), relation_counts_(relations), correlation_count_(correlations) {
    if (dim == 0) throw ConfigError("embedding dimension must be positive");
    std::size_t slot = 0;
    for (std::size_t c = 0; c < 2; ++c) {
        std::sort(concept_ids_[c].begin(), concept_ids_[c].end());
        for (int id : concept_ids_[c]) concept_index_[c][id] = slot++;
    }
    for (std::size_t c = 0; c < 2; ++c) {
        relation_base_[c] = slot;
        slot += relation_counts_[c];
    }
    correlation_base_ = slot;
    slot += correlation_count_;
    slots_ = slot;
    params_.assign(slots_ * width(), 0.0);
}

bool EmbeddingStore::has_concept(std::size_t channel, int id) const {
    return channel < 2 && concept_index_[channel].count(id) != 0;
}

std::size_t EmbeddingStore::concept_slot(std::size_t channel, int id) const {
    if (channel < 2)
        if (auto it = concept_index_[channel].find(id); it != concept_index_[channel].end()) return it->second;
    throw DataError("concept " + std::to_string(id) + " of channel " + std::to_string(channel) +
                    " has no embedding");
}

std::size_t EmbeddingStore::relation_slot(std::size_t channel, int relation) const {
    if (channel >= 2 || relation < 0 || static_cast<std::size_t>(relation) >= relation_counts_[channel])
        throw DataError("relation " + std::to_string(relation) + " has no embedding");
    return relation_base_[channel] + static_cast<std::size_t>(relation);
}

std::size_t EmbeddingStore::correlation_slot(int correlation) const {
    if (correlation < 0 || static_cast<std::size_t>(correlation) >= correlation_count_)
        throw DataError("correlation " + std::to_string(correlation) + " has no embedding");
    return correlation_base_ + static_cast<std::size_t>(correlation);
}

std::span<const double> EmbeddingStore::vector(std::size_t slot) const {
    return std::span<const double>(params_).subspan(slot * width(), width());
}

std::span<double> EmbeddingStore::vector(std::size_t slot) {
    return std::span<double>(params_).subspan(slot * width(), width());
}

void EmbeddingStore::initialize_uniform(std::uint64_t seed) {
    const double bound = 6.0 / std::sqrt(static_cast<double>(width()));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& p : params_) p = dist(rng);
    zero_correlation_imaginary();
}

void EmbeddingStore::zero_correlation_imaginary() {
    for (std::size_t a = 0; a < correlation_count_; ++a) {
        auto v = vector(correlation_base_ + a);
        std::fill(v.begin() + static_cast<std::ptrdiff_t>(dim_), v.end(), 0.0);
    }
}

void evaluate(const Mixture& mixture, const EmbeddingStore& store, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& [slot, w] : mixture.terms) {
        const auto v = store.vector(slot);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * v[k];
    }
}

ComplexVector evaluate(const Mixture& mixture, const EmbeddingStore& store) {
    ComplexVector out(store.width());
    evaluate(mixture, store, out);
    return out;
}

void scatter_gradient(const Mixture& mixture, std::span<const double> grad, std::span<double> store_grad,
                      std::size_t width) {
    for (const auto& [slot, w] : mixture.terms) {
        auto g = store_grad.subspan(slot * width, width);
        for (std::size_t k = 0; k < width; ++k) g[k] += w * grad[k];
    }
}

}  // namespace cand
