#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace cand {

/// Complex vector flattened as [real parts (d) | imaginary parts (d)].
using ComplexVector = std::vector<double>;

/// Contiguous parameter block holding one complex vector per concept (both
/// channels), per interval relation of each channel, and per correlation.
/// Correlation vectors are kept purely real.
class EmbeddingStore {
public:
    EmbeddingStore() = default;
    EmbeddingStore(std::size_t dim, std::array<std::vector<int>, 2> concepts, std::array<std::size_t, 2> relations,
                   std::size_t correlations);

    std::size_t dim() const { return dim_; }
    std::size_t width() const { return 2 * dim_; }
    std::size_t slot_count() const { return slots_; }

    bool has_concept(std::size_t channel, int id) const;
    /// Throws DataError for an unknown concept.
    std::size_t concept_slot(std::size_t channel, int id) const;
    std::size_t relation_slot(std::size_t channel, int relation) const;
    std::size_t correlation_slot(int correlation) const;

    const std::vector<int>& concepts(std::size_t channel) const { return concept_ids_[channel]; }
    std::size_t relation_count(std::size_t channel) const { return relation_counts_[channel]; }
    std::size_t correlation_count() const { return correlation_count_; }

    std::span<const double> vector(std::size_t slot) const;
    std::span<double> vector(std::size_t slot);
    std::span<const double> parameters() const { return params_; }
    std::span<double> parameters() { return params_; }

    /// Uniform in [-6/sqrt(2d), 6/sqrt(2d)] per coordinate.
    void initialize_uniform(std::uint64_t seed);
    void zero_correlation_imaginary();

    friend bool operator==(const EmbeddingStore&, const EmbeddingStore&) = default;

private:
    std::size_t dim_ = 0;
    std::size_t slots_ = 0;
    std::array<std::vector<int>, 2> concept_ids_;
    std::array<std::map<int, std::size_t>, 2> concept_index_;
    std::array<std::size_t, 2> relation_counts_{};
    std::array<std::size_t, 2> relation_base_{};
    std::size_t correlation_count_ = 0;
    std::size_t correlation_base_ = 0;
    std::vector<double> params_;
};

/// Weighted sum of store vectors; used for contextual representations whose
/// weights are fixed when the mixture is built.
struct Mixture {
    std::vector<std::pair<std::size_t, double>> terms;  // (slot, weight)

    bool empty() const { return terms.empty(); }
    static Mixture single(std::size_t slot) { return Mixture{{{slot, 1.0}}}; }
};

void evaluate(const Mixture& mixture, const EmbeddingStore& store, std::span<double> out);
ComplexVector evaluate(const Mixture& mixture, const EmbeddingStore& store);

/// Adds weight * grad into every constituent slot of `store_grad`.
void scatter_gradient(const Mixture& mixture, std::span<const double> grad, std::span<double> store_grad,
                      std::size_t width);

}  // namespace cand
