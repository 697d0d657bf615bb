#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "cand/embedding_store.hpp"
#include "cand/knowledge.hpp"
#include "cand/series.hpp"
#include "cand/shapelets.hpp"

namespace cand {

struct TripletOccurrence {
    DomainTriplet triplet;
    std::size_t head_minute = 0;
    std::size_t tail_minute = 0;
};

/// Assignment pairs (earlier, later) whose triplet exists in `ks`, ordered by
/// the later concept's minute, then the earlier one's minute, then ids.
std::vector<TripletOccurrence> occurred_triplets(std::span<const Assignment> assignments, const DomainKS& ks);

/// rho^(total - n) for the n-th of `total` occurrences (1-based).
double triplet_importance(std::size_t n, std::size_t total, double rho);

/// Sum of importance-weighted [head | relation | tail] concatenations divided
/// by the occurrence count; 6d reals, zero when there are no occurrences.
std::vector<double> series_representation(std::span<const TripletOccurrence> occurrences, const EmbeddingStore& store,
                                          std::size_t channel, double rho);

std::vector<double> full_representation(std::span<const double> first, std::span<const double> second);

/// Matching, occurrence extraction and pooling for whole measurement sets.
class Representer {
public:
    Representer(const std::array<ShapeletDictionary, 2>& dicts, const KnowledgeBundle& knowledge,
                const EmbeddingStore& store, double rho, AssignOptions assign = {});

    std::size_t dimension() const { return 12 * store_->dim(); }

    /// Representation from the first `observed_minutes` of every channel.
    std::vector<double> operator()(const MeasurementSet& set, std::size_t observed_minutes) const;
    std::vector<double> operator()(const MeasurementSet& set) const { return (*this)(set, set.length()); }

    std::vector<TripletOccurrence> occurrences(const MeasurementSet& set, std::size_t channel,
                                               std::size_t observed_minutes) const;

private:
    const std::array<ShapeletDictionary, 2>* dicts_;
    const KnowledgeBundle* knowledge_;
    const EmbeddingStore* store_;
    double rho_;
    AssignOptions assign_;
};

struct FeatureRow {
    std::string set_id;
    std::size_t observed_minutes = 0;
    std::vector<double> features;
    Label label = Label::unknown;
};

/// `set_id,observed_minutes,f0..f{n-1}[,label]`; the label column is
/// present when any row carries a label.
void write_features_csv(std::ostream& out, std::span<const FeatureRow> rows);

}  // namespace cand
