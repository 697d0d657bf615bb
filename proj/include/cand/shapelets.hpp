#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cand/series.hpp"

namespace cand {

struct Shapelet {
    int concept_id = 0;
    std::vector<double> values;
};

/// Concept vocabulary of one channel. Ids are unique; all shapelets share
/// `length`.
struct ShapeletDictionary {
    std::string channel;
    std::size_t length = 15;
    std::vector<Shapelet> shapelets;

    std::size_t size() const { return shapelets.size(); }
    const Shapelet& by_id(int concept_id) const;
};

void validate(const ShapeletDictionary& dict);

struct DiscoveryOptions {
    std::size_t count = 60;
    std::size_t length = 15;
    /// Offset between sampled subsequences; 0 means `length`, i.e. the same
    /// non-overlapping grid that matching uses.
    std::size_t stride = 0;
    std::size_t max_samples = 50000;
    int iterations = 50;
    std::uint64_t seed = 0;
};

/// Clusters sampled subsequences with k-means (k-means++ seeding) and
/// returns the centroids as shapelets with ids 0..count-1.
ShapeletDictionary discover_shapelets(std::span<const TimeSeries> dataset,
                                      const DiscoveryOptions& options);

/// Combined distances and normalized matching scores, row-major by concept
/// (dictionary order) then subsequence.
struct MatchMatrix {
    std::size_t concepts = 0;
    std::size_t subsequences = 0;
    std::size_t length = 0;
    std::vector<int> concept_ids;
    std::vector<double> distance;
    std::vector<double> score;

    double distance_at(std::size_t c, std::size_t v) const { return distance[c * subsequences + v]; }
    double score_at(std::size_t c, std::size_t v) const { return score[c * subsequences + v]; }
};

/// Splits `values` into consecutive non-overlapping windows of the
/// dictionary length (trailing remainder dropped) and scores every
/// (concept, window) pair. When all distances coincide every score is 1.
MatchMatrix matching_scores(std::span<const double> values, const ShapeletDictionary& dict);

struct Assignment {
    int concept_id = 0;
    std::size_t subsequence = 0;
    int start_minute = 0;
    double score = 0.0;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct AssignOptions {
    double min_score = 0.7;
    std::size_t top_k = 3;
};

/// A concept is assigned to a window when its score clears `min_score` and
/// it ranks within the `top_k` smallest distances to that window. Output is
/// sorted by start minute, then concept id.
std::vector<Assignment> assign_concepts(const MatchMatrix& matches, const AssignOptions& options = {});

std::vector<Assignment> assign_concepts(std::span<const double> values, const ShapeletDictionary& dict,
                                        const AssignOptions& options = {});

}  // namespace cand
