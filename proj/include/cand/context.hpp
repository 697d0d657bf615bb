#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cand/embedding_store.hpp"
#include "cand/knowledge.hpp"

namespace cand {

struct WalkStep {
    int relation = 0;
    int concept_id = 0;
    double probability = 0.0;  // normalized probability of this step
    double cumulative = 0.0;   // product of step probabilities from the start
};

struct Walk {
    int start = 0;
    std::vector<WalkStep> steps;

    /// Relation ids traversed, in order.
    std::vector<int> metapath() const;
};

/// Biased random walks over one channel's domain structure. Steps follow
/// directed edges x -> y with W[x][y] > 0; the relation of a step is the
/// edge's most frequent interval relation.
class GuidedExplorer {
public:
    GuidedExplorer(const DomainKS& ks, const TransitionStats& stats, std::set<int> cross_members, double phi);

    /// Unnormalized step weights from `x` having arrived from `previous`
    /// (nullopt on the first step), in ascending successor order.
    std::vector<std::pair<int, double>> weights(int x, std::optional<int> previous) const;

    /// Shortest undirected hop distance, saturated at 3 ("farther than 2").
    int hop_distance(int a, int b) const;

    std::vector<Walk> sample(int start, std::size_t count, std::size_t length, std::mt19937_64& rng) const;
    std::vector<Walk> sample(int start, std::size_t count, std::size_t length, std::uint64_t seed) const;

    bool has_concept(int id) const { return adjacency_.count(id) != 0 || successors_.count(id) != 0; }

private:
    struct Edge {
        int target;
        double weight;
        int relation;
    };
    const DomainKS* ks_;
    std::set<int> cross_;
    double phi_;
    std::map<int, std::vector<Edge>> successors_;
    std::map<int, std::set<int>> adjacency_;
};

/// Free-function form of GuidedExplorer::weights.
std::vector<std::pair<int, double>> exploration_weights(int x, std::optional<int> previous, const DomainKS& ks,
                                                        const CrossKS& cross, std::size_t channel,
                                                        const TransitionStats& stats, double phi);

/// Walks grouped by metapath; within a walk, visited concepts are weighted by
/// softmax of their cumulative exploration probability; groups are averaged.
/// Empty when every walk is empty.
Mixture metapath_mixture(std::span<const Walk> walks, const EmbeddingStore& store, std::size_t channel);
ComplexVector metapath_aggregate(std::span<const Walk> walks, const EmbeddingStore& store, std::size_t channel);

/// A concept in the cross structure.
struct CrossNode {
    std::size_t channel = 0;
    int id = 0;

    auto operator<=>(const CrossNode&) const = default;
};

struct CorrelationPath {
    std::vector<CrossNode> nodes;      // e_0 = source ... e_n = target
    std::vector<int> correlations;     // a_1 ... a_n

    std::size_t length() const { return correlations.size(); }
};

/// Undirected adjacency of a CrossKS with neighbors in ascending order.
class CrossGraph {
public:
    explicit CrossGraph(const CrossKS& cross);

    const std::vector<std::pair<CrossNode, int>>& neighbors(const CrossNode& node) const;
    std::vector<CrossNode> nodes() const;

private:
    std::map<CrossNode, std::vector<std::pair<CrossNode, int>>> adjacency_;
    std::vector<std::pair<CrossNode, int>> none_;
};

/// Simple paths of 2..max_length edges between `from` and `to`, ordered by
/// length and then lexicographically by node sequence. Stops after
/// `max_paths` paths.
std::vector<CorrelationPath> enumerate_correlation_paths(const CrossGraph& graph, const CrossNode& from,
                                                         const CrossNode& to, std::size_t max_length,
                                                         std::size_t max_paths = std::numeric_limits<std::size_t>::max());

using EdgeScorer = std::function<double(const CrossNode&, int, const CrossNode&)>;

EdgeScorer store_edge_scorer(const EmbeddingStore& store);

/// Paths grouped by length; within a path correlations are weighted by
/// softmax of their hop scores; groups are averaged. Empty for no paths.
Mixture depth_aware_mixture(std::span<const CorrelationPath> paths, const EmbeddingStore& store,
                            const EdgeScorer& scorer);
ComplexVector depth_aware_aggregate(std::span<const CorrelationPath> paths, const EmbeddingStore& store,
                                    const EdgeScorer& scorer);

nlohmann::json to_json(const Walk& walk);
nlohmann::json to_json(const CorrelationPath& path);

}  // namespace cand
