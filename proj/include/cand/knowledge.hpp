#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cand/shapelets.hpp"

namespace cand {

/// Per-series assignment lists, indexed by measurement set.
using SetAssignments = std::vector<std::vector<Assignment>>;

/// Time-interval relations. Relation r covers [lower[r], lower[r+1]) minutes,
/// the last one is open-ended.
struct IntervalRelations {
    std::vector<int> lower_bounds{0, 30, 60, 90};

    std::size_t size() const { return lower_bounds.size(); }
    /// Index of the relation whose range contains `gap` (gap >= 0).
    int relation_for(int gap) const;
};

void validate(const IntervalRelations& relations);

struct DomainTriplet {
    int head = 0;
    int relation = 0;
    int tail = 0;

    auto operator<=>(const DomainTriplet&) const = default;
};

/// Directed transition structure of one channel.
struct DomainKS {
    std::string channel;
    IntervalRelations relations;
    std::vector<int> concepts;                        // sorted
    std::map<DomainTriplet, std::size_t> triplets;    // triplet -> multiplicity

    bool has_concept(int id) const;
    bool contains(const DomainTriplet& t) const { return triplets.count(t) != 0; }
    /// Most frequent relation on the directed edge head -> tail (lowest index
    /// on ties), or nullopt when no such edge exists.
    std::optional<int> dominant_relation(int head, int tail) const;
};

/// Emits (c_i, bucket(gap), c_j) for every ordered pair of assignments in the
/// same series with c_i starting strictly before c_j.
DomainKS build_domain_ks(const std::string& channel, const SetAssignments& assignments,
                         const IntervalRelations& relations = {});

/// Row-normalized immediate-successor probabilities W[x][y].
struct TransitionStats {
    std::map<int, std::map<int, double>> rows;

    double probability(int from, int to) const;
    const std::map<int, double>* successors(int from) const;
};

/// Counts transitions from each minute group of a series' assignments to the
/// next minute group; concepts sharing a start minute are not successors of
/// each other.
TransitionStats transition_probabilities(const SetAssignments& assignments);

/// Channel-0 concept id, channel-1 concept id.
using CrossPair = std::pair<int, int>;
using PairLikelihoods = std::map<CrossPair, double>;

/// Jaccard co-occurrence over measurement sets; zero-likelihood pairs omitted.
PairLikelihoods cooccurrence_likelihood(const SetAssignments& first, const SetAssignments& second);

/// Correlation bin (lo, hi]; ids are 0-based (a1 has id 0).
struct Correlation {
    int id = 0;
    double lo = 0.0;
    double hi = 0.0;
};

struct CrossTriplet {
    int head = 0;         // channel-0 concept
    int correlation = 0;
    int tail = 0;         // channel-1 concept
    double likelihood = 0.0;
};

/// Undirected cross-channel structure; each unordered pair is stored once
/// with the channel-0 concept as head.
struct CrossKS {
    std::vector<Correlation> correlations;
    std::vector<CrossTriplet> triplets;   // sorted by (head, tail)
    std::set<int> head_concepts;          // C_cross within channel 0
    std::set<int> tail_concepts;          // C_cross within channel 1

    std::size_t n_types() const { return correlations.size(); }
    bool in_cross(std::size_t channel, int concept_id) const;
    /// Symmetric lookup: `a` and `b` are (channel, id) references.
    std::optional<int> correlation_between(std::pair<std::size_t, int> a, std::pair<std::size_t, int> b) const;
    std::optional<std::size_t> index_of(int head, int tail) const;
};

/// Equal-width bins over (0, max likelihood]; the top bin is right-closed.
CrossKS build_cross_ks(const PairLikelihoods& likelihoods, int n_types);

/// Bin index for `likelihood` given the maximum observed likelihood.
int correlation_bin(double likelihood, double max_likelihood, int n_types);

/// Everything the embedding stage consumes.
struct KnowledgeBundle {
    std::array<DomainKS, 2> domains;
    std::array<TransitionStats, 2> transitions;
    CrossKS cross;
};

struct KnowledgeOptions {
    IntervalRelations relations;
    int correlation_types = 5;
};

KnowledgeBundle build_knowledge(const std::array<SetAssignments, 2>& assignments, const std::array<std::string, 2>& channels,
                                const KnowledgeOptions& options = {});

}  // namespace cand
