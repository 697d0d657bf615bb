#include "cand/knowledge.hpp"

#include <algorithm>
#include <cmath>

#include "cand/error.hpp"

namespace cand {

int IntervalRelations::relation_for(int gap) const {
    int r = 0;
    for (std::size_t i = 0; i < lower_bounds.size(); ++i)
        if (gap >= lower_bounds[i]) r = static_cast<int>(i);
    return r;
}

void validate(const IntervalRelations& relations) {
    if (relations.lower_bounds.empty() || relations.lower_bounds.front() != 0)
        throw ConfigError("interval relations must start at 0 minutes");
    if (!std::is_sorted(relations.lower_bounds.begin(), relations.lower_bounds.end()) ||
        std::adjacent_find(relations.lower_bounds.begin(), relations.lower_bounds.end()) !=
            relations.lower_bounds.end())
        throw ConfigError("interval relation bounds must be strictly increasing");
}

bool DomainKS::has_concept(int id) const { return std::binary_search(concepts.begin(), concepts.end(), id); }

std::optional<int> DomainKS::dominant_relation(int head, int tail) const {
    std::optional<int> best;
    std::size_t best_count = 0;
    for (auto it = triplets.lower_bound({head, 0, 0}); it != triplets.end() && it->first.head == head; ++it) {
        // Triplets are ordered by (head, relation, tail); scan this head.
        if (it->first.tail != tail) continue;
        if (!best || it->second > best_count) {
            best = it->first.relation;
            best_count = it->second;
        }
    }
    return best;
}

DomainKS build_domain_ks(const std::string& channel, const SetAssignments& assignments,
                         const IntervalRelations& relations) {
    validate(relations);
    DomainKS ks;
    ks.channel = channel;
    ks.relations = relations;
    std::set<int> concepts;
    for (const auto& series : assignments) {
        for (const auto& a : series) concepts.insert(a.concept_id);
        for (std::size_t i = 0; i < series.size(); ++i)
            for (std::size_t j = 0; j < series.size(); ++j) {
                const int gap = series[j].start_minute - series[i].start_minute;
                if (gap <= 0) continue;
                ++ks.triplets[{series[i].concept_id, relations.relation_for(gap), series[j].concept_id}];
            }
    }
    ks.concepts.assign(concepts.begin(), concepts.end());
    return ks;
}

double TransitionStats::probability(int from, int to) const {
    const auto* row = successors(from);
    if (!row) return 0.0;
    auto it = row->find(to);
    return it == row->end() ? 0.0 : it->second;
}

const std::map<int, double>* TransitionStats::successors(int from) const {
    auto it = rows.find(from);
    return it == rows.end() ? nullptr : &it->second;
}

TransitionStats transition_probabilities(const SetAssignments& assignments) {
    std::map<int, std::map<int, double>> counts;
    for (const auto& series : assignments) {
        std::vector<Assignment> sorted = series;
        std::sort(sorted.begin(), sorted.end(), [](const Assignment& a, const Assignment& b) {
            return a.start_minute != b.start_minute ? a.start_minute < b.start_minute : a.concept_id < b.concept_id;
        });
        std::size_t group = 0;
        while (group < sorted.size()) {
            std::size_t next = group;
            while (next < sorted.size() && sorted[next].start_minute == sorted[group].start_minute) ++next;
            std::size_t end = next;
            while (end < sorted.size() && sorted[end].start_minute == sorted[next].start_minute) ++end;
            for (std::size_t i = group; i < next; ++i)
                for (std::size_t j = next; j < end; ++j) counts[sorted[i].concept_id][sorted[j].concept_id] += 1.0;
            group = next;
        }
    }
    TransitionStats stats;
    for (auto& [from, row] : counts) {
        double total = 0.0;
        for (const auto& [to, c] : row) total += c;
        for (auto& [to, c] : row) stats.rows[from][to] = c / total;
    }
    return stats;
}

PairLikelihoods cooccurrence_likelihood(const SetAssignments& first, const SetAssignments& second) {
    if (first.size() != second.size())
        throw InvalidArgument("cooccurrence_likelihood: channels cover different numbers of sets");
    std::map<int, std::size_t> count_first, count_second;
    std::map<CrossPair, std::size_t> joint;
    for (std::size_t s = 0; s < first.size(); ++s) {
        std::set<int> a, b;
        for (const auto& x : first[s]) a.insert(x.concept_id);
        for (const auto& x : second[s]) b.insert(x.concept_id);
        for (int c : a) ++count_first[c];
        for (int c : b) ++count_second[c];
        for (int c : a)
            for (int d : b) ++joint[{c, d}];
    }
    PairLikelihoods out;
    for (const auto& [pair, both] : joint) {
        const std::size_t either = count_first[pair.first] + count_second[pair.second] - both;
        out[pair] = static_cast<double>(both) / static_cast<double>(either);
    }
    return out;
}

int correlation_bin(double likelihood, double max_likelihood, int n_types) {
    if (n_types < 1) throw ConfigError("number of correlation types must be at least 1");
    const double ratio = likelihood / max_likelihood * n_types;
    const int bin = static_cast<int>(std::ceil(ratio - 1e-9)) - 1;
    return std::clamp(bin, 0, n_types - 1);
}

bool CrossKS::in_cross(std::size_t channel, int concept_id) const {
    return channel == 0 ? head_concepts.count(concept_id) != 0 : tail_concepts.count(concept_id) != 0;
}

std::optional<std::size_t> CrossKS::index_of(int head, int tail) const {
    auto it = std::lower_bound(triplets.begin(), triplets.end(), std::pair{head, tail},
                               [](const CrossTriplet& t, const std::pair<int, int>& key) {
                                   return std::pair{t.head, t.tail} < key;
                               });
    if (it == triplets.end() || it->head != head || it->tail != tail) return std::nullopt;
    return static_cast<std::size_t>(it - triplets.begin());
}

std::optional<int> CrossKS::correlation_between(std::pair<std::size_t, int> a, std::pair<std::size_t, int> b) const {
    if (a.first == b.first) return std::nullopt;
    if (a.first != 0) std::swap(a, b);
    auto idx = index_of(a.second, b.second);
    if (!idx) return std::nullopt;
    return triplets[*idx].correlation;
}

CrossKS build_cross_ks(const PairLikelihoods& likelihoods, int n_types) {
    if (n_types < 1) throw ConfigError("number of correlation types must be at least 1");
    double max_l = 0.0;
    for (const auto& [pair, l] : likelihoods) max_l = std::max(max_l, l);
    const double top = max_l > 0.0 ? max_l : 1.0;

    CrossKS ks;
    const double width = top / n_types;
    for (int i = 0; i < n_types; ++i)
        ks.correlations.push_back({i, width * i, i + 1 == n_types ? top : width * (i + 1)});
    for (const auto& [pair, l] : likelihoods) {
        if (!(l > 0.0)) continue;
        ks.triplets.push_back({pair.first, correlation_bin(l, top, n_types), pair.second, l});
        ks.head_concepts.insert(pair.first);
        ks.tail_concepts.insert(pair.second);
    }
    return ks;
}

KnowledgeBundle build_knowledge(const std::array<SetAssignments, 2>& assignments,
                                const std::array<std::string, 2>& channels, const KnowledgeOptions& options) {
    KnowledgeBundle bundle;
    for (std::size_t c = 0; c < 2; ++c) {
        bundle.domains[c] = build_domain_ks(channels[c], assignments[c], options.relations);
        bundle.transitions[c] = transition_probabilities(assignments[c]);
    }
    bundle.cross = build_cross_ks(cooccurrence_likelihood(assignments[0], assignments[1]), options.correlation_types);
    return bundle;
}

}  // namespace cand
