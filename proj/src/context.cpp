#include "cand/context.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "cand/complex_score.hpp"
#include "cand/error.hpp"

namespace cand {

std::vector<int> Walk::metapath() const {
    std::vector<int> key;
    key.reserve(steps.size());
    for (const auto& s : steps) key.push_back(s.relation);
    return key;
}

GuidedExplorer::GuidedExplorer(const DomainKS& ks, const TransitionStats& stats, std::set<int> cross_members,
                               double phi)
    : ks_(&ks), cross_(std::move(cross_members)), phi_(phi) {
    if (!(phi > 1.0)) throw ConfigError("exploration bias phi must exceed 1");

    // Most frequent relation per directed edge, lowest relation on ties.
    std::map<std::pair<int, int>, std::pair<std::size_t, int>> dominant;
    for (const auto& [t, count] : ks.triplets) {
        adjacency_[t.head].insert(t.tail);
        adjacency_[t.tail].insert(t.head);
        auto [it, fresh] = dominant.try_emplace({t.head, t.tail}, count, t.relation);
        if (!fresh && count > it->second.first) it->second = {count, t.relation};
    }
    for (const auto& [from, row] : stats.rows) {
        for (const auto& [to, w] : row) {
            if (!(w > 0.0)) continue;
            auto it = dominant.find({from, to});
            if (it == dominant.end()) continue;
            successors_[from].push_back({to, w, it->second.second});
        }
    }
}

int GuidedExplorer::hop_distance(int a, int b) const {
    if (a == b) return 0;
    auto it = adjacency_.find(a);
    if (it == adjacency_.end()) return 3;
    if (it->second.count(b)) return 1;
    auto jt = adjacency_.find(b);
    if (jt == adjacency_.end()) return 3;
    // Distance 2 iff the neighborhoods intersect.
    const auto& small = it->second.size() < jt->second.size() ? it->second : jt->second;
    const auto& large = it->second.size() < jt->second.size() ? jt->second : it->second;
    for (int n : small)
        if (large.count(n)) return 2;
    return 3;
}

std::vector<std::pair<int, double>> GuidedExplorer::weights(int x, std::optional<int> previous) const {
    if (!ks_->has_concept(x)) throw InvalidArgument("concept " + std::to_string(x) + " is not in the domain structure");
    std::vector<std::pair<int, double>> out;
    auto it = successors_.find(x);
    if (it == successors_.end()) return out;
    const bool x_cross = cross_.count(x) != 0;
    for (const auto& e : it->second) {
        const bool y_cross = cross_.count(e.target) != 0;
        const int d = previous ? hop_distance(*previous, e.target) : -1;
        double w = e.weight;
        if ((previous && d <= 1) || y_cross)
            w /= phi_;
        else if (previous && d == 2 && x_cross && !y_cross)
            w *= phi_;
        out.emplace_back(e.target, w);
    }
    return out;
}

std::vector<Walk> GuidedExplorer::sample(int start, std::size_t count, std::size_t length,
                                         std::mt19937_64& rng) const {
    if (!ks_->has_concept(start))
        throw InvalidArgument("concept " + std::to_string(start) + " is not in the domain structure");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Walk> walks(count);
    for (auto& walk : walks) {
        walk.start = start;
        int x = start;
        std::optional<int> previous;
        double cumulative = 1.0;
        while (walk.steps.size() < length) {
            const auto w = weights(x, previous);
            if (w.empty()) break;
            double z = 0.0;
            for (const auto& [y, v] : w) z += v;
            const double u = unit(rng) * z;
            std::size_t pick = 0;
            double acc = w[0].second;
            while (pick + 1 < w.size() && acc <= u) acc += w[++pick].second;
            const int y = w[pick].first;
            const double p = w[pick].second / z;
            cumulative *= p;
            const auto& edges = successors_.at(x);
            const auto edge = std::find_if(edges.begin(), edges.end(), [y](const Edge& e) { return e.target == y; });
            walk.steps.push_back({edge->relation, y, p, cumulative});
            previous = x;
            x = y;
        }
    }
    return walks;
}

std::vector<Walk> GuidedExplorer::sample(int start, std::size_t count, std::size_t length, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    return sample(start, count, length, rng);
}

std::vector<std::pair<int, double>> exploration_weights(int x, std::optional<int> previous, const DomainKS& ks,
                                                        const CrossKS& cross, std::size_t channel,
                                                        const TransitionStats& stats, double phi) {
    const auto& members = channel == 0 ? cross.head_concepts : cross.tail_concepts;
    return GuidedExplorer(ks, stats, members, phi).weights(x, previous);
}

namespace {

Mixture compact(const std::map<std::size_t, double>& weights) {
    Mixture m;
    for (const auto& [slot, w] : weights) m.terms.emplace_back(slot, w);
    return m;
}

std::vector<double> softmax(std::vector<double> values) {
    const double top = *std::max_element(values.begin(), values.end());
    double z = 0.0;
    for (auto& v : values) z += (v = std::exp(v - top));
    for (auto& v : values) v /= z;
    return values;
}

}  // namespace

Mixture metapath_mixture(std::span<const Walk> walks, const EmbeddingStore& store, std::size_t channel) {
    std::map<std::vector<int>, std::vector<const Walk*>> groups;
    for (const auto& w : walks)
        if (!w.steps.empty()) groups[w.metapath()].push_back(&w);

    std::map<std::size_t, double> weights;
    const double per_group = groups.empty() ? 0.0 : 1.0 / static_cast<double>(groups.size());
    for (const auto& [key, members] : groups) {
        const double per_walk = per_group / static_cast<double>(members.size());
        for (const Walk* w : members) {
            std::vector<double> p;
            for (const auto& s : w->steps) p.push_back(s.cumulative);
            const auto alpha = softmax(std::move(p));
            for (std::size_t j = 0; j < alpha.size(); ++j)
                weights[store.concept_slot(channel, w->steps[j].concept_id)] += per_walk * alpha[j];
        }
    }
    return compact(weights);
}

ComplexVector metapath_aggregate(std::span<const Walk> walks, const EmbeddingStore& store, std::size_t channel) {
    return evaluate(metapath_mixture(walks, store, channel), store);
}

CrossGraph::CrossGraph(const CrossKS& cross) {
    for (const auto& t : cross.triplets) {
        const CrossNode head{0, t.head}, tail{1, t.tail};
        adjacency_[head].emplace_back(tail, t.correlation);
        adjacency_[tail].emplace_back(head, t.correlation);
    }
    for (auto& [node, list] : adjacency_) std::sort(list.begin(), list.end());
}

const std::vector<std::pair<CrossNode, int>>& CrossGraph::neighbors(const CrossNode& node) const {
    auto it = adjacency_.find(node);
    return it == adjacency_.end() ? none_ : it->second;
}

std::vector<CrossNode> CrossGraph::nodes() const {
    std::vector<CrossNode> out;
    for (const auto& [node, list] : adjacency_) out.push_back(node);
    return out;
}

std::vector<CorrelationPath> enumerate_correlation_paths(const CrossGraph& graph, const CrossNode& from,
                                                         const CrossNode& to, std::size_t max_length,
                                                         std::size_t max_paths) {
    std::vector<CorrelationPath> out;
    if (from == to || max_length < 2 || max_paths == 0) return out;

    // Hop distances to the target bound how deep a branch can still succeed.
    std::map<CrossNode, std::size_t> dist{{to, 0}};
    std::deque<CrossNode> queue{to};
    while (!queue.empty()) {
        const CrossNode n = queue.front();
        queue.pop_front();
        for (const auto& [m, corr] : graph.neighbors(n))
            if (dist.try_emplace(m, dist[n] + 1).second) queue.push_back(m);
    }
    if (!dist.count(from)) return out;

    CorrelationPath current;
    current.nodes.push_back(from);
    std::set<CrossNode> visited{from};

    std::function<void(const CrossNode&, std::size_t)> extend = [&](const CrossNode& node, std::size_t remaining) {
        for (const auto& [next, corr] : graph.neighbors(node)) {
            if (out.size() >= max_paths) return;
            if (visited.count(next)) continue;
            if (next == to) {
                if (remaining != 1) continue;
                current.nodes.push_back(next);
                current.correlations.push_back(corr);
                out.push_back(current);
                current.nodes.pop_back();
                current.correlations.pop_back();
                continue;
            }
            auto d = dist.find(next);
            if (remaining < 2 || d == dist.end() || d->second > remaining - 1) continue;
            visited.insert(next);
            current.nodes.push_back(next);
            current.correlations.push_back(corr);
            extend(next, remaining - 1);
            current.nodes.pop_back();
            current.correlations.pop_back();
            visited.erase(next);
        }
    };
    for (std::size_t len = 2; len <= max_length && out.size() < max_paths; ++len) extend(from, len);
    return out;
}

EdgeScorer store_edge_scorer(const EmbeddingStore& store) {
    return [&store](const CrossNode& a, int corr, const CrossNode& b) {
        return complex_score(store.vector(store.concept_slot(a.channel, a.id)),
                             store.vector(store.correlation_slot(corr)),
                             store.vector(store.concept_slot(b.channel, b.id)));
    };
}

Mixture depth_aware_mixture(std::span<const CorrelationPath> paths, const EmbeddingStore& store,
                            const EdgeScorer& scorer) {
    std::map<std::size_t, std::vector<const CorrelationPath*>> groups;
    for (const auto& p : paths)
        if (p.length() > 0) groups[p.length()].push_back(&p);

    std::map<std::size_t, double> weights;
    const double per_group = groups.empty() ? 0.0 : 1.0 / static_cast<double>(groups.size());
    for (const auto& [len, members] : groups) {
        const double per_path = per_group / static_cast<double>(members.size());
        for (const CorrelationPath* p : members) {
            std::vector<double> s;
            for (std::size_t j = 0; j < p->length(); ++j)
                s.push_back(scorer(p->nodes[j], p->correlations[j], p->nodes[j + 1]));
            const auto beta = softmax(std::move(s));
            for (std::size_t j = 0; j < beta.size(); ++j)
                weights[store.correlation_slot(p->correlations[j])] += per_path * beta[j];
        }
    }
    return compact(weights);
}

ComplexVector depth_aware_aggregate(std::span<const CorrelationPath> paths, const EmbeddingStore& store,
                                    const EdgeScorer& scorer) {
    return evaluate(depth_aware_mixture(paths, store, scorer), store);
}

nlohmann::json to_json(const Walk& walk) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : walk.steps)
        steps.push_back({{"relation", s.relation}, {"concept", s.concept_id}, {"p", s.probability},
                         {"cumulative", s.cumulative}});
    return {{"start", walk.start}, {"steps", std::move(steps)}};
}

nlohmann::json to_json(const CorrelationPath& path) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : path.nodes) nodes.push_back({n.channel, n.id});
    return {{"nodes", std::move(nodes)}, {"correlations", path.correlations}};
}

}  // namespace cand
