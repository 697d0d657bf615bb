#pragma once

// Brute-force reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "cand/context.hpp"
#include "cand/knowledge.hpp"

namespace oracle {

// Plain exponential recursion over the warping lattice.
inline double dtw(std::span<const double> a, std::span<const double> b, std::size_t i, std::size_t j) {
    const double cost = std::abs(a[i] - b[j]);
    if (i == 0 && j == 0) return cost;
    double best = std::numeric_limits<double>::infinity();
    if (i > 0) best = std::min(best, dtw(a, b, i - 1, j));
    if (j > 0) best = std::min(best, dtw(a, b, i, j - 1));
    if (i > 0 && j > 0) best = std::min(best, dtw(a, b, i - 1, j - 1));
    return cost + best;
}

inline double dtw(std::span<const double> a, std::span<const double> b) {
    return dtw(a, b, a.size() - 1, b.size() - 1);
}

// Counts every candidate triplet over the whole concept x relation x concept
// grid by scanning all assignment pairs.
inline std::map<cand::DomainTriplet, std::size_t> domain_triplets(const cand::SetAssignments& sets,
                                                                  const std::vector<int>& concepts,
                                                                  const std::vector<int>& bounds) {
    auto bucket = [&](int gap) {
        int r = -1;
        for (std::size_t k = 0; k < bounds.size(); ++k)
            if (gap >= bounds[k]) r = static_cast<int>(k);
        return r;
    };
    std::map<cand::DomainTriplet, std::size_t> out;
    for (int ci : concepts)
        for (int r = 0; r < static_cast<int>(bounds.size()); ++r)
            for (int cj : concepts) {
                std::size_t count = 0;
                for (const auto& s : sets)
                    for (const auto& a : s)
                        for (const auto& b : s)
                            if (a.concept_id == ci && b.concept_id == cj && a.start_minute < b.start_minute &&
                                bucket(b.start_minute - a.start_minute) == r)
                                ++count;
                if (count) out[{ci, r, cj}] = count;
            }
    return out;
}

// All simple paths from -> to of 2..max_len edges, found by trying every
// ordered selection of distinct intermediate nodes.
inline std::vector<std::vector<cand::CrossNode>> simple_paths(const cand::CrossKS& cross, const cand::CrossNode& from,
                                                              const cand::CrossNode& to, std::size_t max_len) {
    std::set<cand::CrossNode> all;
    for (const auto& t : cross.triplets) {
        all.insert({0, t.head});
        all.insert({1, t.tail});
    }
    std::vector<cand::CrossNode> others;
    for (const auto& n : all)
        if (n != from && n != to) others.push_back(n);
    auto linked = [&](const cand::CrossNode& a, const cand::CrossNode& b) {
        return cross.correlation_between({a.channel, a.id}, {b.channel, b.id}).has_value();
    };
    std::vector<std::vector<cand::CrossNode>> out;
    std::vector<cand::CrossNode> seq;
    std::vector<bool> used(others.size(), false);
    std::function<void(std::size_t)> choose = [&](std::size_t remaining) {
        if (remaining == 0) {
            std::vector<cand::CrossNode> path{from};
            path.insert(path.end(), seq.begin(), seq.end());
            path.push_back(to);
            for (std::size_t k = 0; k + 1 < path.size(); ++k)
                if (!linked(path[k], path[k + 1])) return;
            out.push_back(path);
            return;
        }
        for (std::size_t k = 0; k < others.size(); ++k) {
            if (used[k]) continue;
            used[k] = true;
            seq.push_back(others[k]);
            choose(remaining - 1);
            seq.pop_back();
            used[k] = false;
        }
    };
    for (std::size_t len = 2; len <= max_len; ++len) choose(len - 1);
    std::sort(out.begin(), out.end());
    return out;
}

// Fraction of (positive, negative) pairs ranked correctly, ties worth 1/2.
inline double pairwise_auc(std::span<const double> scores, std::span<const int> labels) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i)
        for (std::size_t j = 0; j < scores.size(); ++j)
            if (labels[i] == 1 && labels[j] == 0) {
                ++pairs;
                if (scores[i] > scores[j]) wins += 1.0;
                else if (scores[i] == scores[j]) wins += 0.5;
            }
    return wins / static_cast<double>(pairs);
}

// Central differences of f at x, one coordinate at a time.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double h = 1e-6) {
    std::vector<double> g(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double keep = x[k];
        x[k] = keep + h;
        const double up = f(x);
        x[k] = keep - h;
        const double down = f(x);
        x[k] = keep;
        g[k] = (up - down) / (2.0 * h);
    }
    return g;
}

// ||a - b|| / max(||a||, ||b||), with a floor for vanishing gradients.
inline double relative_error(std::span<const double> a, std::span<const double> b) {
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        diff += (a[k] - b[k]) * (a[k] - b[k]);
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-8});
}

}  // namespace oracle
