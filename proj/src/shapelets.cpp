#include "cand/shapelets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "cand/distance.hpp"
#include "cand/error.hpp"

namespace cand {

const Shapelet& ShapeletDictionary::by_id(int concept_id) const {
    for (const auto& s : shapelets)
        if (s.concept_id == concept_id) return s;
    throw InvalidArgument("no shapelet with id " + std::to_string(concept_id) + " in channel " + channel);
}

void validate(const ShapeletDictionary& dict) {
    std::set<int> seen;
    for (const auto& s : dict.shapelets) {
        if (!seen.insert(s.concept_id).second)
            throw DataError("duplicate shapelet id " + std::to_string(s.concept_id) + " in channel " + dict.channel);
        if (s.values.size() != dict.length)
            throw DataError("shapelet " + std::to_string(s.concept_id) + " has length " +
                            std::to_string(s.values.size()) + ", expected " + std::to_string(dict.length));
        for (double v : s.values)
            if (!std::isfinite(v)) throw DataError("shapelet " + std::to_string(s.concept_id) + " is not finite");
    }
}

namespace {

double squared_distance(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

}  // namespace

ShapeletDictionary discover_shapelets(std::span<const TimeSeries> dataset, const DiscoveryOptions& options) {
    const std::size_t len = options.length;
    const std::size_t stride = options.stride == 0 ? len : options.stride;
    if (len == 0) throw ConfigError("shapelet length must be positive");
    if (options.count == 0) throw ConfigError("shapelet count must be at least 1");
    if (dataset.empty()) throw InvalidArgument("discover_shapelets: empty dataset");

    struct Origin {
        std::size_t series;
        std::size_t offset;
    };
    std::vector<Origin> origins;
    for (std::size_t s = 0; s < dataset.size(); ++s) {
        const auto& values = dataset[s].values;
        if (values.size() < len)
            throw InvalidArgument("series " + dataset[s].set_id + " is shorter than the shapelet length");
        for (std::size_t off = 0; off + len <= values.size(); off += stride) origins.push_back({s, off});
    }

    std::mt19937_64 rng(options.seed);
    if (origins.size() > options.max_samples) {
        // Partial Fisher-Yates: the first max_samples entries are a uniform draw.
        for (std::size_t i = 0; i < options.max_samples; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, origins.size() - 1);
            std::swap(origins[i], origins[pick(rng)]);
        }
        origins.resize(options.max_samples);
    }

    const std::size_t n = origins.size();
    std::vector<double> points(n * len);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& src = dataset[origins[i].series].values;
        std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(origins[i].offset), len, points.begin() + i * len);
    }

    {
        std::set<std::vector<double>> distinct;
        for (std::size_t i = 0; i < n && distinct.size() <= options.count; ++i)
            distinct.emplace(points.begin() + i * len, points.begin() + (i + 1) * len);
        if (distinct.size() < options.count)
            throw ConfigError("requested " + std::to_string(options.count) + " shapelets but only " +
                              std::to_string(distinct.size()) + " distinct subsequences were sampled");
    }

    const std::size_t k = options.count;
    std::vector<double> centroids(k * len);
    auto point = [&](std::size_t i) { return points.data() + i * len; };
    auto centroid = [&](std::size_t c) { return centroids.data() + c * len; };

    // k-means++ seeding.
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    std::copy_n(point(first), len, centroid(0));
    for (std::size_t c = 1; c < k; ++c) {
        for (std::size_t i = 0; i < n; ++i)
            nearest[i] = std::min(nearest[i], squared_distance(point(i), centroid(c - 1), len));
        std::discrete_distribution<std::size_t> pick(nearest.begin(), nearest.end());
        std::copy_n(point(pick(rng)), len, centroid(c));
    }

    // Lloyd iterations; an empty cluster keeps its previous centroid.
    std::vector<std::size_t> owner(n, k);
    std::vector<double> sums(k * len);
    std::vector<std::size_t> counts(k);
    for (int iter = 0; iter < options.iterations; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = squared_distance(point(i), centroid(c), len);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (owner[i] != best) {
                owner[i] = best;
                changed = true;
            }
        }
        if (!changed) break;
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[owner[i]];
            for (std::size_t t = 0; t < len; ++t) sums[owner[i] * len + t] += point(i)[t];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t t = 0; t < len; ++t) centroid(c)[t] = sums[c * len + t] / static_cast<double>(counts[c]);
        }
    }

    ShapeletDictionary dict;
    dict.channel = dataset.front().channel;
    dict.length = len;
    for (std::size_t c = 0; c < k; ++c)
        dict.shapelets.push_back({static_cast<int>(c), std::vector<double>(centroid(c), centroid(c) + len)});
    return dict;
}

MatchMatrix matching_scores(std::span<const double> values, const ShapeletDictionary& dict) {
    const std::size_t len = dict.length;
    if (len == 0 || values.size() < len) throw InvalidArgument("matching_scores: series shorter than shapelet length");
    if (dict.shapelets.empty()) throw InvalidArgument("matching_scores: empty dictionary");

    MatchMatrix m;
    m.concepts = dict.size();
    m.subsequences = values.size() / len;
    m.length = len;
    m.distance.resize(m.concepts * m.subsequences);
    m.score.resize(m.distance.size());
    for (const auto& s : dict.shapelets) m.concept_ids.push_back(s.concept_id);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t c = 0; c < m.concepts; ++c) {
        const std::span<const double> shape = dict.shapelets[c].values;
        for (std::size_t v = 0; v < m.subsequences; ++v) {
            const double d = combined_distance(shape, values.subspan(v * len, len));
            m.distance[c * m.subsequences + v] = d;
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    }
    const double range = hi - lo;
    for (std::size_t i = 0; i < m.distance.size(); ++i)
        m.score[i] = range > 0.0 ? (hi - m.distance[i]) / range : 1.0;
    return m;
}

std::vector<Assignment> assign_concepts(const MatchMatrix& matches, const AssignOptions& options) {
    std::vector<Assignment> out;
    std::vector<std::size_t> order(matches.concepts);
    for (std::size_t v = 0; v < matches.subsequences; ++v) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return matches.distance_at(a, v) < matches.distance_at(b, v);
        });
        const std::size_t top = std::min(options.top_k, order.size());
        const auto first = out.size();
        for (std::size_t r = 0; r < top; ++r) {
            const std::size_t c = order[r];
            const double score = matches.score_at(c, v);
            if (score >= options.min_score)
                out.push_back({matches.concept_ids[c], v, static_cast<int>(v * matches.length), score});
        }
        std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end(),
                  [](const Assignment& a, const Assignment& b) { return a.concept_id < b.concept_id; });
    }
    return out;
}

std::vector<Assignment> assign_concepts(std::span<const double> values, const ShapeletDictionary& dict,
                                        const AssignOptions& options) {
    return assign_concepts(matching_scores(values, dict), options);
}

}  // namespace cand
