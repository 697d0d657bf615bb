#include "cand/distance.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cand/error.hpp"

namespace cand {

double dtw_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("dtw_distance: empty input");

    // Rolling rows over the cumulative cost table.
    const std::size_t m = b.size();
    std::vector<double> prev(m), cur(m);
    prev[0] = std::abs(a[0] - b[0]);
    for (std::size_t j = 1; j < m; ++j) prev[j] = prev[j - 1] + std::abs(a[0] - b[j]);
    for (std::size_t i = 1; i < a.size(); ++i) {
        cur[0] = prev[0] + std::abs(a[i] - b[0]);
        for (std::size_t j = 1; j < m; ++j)
            cur[j] = std::abs(a[i] - b[j]) + std::min({prev[j], cur[j - 1], prev[j - 1]});
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidArgument("euclidean_distance: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

double combined_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidArgument("combined_distance: length mismatch");
    return 0.5 * (euclidean_distance(a, b) + dtw_distance(a, b));
}

}  // namespace cand
