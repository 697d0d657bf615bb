#pragma once

#include <span>

namespace cand {

/// Dynamic time warping with absolute-difference local cost, unconstrained
/// warping window, unnormalized.
double dtw_distance(std::span<const double> a, std::span<const double> b);

double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// Mean of the Euclidean and DTW distances; inputs must share a length.
double combined_distance(std::span<const double> a, std::span<const double> b);

}  // namespace cand
