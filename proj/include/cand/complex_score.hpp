#pragma once

#include <span>

namespace cand {

/// ComplEx plausibility Re(sum_k h_k * r_k * conj(t_k)) over flattened
/// [re | im] vectors of equal, even length.
double complex_score(std::span<const double> h, std::span<const double> r, std::span<const double> t);

/// Adds coeff * df/dh, df/dr, df/dt into the gradient buffers. Buffers may
/// alias one another (e.g. a self-loop triplet).
void accumulate_score_gradient(std::span<const double> h, std::span<const double> r, std::span<const double> t,
                               double coeff, std::span<double> grad_h, std::span<double> grad_r,
                               std::span<double> grad_t);

}  // namespace cand
