#include "cand/complex_score.hpp"

#include "cand/error.hpp"

namespace cand {

double complex_score(std::span<const double> h, std::span<const double> r, std::span<const double> t) {
    if (h.size() != r.size() || h.size() != t.size() || h.size() % 2 != 0)
        throw InvalidArgument("complex_score: dimension mismatch");
    const std::size_t d = h.size() / 2;
    double f = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double hr = h[k], hi = h[d + k];
        const double rr = r[k], ri = r[d + k];
        const double tr = t[k], ti = t[d + k];
        f += hr * rr * tr + hi * rr * ti + hr * ri * ti - hi * ri * tr;
    }
    return f;
}

void accumulate_score_gradient(std::span<const double> h, std::span<const double> r, std::span<const double> t,
                               double coeff, std::span<double> grad_h, std::span<double> grad_r,
                               std::span<double> grad_t) {
    const std::size_t d = h.size() / 2;
    for (std::size_t k = 0; k < d; ++k) {
        const double hr = h[k], hi = h[d + k];
        const double rr = r[k], ri = r[d + k];
        const double tr = t[k], ti = t[d + k];
        grad_h[k] += coeff * (rr * tr + ri * ti);
        grad_h[d + k] += coeff * (rr * ti - ri * tr);
        grad_r[k] += coeff * (hr * tr + hi * ti);
        grad_r[d + k] += coeff * (hr * ti - hi * tr);
        grad_t[k] += coeff * (hr * rr - hi * ri);
        grad_t[d + k] += coeff * (hi * rr + hr * ri);
    }
}

}  // namespace cand
