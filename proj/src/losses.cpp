#include "cand/losses.hpp"

#include <algorithm>
#include <cmath>

#include "cand/complex_score.hpp"
#include "cand/error.hpp"

namespace cand {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log_sigmoid(double x) { return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

double dynamic_margin(double gamma, double strength, double xi) { return gamma * std::exp((strength - 1.0) * xi); }

namespace {

void require_finite(double loss, const char* what) {
    if (!std::isfinite(loss)) throw TrainingError(std::string(what) + ": non-finite loss");
}

}  // namespace

ScoreLoss sigmoid_triplet_loss(double f_positive, std::span<const double> f_negatives, double margin) {
    if (f_negatives.empty()) throw InvalidArgument("sigmoid_triplet_loss: at least one negative is required");
    const double inv_n = 1.0 / static_cast<double>(f_negatives.size());
    ScoreLoss out;
    // d = -f, so margin - d(pos) = margin + f_pos and d(neg) - margin = -f_neg - margin.
    out.loss = -log_sigmoid(margin + f_positive);
    out.d_positive = -sigmoid(-(margin + f_positive));
    out.d_negatives.reserve(f_negatives.size());
    for (double f : f_negatives) {
        out.loss -= inv_n * log_sigmoid(-f - margin);
        out.d_negatives.push_back(inv_n * sigmoid(f + margin));
    }
    require_finite(out.loss, "sigmoid_triplet_loss");
    return out;
}

ScoreLoss self_adversarial_loss(double f_positive, std::span<const double> f_negatives, double margin,
                                double temperature) {
    if (f_negatives.empty()) throw InvalidArgument("self_adversarial_loss: at least one negative is required");
    const std::size_t n = f_negatives.size();
    std::vector<double> weight(n), log_term(n);
    const double top = temperature * *std::max_element(f_negatives.begin(), f_negatives.end());
    double z = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        weight[k] = std::exp(temperature * f_negatives[k] - top);
        z += weight[k];
    }
    double mean_log = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        weight[k] /= z;
        log_term[k] = log_sigmoid(-f_negatives[k] - margin);
        mean_log += weight[k] * log_term[k];
    }

    ScoreLoss out;
    out.loss = -log_sigmoid(margin + f_positive) - mean_log;
    out.d_positive = -sigmoid(-(margin + f_positive));
    out.d_negatives.resize(n);
    for (std::size_t k = 0; k < n; ++k)
        out.d_negatives[k] =
            -temperature * weight[k] * (log_term[k] - mean_log) + weight[k] * sigmoid(f_negatives[k] + margin);
    require_finite(out.loss, "self_adversarial_loss");
    return out;
}

namespace {

TripletGradient chain(const TripletVectors& t, double coeff) {
    TripletGradient g{ComplexVector(t.head.size()), ComplexVector(t.relation.size()), ComplexVector(t.tail.size())};
    accumulate_score_gradient(t.head, t.relation, t.tail, coeff, g.head, g.relation, g.tail);
    return g;
}

template <typename ScalarLoss>
VectorLoss vector_loss(const TripletVectors& positive, std::span<const TripletVectors> negatives, ScalarLoss&& scalar) {
    std::vector<double> f_neg;
    f_neg.reserve(negatives.size());
    for (const auto& n : negatives) f_neg.push_back(complex_score(n.head, n.relation, n.tail));
    const ScoreLoss s = scalar(complex_score(positive.head, positive.relation, positive.tail), f_neg);
    VectorLoss out;
    out.loss = s.loss;
    out.positive = chain(positive, s.d_positive);
    for (std::size_t i = 0; i < negatives.size(); ++i) out.negatives.push_back(chain(negatives[i], s.d_negatives[i]));
    return out;
}

}  // namespace

VectorLoss sigmoid_triplet_loss(const TripletVectors& positive, std::span<const TripletVectors> negatives,
                                double margin) {
    return vector_loss(positive, negatives,
                       [&](double fp, std::span<const double> fn) { return sigmoid_triplet_loss(fp, fn, margin); });
}

VectorLoss self_adversarial_loss(const TripletVectors& positive, std::span<const TripletVectors> negatives,
                                 double margin, double temperature) {
    return vector_loss(positive, negatives, [&](double fp, std::span<const double> fn) {
        return self_adversarial_loss(fp, fn, margin, temperature);
    });
}

}  // namespace cand
