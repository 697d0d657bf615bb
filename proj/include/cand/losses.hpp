#pragma once

#include <span>
#include <vector>

#include "cand/embedding_store.hpp"

namespace cand {

double sigmoid(double x);
double log_sigmoid(double x);

/// gamma * exp((strength - 1) * xi).
double dynamic_margin(double gamma, double strength, double xi);

/// Loss value with derivatives w.r.t. the positive and negative scores f
/// (distances are d = -f).
struct ScoreLoss {
    double loss = 0.0;
    double d_positive = 0.0;
    std::vector<double> d_negatives;
};

/// -log s(margin - d(pos)) - sum_i (1/n) log s(d(neg_i) - margin).
ScoreLoss sigmoid_triplet_loss(double f_positive, std::span<const double> f_negatives, double margin);

/// Same shape with negatives weighted by softmax(temperature * f(neg)); the
/// derivatives include the dependence of those weights on the scores.
ScoreLoss self_adversarial_loss(double f_positive, std::span<const double> f_negatives, double margin,
                                double temperature);

/// Views of the three vectors of a triplet.
struct TripletVectors {
    std::span<const double> head;
    std::span<const double> relation;
    std::span<const double> tail;
};

struct TripletGradient {
    ComplexVector head, relation, tail;
};

struct VectorLoss {
    double loss = 0.0;
    TripletGradient positive;
    std::vector<TripletGradient> negatives;
};

VectorLoss sigmoid_triplet_loss(const TripletVectors& positive, std::span<const TripletVectors> negatives,
                                double margin);
VectorLoss self_adversarial_loss(const TripletVectors& positive, std::span<const TripletVectors> negatives,
                                 double margin, double temperature);

}  // namespace cand
