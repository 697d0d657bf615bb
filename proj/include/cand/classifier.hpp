#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace cand {

using FeatureMatrix = std::vector<std::vector<double>>;

class Classifier {
public:
    virtual ~Classifier() = default;

    /// labels: 1 = deteriorating. Throws FitError unless both classes occur.
    virtual void fit(const FeatureMatrix& features, std::span<const int> labels) = 0;
    /// Throws FitError before fit.
    virtual double predict_probability(std::span<const double> features) const = 0;
    virtual std::string kind() const = 0;
    virtual nlohmann::json to_json() const = 0;
};

/// L2-regularized logistic regression on standardized features, fit by
/// full-batch gradient descent. Rows are first scaled to unit length by
/// default: prefix representations shrink as the prefix grows, and only
/// their direction should drive the decision.
class LogisticRegression : public Classifier {
public:
    struct Options {
        double lambda = 1e-3;
        std::size_t steps = 2000;
        double learning_rate = 0.5;
        bool normalize_rows = true;
    };

    LogisticRegression() = default;
    explicit LogisticRegression(Options options) : options_(options) {}

    void fit(const FeatureMatrix& features, std::span<const int> labels) override;
    double predict_probability(std::span<const double> features) const override;
    std::string kind() const override { return "logistic"; }
    nlohmann::json to_json() const override;
    static LogisticRegression from_json(const nlohmann::json& j);

private:
    std::vector<double> prepare(std::span<const double> x) const;

    Options options_;
    bool fitted_ = false;
    std::vector<double> mean_, scale_, weights_;
    double bias_ = 0.0;
};

/// Gradient-boosted depth-limited regression trees under logistic loss with
/// Newton leaf values.
class GradientBoosting : public Classifier {
public:
    struct Options {
        std::size_t trees = 100;
        std::size_t depth = 2;
        double learning_rate = 0.1;
        double min_hessian = 1e-3;
        double leaf_regularization = 1.0;
    };

    GradientBoosting() = default;
    explicit GradientBoosting(Options options) : options_(options) {}

    void fit(const FeatureMatrix& features, std::span<const int> labels) override;
    double predict_probability(std::span<const double> features) const override;
    std::string kind() const override { return "gbdt"; }
    nlohmann::json to_json() const override;
    static GradientBoosting from_json(const nlohmann::json& j);

    struct Node {
        int feature = -1;       // -1 marks a leaf
        double threshold = 0.0; // go left when x[feature] <= threshold
        int left = -1, right = -1;
        double value = 0.0;
    };

private:
    double raw_score(std::span<const double> x) const;

    Options options_;
    bool fitted_ = false;
    double base_ = 0.0;
    std::vector<std::vector<Node>> trees_;
};

/// kind: "logistic" or "gbdt". The builtin learners are deterministic, so
/// the seed only feeds future stochastic variants.
std::unique_ptr<Classifier> fit_builtin_classifier(const FeatureMatrix& features, std::span<const int> labels,
                                                   const std::string& kind, std::uint64_t seed);

/// Inverse of Classifier::to_json (with artifact header).
std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& doc);
nlohmann::json classifier_artifact(const Classifier& classifier);

}  // namespace cand
