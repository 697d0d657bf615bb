#include "cand/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cand/artifact.hpp"
#include "cand/error.hpp"
#include "cand/losses.hpp"

namespace cand {

using nlohmann::json;

namespace {

std::size_t check_training_set(const FeatureMatrix& x, std::span<const int> y) {
    if (x.size() != y.size()) throw FitError("feature and label counts differ");
    if (x.empty()) throw FitError("cannot fit on an empty training set");
    const std::size_t width = x.front().size();
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].size() != width) throw FitError("feature rows differ in width");
        for (double v : x[i])
            if (!std::isfinite(v)) throw FitError("non-finite feature value");
        if (y[i] == 1) pos = true;
        else if (y[i] == 0) neg = true;
        else throw FitError("labels must be 0 or 1");
    }
    if (!pos || !neg) throw FitError("training set holds a single class");
    return width;
}

}  // namespace

std::vector<double> LogisticRegression::prepare(std::span<const double> x) const {
    std::vector<double> row(x.begin(), x.end());
    if (options_.normalize_rows) {
        double norm = 0.0;
        for (double v : row) norm += v * v;
        norm = std::sqrt(norm);
        if (norm > 1e-12)
            for (double& v : row) v /= norm;
    }
    return row;
}

void LogisticRegression::fit(const FeatureMatrix& x, std::span<const int> y) {
    const std::size_t width = check_training_set(x, y);
    const std::size_t n = x.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    FeatureMatrix z;
    z.reserve(n);
    for (const auto& row : x) z.push_back(prepare(row));
    mean_.assign(width, 0.0);
    scale_.assign(width, 1.0);
    for (const auto& row : z)
        for (std::size_t j = 0; j < width; ++j) mean_[j] += row[j] * inv_n;
    for (std::size_t j = 0; j < width; ++j) {
        double var = 0.0;
        for (const auto& row : z) var += (row[j] - mean_[j]) * (row[j] - mean_[j]) * inv_n;
        scale_[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    for (auto& row : z)
        for (std::size_t j = 0; j < width; ++j) row[j] = (row[j] - mean_[j]) / scale_[j];

    weights_.assign(width, 0.0);
    const double prior = std::accumulate(y.begin(), y.end(), 0.0) * inv_n;
    bias_ = std::log(prior / (1.0 - prior));
    std::vector<double> grad(width);
    for (std::size_t step = 0; step < options_.steps; ++step) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = bias_;
            for (std::size_t j = 0; j < width; ++j) s += weights_[j] * z[i][j];
            const double r = (sigmoid(s) - y[i]) * inv_n;
            grad_b += r;
            for (std::size_t j = 0; j < width; ++j) grad[j] += r * z[i][j];
        }
        for (std::size_t j = 0; j < width; ++j)
            weights_[j] -= options_.learning_rate * (grad[j] + options_.lambda * weights_[j]);
        bias_ -= options_.learning_rate * grad_b;
    }
    fitted_ = true;
}

double LogisticRegression::predict_probability(std::span<const double> x) const {
    if (!fitted_) throw FitError("classifier used before fit");
    if (x.size() != weights_.size()) throw InvalidArgument("feature width does not match the classifier");
    const auto row = prepare(x);
    double s = bias_;
    for (std::size_t j = 0; j < row.size(); ++j) s += weights_[j] * (row[j] - mean_[j]) / scale_[j];
    return sigmoid(s);
}

json LogisticRegression::to_json() const {
    return {{"lambda", options_.lambda}, {"steps", options_.steps}, {"learning_rate", options_.learning_rate},
            {"normalize_rows", options_.normalize_rows}, {"mean", mean_}, {"scale", scale_}, {"weights", weights_}, {"bias", bias_}};
}

LogisticRegression LogisticRegression::from_json(const json& j) {
    LogisticRegression m({j.at("lambda").get<double>(), j.at("steps").get<std::size_t>(),
                          j.at("learning_rate").get<double>(), j.value("normalize_rows", true)});
    m.mean_ = j.at("mean").get<std::vector<double>>();
    m.scale_ = j.at("scale").get<std::vector<double>>();
    m.weights_ = j.at("weights").get<std::vector<double>>();
    m.bias_ = j.at("bias").get<double>();
    if (m.mean_.size() != m.weights_.size() || m.scale_.size() != m.weights_.size())
        throw ArtifactError("logistic classifier vectors differ in width");
    m.fitted_ = true;
    return m;
}

namespace {

struct SplitSearch {
    const FeatureMatrix& x;
    std::span<const double> g, h;
    const GradientBoosting::Options& opt;
    std::vector<GradientBoosting::Node>& nodes;

    double leaf_value(const std::vector<std::size_t>& rows) const {
        double sg = 0.0, sh = 0.0;
        for (auto i : rows) {
            sg += g[i];
            sh += h[i];
        }
        return -sg / (sh + opt.leaf_regularization);
    }

    int build(const std::vector<std::size_t>& rows, std::size_t depth) {
        const int index = static_cast<int>(nodes.size());
        nodes.push_back({});
        nodes[static_cast<std::size_t>(index)].value = leaf_value(rows);
        if (depth == 0 || rows.size() < 2) return index;

        double g_total = 0.0, h_total = 0.0;
        for (auto i : rows) {
            g_total += g[i];
            h_total += h[i];
        }
        const double lambda = opt.leaf_regularization;
        const double parent = g_total * g_total / (h_total + lambda);
        double best_gain = 1e-12;
        int best_feature = -1;
        double best_threshold = 0.0;
        std::vector<std::size_t> order(rows);
        const std::size_t width = x.front().size();
        for (std::size_t f = 0; f < width; ++f) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return x[a][f] < x[b][f] || (x[a][f] == x[b][f] && a < b);
            });
            double gl = 0.0, hl = 0.0;
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                gl += g[order[k]];
                hl += h[order[k]];
                const double v = x[order[k]][f], next = x[order[k + 1]][f];
                if (v == next) continue;
                const double gr = g_total - gl, hr = h_total - hl;
                if (hl < opt.min_hessian || hr < opt.min_hessian) continue;
                const double gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (v + next);
                }
            }
        }
        if (best_feature < 0) return index;
        std::vector<std::size_t> left, right;
        for (auto i : rows) (x[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right).push_back(i);
        const int l = build(left, depth - 1);
        const int r = build(right, depth - 1);
        auto& node = nodes[static_cast<std::size_t>(index)];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = l;
        node.right = r;
        return index;
    }
};

double tree_value(const std::vector<GradientBoosting::Node>& nodes, std::span<const double> x) {
    std::size_t i = 0;
    while (nodes[i].feature >= 0)
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left
                                                                                                       : nodes[i].right);
    return nodes[i].value;
}

}  // namespace

void GradientBoosting::fit(const FeatureMatrix& x, std::span<const int> y) {
    check_training_set(x, y);
    const std::size_t n = x.size();
    const double prior = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    base_ = std::log(prior / (1.0 - prior));
    trees_.clear();
    std::vector<double> raw(n, base_), g(n), h(n);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t t = 0; t < options_.trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(raw[i]);
            g[i] = p - y[i];
            h[i] = std::max(p * (1.0 - p), 1e-12);
        }
        std::vector<Node> nodes;
        SplitSearch{x, g, h, options_, nodes}.build(all, options_.depth);
        for (auto& node : nodes) node.value *= options_.learning_rate;
        for (std::size_t i = 0; i < n; ++i) raw[i] += tree_value(nodes, x[i]);
        trees_.push_back(std::move(nodes));
    }
    fitted_ = true;
}

double GradientBoosting::raw_score(std::span<const double> x) const {
    double s = base_;
    for (const auto& tree : trees_) s += tree_value(tree, x);
    return s;
}

double GradientBoosting::predict_probability(std::span<const double> x) const {
    if (!fitted_) throw FitError("classifier used before fit");
    return sigmoid(raw_score(x));
}

json GradientBoosting::to_json() const {
    json trees = json::array();
    for (const auto& tree : trees_) {
        json nodes = json::array();
        for (const auto& n : tree)
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
        trees.push_back(std::move(nodes));
    }
    return {{"trees_count", options_.trees}, {"depth", options_.depth}, {"learning_rate", options_.learning_rate},
            {"base", base_}, {"trees", trees}};
}

GradientBoosting GradientBoosting::from_json(const json& j) {
    Options opt;
    opt.trees = j.at("trees_count").get<std::size_t>();
    opt.depth = j.at("depth").get<std::size_t>();
    opt.learning_rate = j.at("learning_rate").get<double>();
    GradientBoosting m(opt);
    m.base_ = j.at("base").get<double>();
    for (const auto& tree : j.at("trees")) {
        std::vector<Node> nodes;
        for (const auto& n : tree)
            nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                             n.at(4).get<double>()});
        m.trees_.push_back(std::move(nodes));
    }
    m.fitted_ = true;
    return m;
}

std::unique_ptr<Classifier> fit_builtin_classifier(const FeatureMatrix& features, std::span<const int> labels,
                                                   const std::string& kind, std::uint64_t) {
    std::unique_ptr<Classifier> model;
    if (kind == "logistic") model = std::make_unique<LogisticRegression>();
    else if (kind == "gbdt") model = std::make_unique<GradientBoosting>();
    else throw ConfigError("unknown classifier kind '" + kind + "' (expected logistic or gbdt)");
    model->fit(features, labels);
    return model;
}

json classifier_artifact(const Classifier& classifier) {
    json doc = artifact_header("classifier");
    doc["classifier"] = classifier.kind();
    doc["parameters"] = classifier.to_json();
    return doc;
}

std::unique_ptr<Classifier> classifier_from_json(const json& doc) {
    check_artifact(doc, "classifier");
    const auto kind = doc.at("classifier").get<std::string>();
    try {
        if (kind == "logistic") return std::make_unique<LogisticRegression>(LogisticRegression::from_json(doc.at("parameters")));
        if (kind == "gbdt") return std::make_unique<GradientBoosting>(GradientBoosting::from_json(doc.at("parameters")));
    } catch (const json::exception& e) {
        throw ArtifactError(std::string("malformed classifier artifact: ") + e.what());
    }
    throw ArtifactError("unknown classifier kind '" + kind + "'");
}

}  // namespace cand
