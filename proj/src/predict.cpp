#include "docrep/predict.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace docrep {
namespace predict {

namespace {

std::vector<int> sorted_class_ids(const std::vector<int>& labels) {
    std::set<int> ids(labels.begin(), labels.end());
    return {ids.begin(), ids.end()};
}

}  // namespace

LinearSVMModel train_linear_svm(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                double lambda, int epochs, std::uint64_t seed) {
    const Eigen::Index n = features.rows();
    if (n == 0 || labels.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("train_linear_svm: features/labels mismatch");
    if (lambda <= 0.0 || epochs < 1)
        throw std::invalid_argument("train_linear_svm: lambda must be > 0 and epochs >= 1");

    LinearSVMModel model;
    model.class_ids = sorted_class_ids(labels);
    if (model.class_ids.size() < 2)
        throw std::invalid_argument("train_linear_svm: need at least 2 classes");
    const int n_classes = static_cast<int>(model.class_ids.size());
    model.lambda = lambda;
    model.weights = Eigen::MatrixXd::Zero(n_classes, features.cols());
    model.biases = Eigen::VectorXd::Zero(n_classes);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    for (int c = 0; c < n_classes; ++c) {
        const int positive = model.class_ids[static_cast<std::size_t>(c)];
        Eigen::VectorXd w = Eigen::VectorXd::Zero(features.cols());
        double b = 0.0;
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(c) * 0x9e3779b97f4a7c15ull);
        long long t = 0;
        for (int epoch = 0; epoch < epochs; ++epoch) {
            std::shuffle(order.begin(), order.end(), rng);
            for (Eigen::Index idx : order) {
                ++t;
                const double eta = 1.0 / (lambda * static_cast<double>(t));
                const double y = labels[static_cast<std::size_t>(idx)] == positive ? 1.0 : -1.0;
                const double margin = y * (w.dot(features.row(idx)) + b);
                w *= 1.0 - eta * lambda;
                if (margin < 1.0) {
                    w += eta * y * features.row(idx).transpose();
                    b += eta * y;
                }
            }
        }
        model.weights.row(c) = w.transpose();
        model.biases(c) = b;
    }
    return model;
}

int svm_predict(const Eigen::VectorXd& x, const LinearSVMModel& model) {
    if (x.size() != model.weights.cols())
        throw std::invalid_argument("svm_predict: dimension mismatch");
    Eigen::VectorXd scores = model.weights * x + model.biases;
    int best = 0;
    for (int c = 1; c < scores.size(); ++c)
        if (scores(c) > scores(best)) best = c;  // strict: ties keep the lowest id
    return model.class_ids[static_cast<std::size_t>(best)];
}

double svm_binary_objective(const Eigen::MatrixXd& features, const std::vector<double>& y_pm1,
                            const Eigen::VectorXd& w, double bias, double lambda) {
    double hinge = 0.0;
    for (Eigen::Index i = 0; i < features.rows(); ++i)
        hinge += std::max(0.0, 1.0 - y_pm1[static_cast<std::size_t>(i)] * (features.row(i).dot(w) + bias));
    return 0.5 * lambda * w.squaredNorm() + hinge / static_cast<double>(features.rows());
}

NCMModel ncm_fit(const Eigen::MatrixXd& features, const std::vector<int>& labels) {
    const Eigen::Index n = features.rows();
    if (n == 0 || labels.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("ncm_fit: features/labels mismatch");
    NCMModel model;
    model.class_ids = sorted_class_ids(labels);
    model.centroids = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(model.class_ids.size()), features.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.class_ids.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto it = std::lower_bound(model.class_ids.begin(), model.class_ids.end(),
                                         labels[static_cast<std::size_t>(i)]);
        const Eigen::Index c = it - model.class_ids.begin();
        model.centroids.row(c) += features.row(i);
        counts(c) += 1.0;
    }
    for (Eigen::Index c = 0; c < counts.size(); ++c) model.centroids.row(c) /= counts(c);
    return model;
}

int ncm_predict(const Eigen::VectorXd& x, const NCMModel& model) {
    if (x.size() != model.centroids.cols())
        throw std::invalid_argument("ncm_predict: dimension mismatch");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < model.centroids.rows(); ++c) {
        const double d = (model.centroids.row(c).transpose() - x).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return model.class_ids[static_cast<std::size_t>(best)];
}

}  // namespace predict
}  // namespace docrep
