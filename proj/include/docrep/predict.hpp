#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace docrep {
namespace predict {

/// One-vs-rest linear SVM: one weight row + bias per class, class ids sorted
/// ascending.
struct LinearSVMModel {
    Eigen::MatrixXd weights;  // C x D
    Eigen::VectorXd biases;   // C
    std::vector<int> class_ids;
    double lambda = 0.0;
};

/// Hinge-loss SGD (Pegasos schedule, learning rate 1/(lambda*t), bias
/// unregularized) on L2-regularized one-vs-rest problems.
LinearSVMModel train_linear_svm(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                double lambda, int epochs, std::uint64_t seed);

/// argmax of per-class scores w_c . x + b_c; ties go to the lowest class id.
int svm_predict(const Eigen::VectorXd& x, const LinearSVMModel& model);

/// lambda/2 ||w||^2 + mean hinge loss of one binary subproblem (test support).
double svm_binary_objective(const Eigen::MatrixXd& features, const std::vector<double>& y_pm1,
                            const Eigen::VectorXd& w, double bias, double lambda);

struct NCMModel {
    Eigen::MatrixXd centroids;  // C x D
    std::vector<int> class_ids;
};

/// Per-class arithmetic mean of the training features, as stored.
NCMModel ncm_fit(const Eigen::MatrixXd& features, const std::vector<int>& labels);

/// Euclidean nearest centroid; ties go to the lowest class id.
int ncm_predict(const Eigen::VectorXd& x, const NCMModel& model);

}  // namespace predict
}  // namespace docrep
