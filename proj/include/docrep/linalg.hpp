#pragma once

#include <Eigen/Dense>

namespace docrep {
namespace linalg {

/// Linear PCA: orthonormal component rows sorted by decreasing explained
/// variance. Sign convention: the largest-magnitude entry of each component
/// is positive, so fitted models are reproducible bit-for-bit.
struct PCAModel {
    Eigen::VectorXd mean;                 // D
    Eigen::MatrixXd components;           // out_dim x D, orthonormal rows
    Eigen::VectorXd explained_variances;  // out_dim, non-increasing

    int in_dim() const { return static_cast<int>(mean.size()); }
    int out_dim() const { return static_cast<int>(components.rows()); }
};

/// Fits by eigendecomposition of the sample covariance (1/(n-1)); switches to
/// the Gram-matrix route when n < D. Requires n >= 2 and
/// out_dim <= min(n-1, D); throws when the achievable rank is below out_dim,
/// naming the rank.
PCAModel fit_pca(const Eigen::MatrixXd& data, int out_dim);

/// components * (x - mean).
Eigen::VectorXd pca_project(const Eigen::VectorXd& x, const PCAModel& model);

/// Row-wise projection of an n x D matrix.
Eigen::MatrixXd pca_project_rows(const Eigen::MatrixXd& rows, const PCAModel& model);

/// Zero input stays zero.
Eigen::VectorXd l2_normalize(const Eigen::VectorXd& x);
void l2_normalize_inplace(Eigen::VectorXd& x);
void l2_normalize_inplace(Eigen::VectorXf& x);

/// Signed component-wise square root: sign(x) * sqrt(|x|).
Eigen::VectorXd power_normalize(const Eigen::VectorXd& x);

}  // namespace linalg
}  // namespace docrep
