#pragma once

#include <Eigen/Dense>

#include "docrep/gmm.hpp"
#include "docrep/linalg.hpp"

namespace docrep {
namespace fisher {

/// Unnormalized Fisher-Vector of a descriptor set under a diagonal GMM:
/// the closed-form mean and variance gradients
///   G_mu[n,d]  = 1/(T sqrt(w_n))   * sum_t gamma_n(x_t) (x_t^d - mu_n^d)/s_n^d
///   G_sig[n,d] = 1/(T sqrt(2 w_n)) * sum_t gamma_n(x_t) [((x_t^d - mu_n^d)/s_n^d)^2 - 1]
/// concatenated as [all mean gradients n=1..N | all variance gradients
/// n=1..N], dims contiguous within a component. Length 2*N*D. T = 0 yields
/// the zero vector.
Eigen::VectorXd fv_raw(const Eigen::MatrixXd& descriptors, const gmm::DiagonalGMM& g);

/// power_normalize then l2_normalize; zero stays zero.
Eigen::VectorXd fv_finalize(const Eigen::VectorXd& raw);

/// Spatial-grid variant: descriptors are assigned to a g x g cell by their
/// normalized patch center (floor(norm * grid), clamped), each cell is
/// encoded and finalized independently, cells concatenate row-major, and by
/// default the concatenation is re-L2-normalized globally. grid = 1 is
/// bit-identical to fv_finalize(fv_raw(...)).
Eigen::VectorXd fv_grid_encode(const Eigen::MatrixXd& descriptors, const Eigen::MatrixXd& norm_xy,
                               const gmm::DiagonalGMM& g, int grid, bool renormalize_global = true);

/// PCA projection of a finalized FV followed by L2 normalization (the
/// FV256+PCA shallow feature).
Eigen::VectorXd fv_pca_reduce(const Eigen::VectorXd& fv, const linalg::PCAModel& pca);

}  // namespace fisher
}  // namespace docrep
