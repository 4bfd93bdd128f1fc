#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace docrep {
namespace gmm {

/// Gaussian mixture with diagonal covariances: the visual vocabulary.
struct DiagonalGMM {
    Eigen::VectorXd weights;    // N, positive, sums to 1
    Eigen::MatrixXd means;      // N x D
    Eigen::MatrixXd variances;  // N x D, >= the fitting floor

    int components() const { return static_cast<int>(weights.size()); }
    int dim() const { return static_cast<int>(means.cols()); }
};

struct EMConfig {
    int max_iters = 100;
    double rel_tol = 1e-6;           // stop on relative log-likelihood improvement
    double variance_floor_scale = 1e-4;  // floor = scale * mean per-dim data variance
    std::uint64_t seed = 0;
    int kmeans_iters = 10;
};

struct EMReport {
    std::vector<double> avg_log_likelihood;  // one entry per EM iteration
    int iterations = 0;
    int reseeded_components = 0;
    double variance_floor = 0.0;
};

/// log N(x | mu_n, diag variances_n), evaluated in the log domain.
double log_component_density(const Eigen::VectorXd& x, const DiagonalGMM& g, int n);

/// Responsibilities gamma_n(x) via log-sum-exp; always sums to 1.
Eigen::VectorXd posteriors(const Eigen::VectorXd& x, const DiagonalGMM& g);

/// log of the mixture density at x.
double log_mixture_density(const Eigen::VectorXd& x, const DiagonalGMM& g);

/// Row-wise responsibilities for a T x D matrix (T x N output).
Eigen::MatrixXd posteriors_batch(const Eigen::MatrixXd& points, const DiagonalGMM& g);

/// EM fit with k-means++/k-means initialization. The per-iteration average
/// log-likelihood sequence is recorded in the report and is non-decreasing
/// up to floor/reseed slack. Components whose posterior mass drops below
/// 1e-8 are re-seeded from the lowest-likelihood point.
DiagonalGMM fit_em(const Eigen::MatrixXd& data, int n_components, const EMConfig& config = EMConfig{},
                   EMReport* report = nullptr);

/// k-means++ seeding followed by Lloyd iterations; exposed for tests.
Eigen::MatrixXd kmeans(const Eigen::MatrixXd& data, int k, int iters, std::uint64_t seed,
                       std::vector<int>* assignment = nullptr);

}  // namespace gmm
}  // namespace docrep
