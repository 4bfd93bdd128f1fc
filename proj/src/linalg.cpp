#include "docrep/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace docrep {
namespace linalg {

namespace {

// Flips each row so its largest-magnitude entry is positive.
void fix_signs(Eigen::MatrixXd& components) {
    for (Eigen::Index r = 0; r < components.rows(); ++r) {
        Eigen::Index imax = 0;
        components.row(r).cwiseAbs().maxCoeff(&imax);
        if (components(r, imax) < 0.0) components.row(r) *= -1.0;
    }
}

}  // namespace

PCAModel fit_pca(const Eigen::MatrixXd& data, int out_dim) {
    const Eigen::Index n = data.rows();
    const Eigen::Index dim = data.cols();
    if (n < 2)
        throw std::invalid_argument("fit_pca: need at least 2 samples");
    if (out_dim < 1 || out_dim > std::min<Eigen::Index>(n - 1, dim))
        throw std::invalid_argument("fit_pca: out_dim must lie in [1, min(n-1, D)]");

    PCAModel model;
    model.mean = data.colwise().mean();
    Eigen::MatrixXd centered = data.rowwise() - model.mean.transpose();
    const double norm = 1.0 / static_cast<double>(n - 1);

    Eigen::VectorXd eigvals;
    Eigen::MatrixXd comps(out_dim, dim);
    if (n < dim) {
        // Gram route: eigenvectors u of X X^T / (n-1) map to X^T u / sqrt(l (n-1)).
        Eigen::MatrixXd gram = centered * centered.transpose() * norm;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("fit_pca: eigendecomposition failed");
        eigvals = solver.eigenvalues().reverse();
        const double tol = std::max<double>(n, dim) * 1e-12 * std::max(eigvals(0), 0.0);
        int rank = 0;
        while (rank < eigvals.size() && eigvals(rank) > tol) ++rank;
        if (rank < out_dim)
            throw std::invalid_argument("fit_pca: requested " + std::to_string(out_dim) +
                                        " components but achievable rank is " + std::to_string(rank));
        for (int k = 0; k < out_dim; ++k) {
            Eigen::VectorXd u = solver.eigenvectors().col(n - 1 - k);
            comps.row(k) = (centered.transpose() * u).transpose() /
                           std::sqrt(eigvals(k) * static_cast<double>(n - 1));
        }
    } else {
        Eigen::MatrixXd cov = centered.transpose() * centered * norm;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("fit_pca: eigendecomposition failed");
        eigvals = solver.eigenvalues().reverse();
        const double tol = std::max<double>(n, dim) * 1e-12 * std::max(eigvals(0), 0.0);
        int rank = 0;
        while (rank < eigvals.size() && eigvals(rank) > tol) ++rank;
        if (rank < out_dim)
            throw std::invalid_argument("fit_pca: requested " + std::to_string(out_dim) +
                                        " components but achievable rank is " + std::to_string(rank));
        for (int k = 0; k < out_dim; ++k)
            comps.row(k) = solver.eigenvectors().col(dim - 1 - k).transpose();
    }
    fix_signs(comps);
    model.components = std::move(comps);
    model.explained_variances = eigvals.head(out_dim).cwiseMax(0.0);
    return model;
}

Eigen::VectorXd pca_project(const Eigen::VectorXd& x, const PCAModel& model) {
    if (x.size() != model.mean.size())
        throw std::invalid_argument("pca_project: dimension mismatch");
    return model.components * (x - model.mean);
}

Eigen::MatrixXd pca_project_rows(const Eigen::MatrixXd& rows, const PCAModel& model) {
    if (rows.cols() != model.mean.size())
        throw std::invalid_argument("pca_project_rows: dimension mismatch");
    return (rows.rowwise() - model.mean.transpose()) * model.components.transpose();
}

Eigen::VectorXd l2_normalize(const Eigen::VectorXd& x) {
    Eigen::VectorXd out = x;
    l2_normalize_inplace(out);
    return out;
}

void l2_normalize_inplace(Eigen::VectorXd& x) {
    double n = x.norm();
    if (n > 0.0) x /= n;
}

void l2_normalize_inplace(Eigen::VectorXf& x) {
    float n = x.norm();
    if (n > 0.0f) x /= n;
}

Eigen::VectorXd power_normalize(const Eigen::VectorXd& x) {
    Eigen::VectorXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double v = x(i);
        out(i) = v >= 0.0 ? std::sqrt(v) : -std::sqrt(-v);
    }
    return out;
}

}  // namespace linalg
}  // namespace docrep
