#include "docrep/fisher.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace docrep {
namespace fisher {

Eigen::VectorXd fv_raw(const Eigen::MatrixXd& descriptors, const gmm::DiagonalGMM& g) {
    const int n_comp = g.components();
    const int dim = g.dim();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * n_comp * dim);
    const Eigen::Index t = descriptors.rows();
    if (t == 0) return out;
    if (descriptors.cols() != dim)
        throw std::invalid_argument("fv_raw: descriptor dimension does not match GMM");

    const Eigen::MatrixXd gamma = gmm::posteriors_batch(descriptors, g);
    const Eigen::MatrixXd inv_sigma = g.variances.cwiseSqrt().cwiseInverse();  // N x D

    Eigen::MatrixXd mean_acc = Eigen::MatrixXd::Zero(n_comp, dim);
    Eigen::MatrixXd var_acc = Eigen::MatrixXd::Zero(n_comp, dim);
    Eigen::RowVectorXd z(dim);
    for (Eigen::Index i = 0; i < t; ++i) {
        for (int c = 0; c < n_comp; ++c) {
            z = (descriptors.row(i) - g.means.row(c)).cwiseProduct(inv_sigma.row(c));
            mean_acc.row(c) += gamma(i, c) * z;
            var_acc.row(c) += gamma(i, c) * (z.array().square() - 1.0).matrix();
        }
    }
    const double inv_t = 1.0 / static_cast<double>(t);
    for (int c = 0; c < n_comp; ++c) {
        const double wm = inv_t / std::sqrt(g.weights(c));
        const double ws = inv_t / std::sqrt(2.0 * g.weights(c));
        out.segment(c * dim, dim) = wm * mean_acc.row(c).transpose();
        out.segment((n_comp + c) * dim, dim) = ws * var_acc.row(c).transpose();
    }
    return out;
}

Eigen::VectorXd fv_finalize(const Eigen::VectorXd& raw) {
    return linalg::l2_normalize(linalg::power_normalize(raw));
}

Eigen::VectorXd fv_grid_encode(const Eigen::MatrixXd& descriptors, const Eigen::MatrixXd& norm_xy,
                               const gmm::DiagonalGMM& g, int grid, bool renormalize_global) {
    if (grid < 1)
        throw std::invalid_argument("fv_grid_encode: grid must be >= 1");
    if (norm_xy.rows() != descriptors.rows() || (descriptors.rows() > 0 && norm_xy.cols() != 2))
        throw std::invalid_argument("fv_grid_encode: norm_xy must be T x 2");
    const int block = 2 * g.components() * g.dim();
    Eigen::VectorXd out(static_cast<Eigen::Index>(grid) * grid * block);

    // Bucket descriptor indices per cell (row-major cells).
    std::vector<std::vector<Eigen::Index>> cells(static_cast<std::size_t>(grid) * grid);
    for (Eigen::Index i = 0; i < descriptors.rows(); ++i) {
        int cx = std::min(grid - 1, std::max(0, static_cast<int>(std::floor(norm_xy(i, 0) * grid))));
        int cy = std::min(grid - 1, std::max(0, static_cast<int>(std::floor(norm_xy(i, 1) * grid))));
        cells[static_cast<std::size_t>(cy) * grid + cx].push_back(i);
    }
    for (std::size_t cell = 0; cell < cells.size(); ++cell) {
        const auto& idx = cells[cell];
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(idx.size()), g.dim());
        for (std::size_t j = 0; j < idx.size(); ++j) sub.row(static_cast<Eigen::Index>(j)) = descriptors.row(idx[j]);
        out.segment(static_cast<Eigen::Index>(cell) * block, block) = fv_finalize(fv_raw(sub, g));
    }
    if (renormalize_global && grid > 1) linalg::l2_normalize_inplace(out);
    return out;
}

Eigen::VectorXd fv_pca_reduce(const Eigen::VectorXd& fv, const linalg::PCAModel& pca) {
    return linalg::l2_normalize(linalg::pca_project(fv, pca));
}

}  // namespace fisher
}  // namespace docrep
