#include "docrep/patchdesc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace docrep {
namespace patchdesc {

std::vector<Patch> dense_grid(int width, int height, const std::vector<int>& scales, int stride) {
    if (stride < 1)
        throw std::invalid_argument("dense_grid: stride must be >= 1");
    if (scales.empty())
        throw std::invalid_argument("dense_grid: scales must be non-empty");
    std::vector<Patch> patches;
    for (int s : scales) {
        if (s < 2)
            throw std::invalid_argument("dense_grid: scale must be >= 2");
        if (s > width || s > height) continue;
        const int nx = (width - s) / stride + 1;
        const int ny = (height - s) / stride + 1;
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix)
                patches.push_back(Patch{ix * stride + s / 2.0, iy * stride + s / 2.0, s});
    }
    return patches;
}

Eigen::VectorXd sift128(const GrayImage& gray, const Patch& patch) {
    const int s = patch.size;
    const int px0 = static_cast<int>(std::lround(patch.center_x - s / 2.0));
    const int py0 = static_cast<int>(std::lround(patch.center_y - s / 2.0));
    if (px0 < 0 || py0 < 0 || px0 + s > gray.width || py0 + s > gray.height)
        throw std::invalid_argument("sift128: patch exceeds image bounds");

    Eigen::VectorXd hist = Eigen::VectorXd::Zero(128);
    const double sigma = s / 2.0;
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
    const double center = (s - 1) / 2.0;
    constexpr double two_pi = 2.0 * std::numbers::pi;

    for (int v = 0; v < s; ++v) {
        const int y = py0 + v;
        for (int u = 0; u < s; ++u) {
            const int x = px0 + u;
            // Central differences, clamped at the image border.
            const double gx = 0.5 * (gray.at(std::min(x + 1, gray.width - 1), y) -
                                     gray.at(std::max(x - 1, 0), y));
            const double gy = 0.5 * (gray.at(x, std::min(y + 1, gray.height - 1)) -
                                     gray.at(x, std::max(y - 1, 0)));
            const double mag = std::sqrt(gx * gx + gy * gy);
            if (mag == 0.0) continue;

            double theta = std::atan2(gy, gx);
            if (theta < 0.0) theta += two_pi;
            const double ob = theta * 8.0 / two_pi;  // orientation in bin units
            int o0 = static_cast<int>(std::floor(ob)) & 7;
            const double wo = ob - std::floor(ob);

            // Spatial cell coordinates in [-0.5, 3.5].
            const double cx = (u + 0.5) * 4.0 / s - 0.5;
            const double cy = (v + 0.5) * 4.0 / s - 0.5;
            const int cx0 = static_cast<int>(std::floor(cx));
            const int cy0 = static_cast<int>(std::floor(cy));
            const double wx = cx - cx0;
            const double wy = cy - cy0;

            const double dx = u - center;
            const double dy = v - center;
            const double w = mag * std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);

            for (int j = 0; j < 2; ++j) {
                const int cyj = cy0 + j;
                if (cyj < 0 || cyj > 3) continue;
                const double wyj = j ? wy : 1.0 - wy;
                for (int i = 0; i < 2; ++i) {
                    const int cxi = cx0 + i;
                    if (cxi < 0 || cxi > 3) continue;
                    const double wxi = i ? wx : 1.0 - wx;
                    const int cell = (cyj * 4 + cxi) * 8;
                    hist[cell + o0] += w * wyj * wxi * (1.0 - wo);
                    hist[cell + ((o0 + 1) & 7)] += w * wyj * wxi * wo;
                }
            }
        }
    }

    double n = hist.norm();
    if (n < kMinGradientEnergy) return Eigen::VectorXd::Zero(128);
    hist /= n;
    hist = hist.cwiseMin(0.2);
    n = hist.norm();
    if (n > 0.0) hist /= n;
    return hist;
}

LocalDescriptor project_augment(const Eigen::VectorXd& desc128, const Patch& patch,
                                int image_width, int image_height,
                                const linalg::PCAModel& pca,
                                int min_scale, int max_scale) {
    LocalDescriptor out;
    out.norm_x = patch.center_x / image_width;
    out.norm_y = patch.center_y / image_height;
    const double denom = std::log2(static_cast<double>(max_scale) / min_scale);
    out.norm_s = denom > 0.0 ? std::log2(static_cast<double>(patch.size) / min_scale) / denom : 0.0;

    Eigen::VectorXd proj = linalg::pca_project(desc128, pca);
    out.values.resize(proj.size() + 3);
    out.values.head(proj.size()) = proj;
    out.values(proj.size()) = out.norm_x;
    out.values(proj.size() + 1) = out.norm_y;
    out.values(proj.size() + 2) = out.norm_s;
    return out;
}

RawDescriptors extract_raw(const GrayImage& gray, const PatchGridConfig& config) {
    RawDescriptors out;
    std::vector<Patch> grid = dense_grid(gray.width, gray.height, config.scales, config.stride);
    std::vector<Eigen::VectorXd> kept;
    kept.reserve(grid.size());
    for (const Patch& p : grid) {
        Eigen::VectorXd d = sift128(gray, p);
        if (d.isZero(0.0)) continue;  // below the energy threshold
        kept.push_back(std::move(d));
        out.patches.push_back(p);
    }
    out.values.resize(static_cast<Eigen::Index>(kept.size()), 128);
    for (std::size_t i = 0; i < kept.size(); ++i) out.values.row(static_cast<Eigen::Index>(i)) = kept[i];
    return out;
}

DescriptorSet project_augment_all(const RawDescriptors& raw, int image_width, int image_height,
                                  const linalg::PCAModel& pca, const PatchGridConfig& config) {
    const auto [min_it, max_it] = std::minmax_element(config.scales.begin(), config.scales.end());
    const int min_scale = *min_it;
    const int max_scale = *max_it;
    const Eigen::Index t = raw.values.rows();
    DescriptorSet out;
    out.values.resize(t, pca.out_dim() + 3);
    out.norm_xy.resize(t, 2);
    if (t == 0) return out;
    out.values.leftCols(pca.out_dim()) = linalg::pca_project_rows(raw.values, pca);
    const double denom = std::log2(static_cast<double>(max_scale) / min_scale);
    for (Eigen::Index i = 0; i < t; ++i) {
        const Patch& p = raw.patches[static_cast<std::size_t>(i)];
        const double nx = p.center_x / image_width;
        const double ny = p.center_y / image_height;
        const double ns = denom > 0.0 ? std::log2(static_cast<double>(p.size) / min_scale) / denom : 0.0;
        out.values(i, pca.out_dim()) = nx;
        out.values(i, pca.out_dim() + 1) = ny;
        out.values(i, pca.out_dim() + 2) = ns;
        out.norm_xy(i, 0) = nx;
        out.norm_xy(i, 1) = ny;
    }
    return out;
}

}  // namespace patchdesc
}  // namespace docrep
