#pragma once

#include <vector>

#include <Eigen/Dense>

#include "docrep/image.hpp"
#include "docrep/linalg.hpp"

namespace docrep {
namespace patchdesc {

/// Square patch, axis-aligned, fully inside the image.
struct Patch {
    double center_x = 0.0;  // pixels
    double center_y = 0.0;
    int size = 0;  // square side in pixels
};

struct PatchGridConfig {
    std::vector<int> scales{24, 34, 48, 68, 96};
    int stride = 8;
};

/// Raw SIFT descriptors are dropped before PCA/GMM/FV when the histogram's
/// pre-normalization L2 norm falls below this (blank-paper patches).
inline constexpr double kMinGradientEnergy = 1e-6;

/// Regular dense grid of patch centers per scale; patches always lie inside
/// the image, scales larger than the image are skipped.
std::vector<Patch> dense_grid(int width, int height, const std::vector<int>& scales, int stride);

/// 128-dim SIFT histogram of the patch: 4x4 spatial cells x 8 orientation
/// bins, central-difference gradients, bilinear spatial and linear
/// orientation soft-assignment, Gaussian weighting with sigma = size/2,
/// L2-normalize / clamp at 0.2 / re-L2-normalize. Constant patches give the
/// zero vector.
Eigen::VectorXd sift128(const GrayImage& gray, const Patch& patch);

/// PCA-projected descriptor with appended normalized geometry.
struct LocalDescriptor {
    Eigen::VectorXd values;  // pca.out_dim + 3
    double norm_x = 0.0;
    double norm_y = 0.0;
    double norm_s = 0.0;
};

/// Appends (center_x/width, center_y/height, log2(size/min_scale) /
/// log2(max_scale/min_scale)) to the PCA projection. min_scale/max_scale are
/// the endpoints of the scale ladder; a single-scale ladder maps to 0.
LocalDescriptor project_augment(const Eigen::VectorXd& desc128, const Patch& patch,
                                int image_width, int image_height,
                                const linalg::PCAModel& pca,
                                int min_scale, int max_scale);

/// Dense extraction of raw descriptors with their patches; low-energy
/// descriptors already removed.
struct RawDescriptors {
    Eigen::MatrixXd values;     // T x 128
    std::vector<Patch> patches; // T entries
};
RawDescriptors extract_raw(const GrayImage& gray, const PatchGridConfig& config);

/// Projected + augmented descriptor matrix (T x (out_dim+3)) with the
/// normalized (x, y) patch coordinates used for spatial-grid assignment.
struct DescriptorSet {
    Eigen::MatrixXd values;   // T x D
    Eigen::MatrixXd norm_xy;  // T x 2
};
DescriptorSet project_augment_all(const RawDescriptors& raw, int image_width, int image_height,
                                  const linalg::PCAModel& pca, const PatchGridConfig& config);

}  // namespace patchdesc
}  // namespace docrep
