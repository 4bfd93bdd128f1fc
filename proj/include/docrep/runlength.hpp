#pragma once

#include <vector>

#include <Eigen/Dense>

#include "docrep/image.hpp"

namespace docrep {
namespace runlength {

/// Axis-aligned region in pixel coordinates, [x, x+width) x [y, y+height).
struct Region {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
};

struct RLConfig {
    int quantization_bins = 11;                     // Q = q + 2
    std::vector<int> pyramid_levels{1, 2, 4, 6, 8}; // n x n cells per level
    bool per_cell_normalize = true;  // false: single L1+sqrt over the full vector
};

/// Bin index for a run of the given length under the logarithmic scheme
/// [1], [2], [3-4], [5-8], ..., [>= 2^(Q-2)+1]. Returns an index in [0, Q-1];
/// throws std::invalid_argument for length < 1.
int quantize_run_length(long long length, int quantization_bins);

/// Run-count histograms of a region: 4 directions (horizontal, vertical,
/// diagonal, anti-diagonal) x 2 colors (black, white) x Q bins, in that
/// order. Runs are maximal same-color sequences truncated at the region
/// boundary. An empty region yields the zero vector.
Eigen::VectorXd region_run_histogram(const BinaryImage& img, const Region& region,
                                     int quantization_bins);

/// Full spatial-pyramid RL descriptor: for every level n, the image is split
/// into n x n cells (boundaries at round(i*dim/n)); each cell histogram is
/// L1-normalized and component-wise square-rooted, then cells are
/// concatenated in level order, row-major within a level. Length is
/// (sum of n^2) * 8 * Q: 10648 under the defaults.
Eigen::VectorXd rl_descriptor(const BinaryImage& img, const RLConfig& config = RLConfig{});

/// (sum of n^2) * 8 * Q for the given config.
int rl_descriptor_dim(const RLConfig& config);

}  // namespace runlength
}  // namespace docrep
