#include "docrep/runlength.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace docrep {
namespace runlength {

int quantize_run_length(long long length, int quantization_bins) {
    if (length < 1)
        throw std::invalid_argument("quantize_run_length: length must be >= 1");
    if (quantization_bins < 2)
        throw std::invalid_argument("quantize_run_length: need at least 2 bins");
    if (length == 1) return 0;
    // Bin b holds lengths (2^(b-1), 2^b] for b >= 1, overflow clamped.
    int b = static_cast<int>(std::bit_width(static_cast<std::uint64_t>(length - 1)));
    return std::min(b, quantization_bins - 1);
}

namespace {

// Walks one line of the region, accumulating maximal same-color runs into
// hist[dir][color] laid out as ((dir*2)+color)*Q + bin.
struct RunAccumulator {
    Eigen::VectorXd& hist;
    int q_bins;
    int dir;
    int color = -1;
    long long run = 0;

    void step(int pixel_color) {
        if (pixel_color == color) {
            ++run;
        } else {
            flush();
            color = pixel_color;
            run = 1;
        }
    }
    void flush() {
        if (run > 0)
            hist[(dir * 2 + color) * q_bins + quantize_run_length(run, q_bins)] += 1.0;
        run = 0;
        color = -1;
    }
};

}  // namespace

Eigen::VectorXd region_run_histogram(const BinaryImage& img, const Region& region, int q_bins) {
    if (q_bins < 2)
        throw std::invalid_argument("region_run_histogram: need at least 2 bins");
    Eigen::VectorXd hist = Eigen::VectorXd::Zero(8 * q_bins);
    const int x0 = region.x, y0 = region.y;
    const int x1 = region.x + region.width, y1 = region.y + region.height;
    if (region.width <= 0 || region.height <= 0) return hist;
    if (x0 < 0 || y0 < 0 || x1 > img.width || y1 > img.height)
        throw std::invalid_argument("region_run_histogram: region exceeds image bounds");

    // Colors: index 0 = black pixels (value 0), 1 = white pixels (value 1).
    auto color_at = [&](int x, int y) { return img.at(x, y) ? 1 : 0; };

    // Horizontal.
    for (int y = y0; y < y1; ++y) {
        RunAccumulator acc{hist, q_bins, 0};
        for (int x = x0; x < x1; ++x) acc.step(color_at(x, y));
        acc.flush();
    }
    // Vertical.
    for (int x = x0; x < x1; ++x) {
        RunAccumulator acc{hist, q_bins, 1};
        for (int y = y0; y < y1; ++y) acc.step(color_at(x, y));
        acc.flush();
    }
    // Diagonal "\": lines of constant x - y, stepping (+1,+1).
    for (int d = -(region.height - 1); d < region.width; ++d) {
        RunAccumulator acc{hist, q_bins, 2};
        int x = x0 + std::max(d, 0);
        int y = y0 + std::max(-d, 0);
        for (; x < x1 && y < y1; ++x, ++y) acc.step(color_at(x, y));
        acc.flush();
    }
    // Anti-diagonal "/": lines of constant x + y, stepping (+1,-1).
    for (int s = 0; s < region.width + region.height - 1; ++s) {
        RunAccumulator acc{hist, q_bins, 3};
        int x = x0 + std::max(0, s - (region.height - 1));
        int y = y0 + std::min(s, region.height - 1);
        for (; x < x1 && y >= y0; ++x, --y) acc.step(color_at(x, y));
        acc.flush();
    }
    return hist;
}

int rl_descriptor_dim(const RLConfig& config) {
    int cells = 0;
    for (int n : config.pyramid_levels) cells += n * n;
    return cells * 8 * config.quantization_bins;
}

Eigen::VectorXd rl_descriptor(const BinaryImage& img, const RLConfig& config) {
    if (img.width < 1 || img.height < 1)
        throw std::invalid_argument("rl_descriptor: empty image");
    if (config.pyramid_levels.empty())
        throw std::invalid_argument("rl_descriptor: pyramid_levels must be non-empty");
    const int q = config.quantization_bins;
    const int block = 8 * q;
    Eigen::VectorXd out(rl_descriptor_dim(config));
    int offset = 0;
    for (int n : config.pyramid_levels) {
        if (n < 1)
            throw std::invalid_argument("rl_descriptor: pyramid level must be >= 1");
        for (int cy = 0; cy < n; ++cy) {
            int ry0 = static_cast<int>(std::lround(static_cast<double>(cy) * img.height / n));
            int ry1 = static_cast<int>(std::lround(static_cast<double>(cy + 1) * img.height / n));
            for (int cx = 0; cx < n; ++cx) {
                int rx0 = static_cast<int>(std::lround(static_cast<double>(cx) * img.width / n));
                int rx1 = static_cast<int>(std::lround(static_cast<double>(cx + 1) * img.width / n));
                Region r{rx0, ry0, rx1 - rx0, ry1 - ry0};
                Eigen::VectorXd cell = region_run_histogram(img, r, q);
                if (config.per_cell_normalize) {
                    double l1 = cell.sum();
                    if (l1 > 0.0) cell /= l1;
                    cell = cell.cwiseSqrt();
                }
                out.segment(offset, block) = cell;
                offset += block;
            }
        }
    }
    if (!config.per_cell_normalize) {
        double l1 = out.lpNorm<1>();
        if (l1 > 0.0) out /= l1;
        out = out.cwiseAbs().cwiseSqrt();
    }
    return out;
}

}  // namespace runlength
}  // namespace docrep
