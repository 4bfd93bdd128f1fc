#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace docrep {

/// Row-major grayscale raster, intensities in [0,1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::int64_t pixel_count() const { return static_cast<std::int64_t>(width) * height; }
};

/// Row-major bilevel raster: 1 = white (paper), 0 = black (ink).
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::int64_t pixel_count() const { return static_cast<std::int64_t>(width) * height; }
};

/// Row-major interleaved RGB, channels in [0,1].
struct ColorImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;  // 3 * width * height
};

namespace imaging {

/// Luminance 0.299 R + 0.587 G + 0.114 B, clamped to [0,1].
/// Throws std::invalid_argument on an empty image.
GrayImage to_grayscale(const ColorImage& rgb);

/// Intensity >= threshold maps to white. threshold must lie in (0,1).
BinaryImage binarize(const GrayImage& gray, float threshold = 0.5f);

/// Downscales by f = sqrt(max_pixels / (w*h)) with bilinear interpolation when
/// the image exceeds max_pixels; never upscales. Scaled dimensions are floored
/// with a minimum of 1, so the output area never exceeds max_pixels.
GrayImage downscale_to_max_pixels(const GrayImage& img, std::int64_t max_pixels);

/// Bilinear resample to an explicit size (used by downscale_to_max_pixels).
GrayImage resize_bilinear(const GrayImage& img, int out_width, int out_height);

GrayImage binary_to_gray(const BinaryImage& img);

}  // namespace imaging
}  // namespace docrep
