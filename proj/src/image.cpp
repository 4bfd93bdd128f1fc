#include "docrep/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace docrep {
namespace imaging {

GrayImage to_grayscale(const ColorImage& rgb) {
    if (rgb.width < 1 || rgb.height < 1 || rgb.data.empty())
        throw std::invalid_argument("to_grayscale: empty image");
    if (rgb.data.size() != static_cast<std::size_t>(rgb.width) * rgb.height * 3)
        throw std::invalid_argument("to_grayscale: data size does not match 3-channel dimensions");
    GrayImage out;
    out.width = rgb.width;
    out.height = rgb.height;
    out.data.resize(static_cast<std::size_t>(rgb.width) * rgb.height);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        float y = 0.299f * rgb.data[3 * i] + 0.587f * rgb.data[3 * i + 1] + 0.114f * rgb.data[3 * i + 2];
        out.data[i] = std::clamp(y, 0.0f, 1.0f);
    }
    return out;
}

BinaryImage binarize(const GrayImage& gray, float threshold) {
    if (gray.width < 1 || gray.height < 1)
        throw std::invalid_argument("binarize: empty image");
    if (!(threshold > 0.0f && threshold < 1.0f))
        throw std::invalid_argument("binarize: threshold must lie in (0,1)");
    BinaryImage out;
    out.width = gray.width;
    out.height = gray.height;
    out.data.resize(gray.data.size());
    for (std::size_t i = 0; i < gray.data.size(); ++i)
        out.data[i] = gray.data[i] >= threshold ? 1 : 0;
    return out;
}

GrayImage resize_bilinear(const GrayImage& img, int out_width, int out_height) {
    if (out_width < 1 || out_height < 1)
        throw std::invalid_argument("resize_bilinear: output dimensions must be >= 1");
    GrayImage out;
    out.width = out_width;
    out.height = out_height;
    out.data.resize(static_cast<std::size_t>(out_width) * out_height);
    const double sx = static_cast<double>(img.width) / out_width;
    const double sy = static_cast<double>(img.height) / out_height;
    for (int y = 0; y < out_height; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double wy = fy - y0;
        int y1 = std::min(y0 + 1, img.height - 1);
        y0 = std::clamp(y0, 0, img.height - 1);
        for (int x = 0; x < out_width; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double wx = fx - x0;
            int x1 = std::min(x0 + 1, img.width - 1);
            x0 = std::clamp(x0, 0, img.width - 1);
            double v = (1.0 - wy) * ((1.0 - wx) * img.at(x0, y0) + wx * img.at(x1, y0)) +
                       wy * ((1.0 - wx) * img.at(x0, y1) + wx * img.at(x1, y1));
            out.at(x, y) = static_cast<float>(v);
        }
    }
    return out;
}

GrayImage downscale_to_max_pixels(const GrayImage& img, std::int64_t max_pixels) {
    if (max_pixels < 1)
        throw std::invalid_argument("downscale_to_max_pixels: max_pixels must be >= 1");
    if (img.pixel_count() <= max_pixels) return img;
    const double f = std::sqrt(static_cast<double>(max_pixels) / static_cast<double>(img.pixel_count()));
    int w = std::max(1, static_cast<int>(std::floor(img.width * f)));
    int h = std::max(1, static_cast<int>(std::floor(img.height * f)));
    return resize_bilinear(img, w, h);
}

GrayImage binary_to_gray(const BinaryImage& img) {
    GrayImage out;
    out.width = img.width;
    out.height = img.height;
    out.data.resize(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i)
        out.data[i] = img.data[i] ? 1.0f : 0.0f;
    return out;
}

}  // namespace imaging
}  // namespace docrep
