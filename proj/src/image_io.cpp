#include "docrep/image_io.hpp"

#include <algorithm>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "docrep/errors.hpp"

namespace docrep {
namespace imaging {

namespace {

float depth_scale(int depth) {
    switch (depth) {
        case CV_8U: return 1.0f / 255.0f;
        case CV_16U: return 1.0f / 65535.0f;
        default: return 1.0f;
    }
}

}  // namespace

GrayImage load_gray(const std::string& path) {
    cv::Mat raw = cv::imread(path, cv::IMREAD_UNCHANGED);
    if (raw.empty())
        throw FormatError("cannot decode image: " + path);
    const float scale = depth_scale(raw.depth());
    cv::Mat f;
    raw.convertTo(f, CV_32F, scale);

    GrayImage out;
    out.width = f.cols;
    out.height = f.rows;
    if (f.channels() == 1) {
        out.data.assign(f.begin<float>(), f.end<float>());
        for (float& v : out.data) v = std::clamp(v, 0.0f, 1.0f);
        return out;
    }
    // imread yields BGR(A); route through the module's luminance conversion.
    ColorImage rgb;
    rgb.width = f.cols;
    rgb.height = f.rows;
    rgb.data.resize(static_cast<std::size_t>(f.cols) * f.rows * 3);
    const int ch = f.channels();
    for (int y = 0; y < f.rows; ++y) {
        const float* row = f.ptr<float>(y);
        for (int x = 0; x < f.cols; ++x) {
            std::size_t o = (static_cast<std::size_t>(y) * f.cols + x) * 3;
            rgb.data[o] = std::clamp(row[x * ch + 2], 0.0f, 1.0f);
            rgb.data[o + 1] = std::clamp(row[x * ch + 1], 0.0f, 1.0f);
            rgb.data[o + 2] = std::clamp(row[x * ch + 0], 0.0f, 1.0f);
        }
    }
    return to_grayscale(rgb);
}

void save_png(const std::string& path, const BinaryImage& img) {
    cv::Mat m(img.height, img.width, CV_8U);
    for (int y = 0; y < img.height; ++y) {
        std::uint8_t* row = m.ptr<std::uint8_t>(y);
        for (int x = 0; x < img.width; ++x) row[x] = img.at(x, y) ? 255 : 0;
    }
    if (!cv::imwrite(path, m))
        throw FormatError("cannot write PNG: " + path);
}

}  // namespace imaging
}  // namespace docrep
