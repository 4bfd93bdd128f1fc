#pragma once

#include <string>

#include "docrep/image.hpp"

namespace docrep {
namespace imaging {

/// Decodes PNG/JPEG/TIFF via the host decoder and normalizes intensities to
/// [0,1] regardless of source bit depth. Color inputs go through
/// to_grayscale. Throws FormatError when the file cannot be decoded.
GrayImage load_gray(const std::string& path);

/// Writes a bilevel image as an 8-bit PNG (white = 255).
void save_png(const std::string& path, const BinaryImage& img);

}  // namespace imaging
}  // namespace docrep
