#pragma once

#include <string>

#include "cpcf/image.hpp"

namespace cpcf {

// Decodes a PNG or JPEG file (detected by content, not extension) into an
// 8-bit-per-channel image mapped to [0, 1]; gray stays 1-channel, everything
// else lands as RGB.  Throws std::runtime_error with the path on failure.
Image load_image(const std::string& path);

// Writes 8-bit gray or RGB PNG; values are clamped to [0, 1] before
// quantization.
void save_png(const std::string& path, const Image& img);

}  // namespace cpcf
