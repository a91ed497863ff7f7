#pragma once

#include <string>

#include "udc/image.hpp"

namespace udc {

// 8-bit PNG for display-referred data. Values are clamped to [0, 1] and
// quantized with round-half-up. 1-channel images become grayscale PNG.
void write_png(const std::string& path, const Image& im);

}  // namespace udc
