#pragma once

#include <string>

#include "udc/image.hpp"

namespace udc {

// Portable FloatMap. "PF" = 3-channel color, "Pf" = grayscale; a negative
// scale marks little-endian payload, rows are stored bottom-to-top.
// Values pass through as float32 bit patterns, so write/read round-trips are
// bit-exact (denormals included) for data that originated as float32.
Image read_pfm(const std::string& path);

// Writes color images as "PF" and single-channel images as "Pf", scale -1.
// Throws IoError on open/write failure, std::invalid_argument for channel
// counts other than 1 or 3.
void write_pfm(const std::string& path, const Image& im);

}  // namespace udc
