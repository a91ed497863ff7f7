#pragma once

#include <array>

#include "udc/image.hpp"

namespace udc {

// Per-pixel 3x3 color matrix, row-major: out = M * rgb.
Image apply_ccm(const Image& im, const std::array<double, 9>& m);

// Per-channel gains.
Image rgb_scale(const Image& im, const std::array<double, 3>& gains);

// Contrast-limited adaptive histogram equalization on Rec.709 luma.
// 256 bins; per-tile histograms are clipped at clip_limit times the mean
// bin height with the excess redistributed uniformly; tile mappings are the
// cumulative fraction of pixels at or below the bin, blended bilinearly
// between neighboring tile centers. Chroma is preserved by scaling RGB with
// the luma ratio. Input and output in [0, 1].
Image clahe(const Image& im, int tiles_x, int tiles_y, double clip_limit);

// Rec.709 luma of one RGB pixel.
double luma709(double r, double g, double b);

}  // namespace udc
