#pragma once

#include <string>
#include <vector>

#include "udc/image.hpp"

namespace udc {

// Peak signal-to-noise ratio over all samples, peak defaults to 1.
// Identical inputs give +infinity.
double psnr(const Image& a, const Image& b, double peak = 1.0);

// Mean structural similarity: 11x11 Gaussian window (sigma 1.5),
// K1 = 0.01, K2 = 0.03, dynamic range 1. Averaged over the fully-supported
// (valid) window positions and over channels. Images must be at least 11
// pixels on each side.
double ssim(const Image& a, const Image& b);

struct MetricRow {
  std::string name;
  double psnr = 0.0;
  double ssim = 0.0;
};

// CSV: "name,psnr,ssim" per row plus a trailing "mean,..." aggregate.
// Infinite PSNR prints as the sentinel "inf"; the mean of any set containing
// it is itself "inf".
std::string metrics_csv(const std::vector<MetricRow>& rows);

}  // namespace udc
