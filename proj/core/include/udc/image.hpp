#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace udc {

// Planar-agnostic raster: row-major, channel-interleaved doubles.
// Used for linear radiance as well as tone-mapped data; the value domain is
// up to the producing stage.
struct Image {
  int h = 0;
  int w = 0;
  int ch = 0;
  std::vector<double> data;

  Image() = default;
  Image(int h_, int w_, int ch_, double fill = 0.0)
      : h(h_), w(w_), ch(ch_), data(static_cast<size_t>(h_) * w_ * ch_, fill) {
    if (h_ <= 0 || w_ <= 0 || ch_ <= 0)
      throw std::invalid_argument("Image: non-positive shape");
  }

  double& at(int y, int x, int c) {
    return data[(static_cast<size_t>(y) * w + x) * ch + c];
  }
  double at(int y, int x, int c) const {
    return data[(static_cast<size_t>(y) * w + x) * ch + c];
  }
  size_t size() const { return data.size(); }
  bool same_shape(const Image& o) const {
    return h == o.h && w == o.w && ch == o.ch;
  }
};

inline bool image_finite(const Image& im) {
  for (double v : im.data)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace udc
