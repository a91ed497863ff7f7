#include "udc/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace udc {

double luma709(double r, double g, double b) {
  return 0.2126 * r + 0.7152 * g + 0.0722 * b;
}

Image apply_ccm(const Image& im, const std::array<double, 9>& m) {
  if (im.ch != 3) throw std::invalid_argument("ccm: image must be RGB");
  Image out(im.h, im.w, 3);
  for (int y = 0; y < im.h; ++y) {
    for (int x = 0; x < im.w; ++x) {
      double r = im.at(y, x, 0), g = im.at(y, x, 1), b = im.at(y, x, 2);
      out.at(y, x, 0) = m[0] * r + m[1] * g + m[2] * b;
      out.at(y, x, 1) = m[3] * r + m[4] * g + m[5] * b;
      out.at(y, x, 2) = m[6] * r + m[7] * g + m[8] * b;
    }
  }
  return out;
}

Image rgb_scale(const Image& im, const std::array<double, 3>& gains) {
  if (im.ch != 3) throw std::invalid_argument("rgb_scale: image must be RGB");
  Image out = im;
  for (size_t i = 0; i < out.data.size(); i += 3) {
    out.data[i] *= gains[0];
    out.data[i + 1] *= gains[1];
    out.data[i + 2] *= gains[2];
  }
  return out;
}

namespace {
constexpr int kBins = 256;

int luma_bin(double v) {
  int b = static_cast<int>(v * kBins);
  return std::clamp(b, 0, kBins - 1);
}
}  // namespace

Image clahe(const Image& im, int tiles_x, int tiles_y, double clip_limit) {
  if (im.ch != 3) throw std::invalid_argument("clahe: image must be RGB");
  if (tiles_x < 1 || tiles_y < 1)
    throw std::invalid_argument("clahe: tile counts must be >= 1");
  if (clip_limit <= 0.0)
    throw std::invalid_argument("clahe: clip_limit must be > 0");
  if (im.h < tiles_y || im.w < tiles_x)
    throw std::invalid_argument("clahe: more tiles than pixels");

  int H = im.h, W = im.w;
  std::vector<double> L(static_cast<size_t>(H) * W);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      L[static_cast<size_t>(y) * W + x] =
          std::clamp(luma709(im.at(y, x, 0), im.at(y, x, 1), im.at(y, x, 2)),
                     0.0, 1.0);

  // Per-tile clipped cumulative mappings; m(b) = fraction of tile pixels in
  // bins <= b after redistribution, so the mapping is monotone onto (0, 1].
  std::vector<double> mapping(static_cast<size_t>(tiles_y) * tiles_x * kBins);
  std::vector<double> center_y(static_cast<size_t>(tiles_y));
  std::vector<double> center_x(static_cast<size_t>(tiles_x));

  for (int ty = 0; ty < tiles_y; ++ty) {
    int y0 = ty * H / tiles_y, y1 = (ty + 1) * H / tiles_y;
    center_y[static_cast<size_t>(ty)] = 0.5 * (y0 + y1 - 1);
    for (int tx = 0; tx < tiles_x; ++tx) {
      int x0 = tx * W / tiles_x, x1 = (tx + 1) * W / tiles_x;
      if (ty == 0) center_x[static_cast<size_t>(tx)] = 0.5 * (x0 + x1 - 1);

      double hist[kBins] = {};
      double count = 0.0;
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) {
          ++hist[luma_bin(L[static_cast<size_t>(y) * W + x])];
          ++count;
        }

      double limit = clip_limit * count / kBins;
      double excess = 0.0;
      for (double& hb : hist)
        if (hb > limit) {
          excess += hb - limit;
          hb = limit;
        }
      double add = excess / kBins;
      for (double& hb : hist) hb += add;

      double* map = mapping.data() +
                    (static_cast<size_t>(ty) * tiles_x + tx) * kBins;
      double cdf = 0.0;
      for (int b = 0; b < kBins; ++b) {
        cdf += hist[b];
        map[b] = cdf / count;
      }
    }
  }

  auto tile_map = [&](int ty, int tx, int bin) {
    return mapping[(static_cast<size_t>(ty) * tiles_x + tx) * kBins + bin];
  };
  // Bracketing tile centers and blend weight; outside the center span the
  // nearest tile applies unblended.
  auto locate = [](const std::vector<double>& centers, int pos, int& i0,
                   int& i1, double& w) {
    int n = static_cast<int>(centers.size());
    if (pos <= centers[0]) { i0 = i1 = 0; w = 0.0; return; }
    if (pos >= centers[static_cast<size_t>(n - 1)]) {
      i0 = i1 = n - 1;
      w = 0.0;
      return;
    }
    int i = 0;
    while (i < n - 2 && centers[static_cast<size_t>(i + 1)] < pos) ++i;
    i0 = i;
    i1 = i + 1;
    w = (pos - centers[static_cast<size_t>(i0)]) /
        (centers[static_cast<size_t>(i1)] - centers[static_cast<size_t>(i0)]);
  };

  Image out(H, W, 3);
  for (int y = 0; y < H; ++y) {
    int ty0, ty1;
    double wy;
    locate(center_y, y, ty0, ty1, wy);
    for (int x = 0; x < W; ++x) {
      int tx0, tx1;
      double wx;
      locate(center_x, x, tx0, tx1, wx);

      double l = L[static_cast<size_t>(y) * W + x];
      int bin = luma_bin(l);
      double l2 = (1 - wy) * ((1 - wx) * tile_map(ty0, tx0, bin) +
                              wx * tile_map(ty0, tx1, bin)) +
                  wy * ((1 - wx) * tile_map(ty1, tx0, bin) +
                        wx * tile_map(ty1, tx1, bin));

      double ratio = l > 1e-12 ? l2 / l : 0.0;
      for (int c = 0; c < 3; ++c) {
        double v = l > 1e-12 ? im.at(y, x, c) * ratio : l2;
        out.at(y, x, c) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return out;
}

}  // namespace udc
