#include "udc/wiener.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "udc/errors.hpp"
#include "udc/fft.hpp"
#include "udc/formation.hpp"

namespace udc {

Image wiener_deconvolve_linear(const Image& y, const PsfStack& psf, double nsr,
                               PadMode pad) {
  if (y.ch != 3) throw std::invalid_argument("wiener: image must be RGB");
  if (nsr < 0.0) throw std::invalid_argument("wiener: nsr must be >= 0");

  int H = y.h, W = y.w, K = psf.k, r = (K - 1) / 2;
  int ph = H + 2 * r, pw = W + 2 * r;
  size_t pn = static_cast<size_t>(ph) * pw;

  Image out(H, W, 3);
  std::vector<std::complex<double>> fy(pn), fh(pn);

  for (int c = 0; c < 3; ++c) {
    // Pad the observation.
    for (int yy = 0; yy < ph; ++yy) {
      int sy = yy - r;
      if (pad == PadMode::kReplicate) sy = std::clamp(sy, 0, H - 1);
      for (int xx = 0; xx < pw; ++xx) {
        int sx = xx - r;
        if (pad == PadMode::kReplicate) sx = std::clamp(sx, 0, W - 1);
        double v = 0.0;
        if (sy >= 0 && sy < H && sx >= 0 && sx < W) v = y.at(sy, sx, c);
        fy[static_cast<size_t>(yy) * pw + xx] = v;
      }
    }
    // Kernel with its center tap at the origin (wraparound placement), so
    // the deconvolved grid stays aligned with the observation.
    std::fill(fh.begin(), fh.end(), std::complex<double>(0.0));
    for (int u = 0; u < K; ++u) {
      int yy = ((u - r) % ph + ph) % ph;
      for (int v = 0; v < K; ++v) {
        int xx = ((v - r) % pw + pw) % pw;
        fh[static_cast<size_t>(yy) * pw + xx] = psf.at(c, u, v);
      }
    }

    fft2(ph, pw, fy.data(), false);
    fft2(ph, pw, fh.data(), false);

    if (nsr == 0.0) {
      double min_mag2 = 1e300;
      for (size_t i = 0; i < pn; ++i)
        min_mag2 = std::min(min_mag2, std::norm(fh[i]));
      if (min_mag2 <= 1e-24)
        throw NumericError(
            "wiener: nsr = 0 with kernel spectrum touching zero");
    }
    for (size_t i = 0; i < pn; ++i)
      fy[i] = std::conj(fh[i]) * fy[i] / (std::norm(fh[i]) + nsr);

    fft2(ph, pw, fy.data(), true);
    for (int yy = 0; yy < H; ++yy)
      for (int xx = 0; xx < W; ++xx)
        out.at(yy, xx, c) = std::max(
            0.0, fy[static_cast<size_t>(yy + r) * pw + (xx + r)].real());
  }
  return out;
}

Image wiener_deconvolve(const Image& y, const PsfStack& psf, double nsr,
                        double alpha, PadMode pad) {
  Image linear = inverse_tonemap(y, alpha);
  Image restored = wiener_deconvolve_linear(linear, psf, nsr, pad);
  return tonemap(restored, alpha);
}

}  // namespace udc
