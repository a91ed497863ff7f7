#include "udc/formation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "udc/errors.hpp"
#include "udc/fft.hpp"
#include "udc/keyval.hpp"
#include "udc/parallel.hpp"
#include "udc/pfm.hpp"

namespace udc {

Image convolve_psf(const Image& scene, const PsfStack& psf) {
  if (scene.ch != 3) throw std::invalid_argument("convolve: scene must be RGB");
  if (psf.k % 2 == 0) throw std::invalid_argument("convolve: kernel side must be odd");
  if (psf.k > 4 * std::min(scene.h, scene.w))
    throw std::invalid_argument("convolve: kernel side exceeds 4x image side");

  int H = scene.h, W = scene.w, K = psf.k, r = (K - 1) / 2;
  int ph = H + K - 1, pw = W + K - 1;
  size_t pn = static_cast<size_t>(ph) * pw;

  Image out(H, W, 3);
  std::vector<std::complex<double>> fscene(pn), fker(pn);

  for (int c = 0; c < 3; ++c) {
    std::fill(fscene.begin(), fscene.end(), std::complex<double>(0.0));
    std::fill(fker.begin(), fker.end(), std::complex<double>(0.0));
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x)
        fscene[static_cast<size_t>(y) * pw + x] = scene.at(y, x, c);
    for (int y = 0; y < K; ++y)
      for (int x = 0; x < K; ++x)
        fker[static_cast<size_t>(y) * pw + x] = psf.at(c, y, x);

    fft2(ph, pw, fscene.data(), false);
    fft2(ph, pw, fker.data(), false);
    for (size_t i = 0; i < pn; ++i) fscene[i] *= fker[i];
    fft2(ph, pw, fscene.data(), true);

    // Full convolution lives on [0, H+K-2]; "same" keeps the center window.
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x)
        out.at(y, x, c) = fscene[static_cast<size_t>(y + r) * pw + (x + r)].real();
  }
  return out;
}

void clip_inplace(Image& im, double x_max) {
  if (x_max <= 0.0) throw std::invalid_argument("clip: x_max must be > 0");
  for (double& v : im.data) v = std::max(0.0, std::min(v, x_max));
}

double tonemap_value(double x, double alpha) { return x / (x + alpha); }

Image tonemap(const Image& im, double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("tonemap: alpha must be > 0");
  Image out = im;
  for (double& v : out.data) {
    if (v < 0.0) throw NumericError("tonemap: negative input");
    v = tonemap_value(v, alpha);
  }
  return out;
}

double inverse_tonemap_value(double y, double alpha) {
  return alpha * y / (1.0 - y);
}

Image inverse_tonemap(const Image& im, double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("tonemap: alpha must be > 0");
  Image out = im;
  for (double& v : out.data) {
    if (v < 0.0 || v >= 1.0)
      throw NumericError("inverse tonemap: input outside [0, 1)");
    v = inverse_tonemap_value(v, alpha);
  }
  return out;
}

void add_noise_inplace(Image& im, double sigma, Rng& rng) {
  if (sigma < 0.0) throw std::invalid_argument("noise: sigma must be >= 0");
  if (sigma == 0.0) return;
  for (double& v : im.data) v += sigma * rng.normal();
}

DegradedPair simulate_degraded(const Image& scene, const PsfStack& psf,
                               double x_max, double alpha, double noise_sigma,
                               Rng& rng) {
  for (double v : scene.data)
    if (v < 0.0) throw std::invalid_argument("degrade: scene must be >= 0");

  DegradedPair pair;
  Image blurred = convolve_psf(scene, psf);
  add_noise_inplace(blurred, noise_sigma, rng);
  clip_inplace(blurred, x_max);
  pair.degraded = tonemap(blurred, alpha);
  pair.target = tonemap(scene, alpha);
  return pair;
}

PsfStack rotate_psf(const PsfStack& psf, double angle_deg) {
  if (std::fabs(angle_deg) > 45.0)
    throw std::invalid_argument("rotate: |angle| must be <= 45 degrees");

  int K = psf.k;
  double cx = (K - 1) / 2.0;
  double rad = angle_deg * std::numbers::pi / 180.0;
  double ca = std::cos(rad), sa = std::sin(rad);

  PsfStack out(K);
  out.angle_deg = psf.angle_deg + angle_deg;
  out.channel_gains = psf.channel_gains;

  for (int c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (int y = 0; y < K; ++y) {
      for (int x = 0; x < K; ++x) {
        // Inverse map: sample the source at the back-rotated position.
        double dy = y - cx, dx = x - cx;
        double sy = ca * dy + sa * dx + cx;
        double sx = -sa * dy + ca * dx + cx;
        double v = 0.0;
        int y0 = static_cast<int>(std::floor(sy));
        int x0 = static_cast<int>(std::floor(sx));
        double fy = sy - y0, fx = sx - x0;
        for (int oy = 0; oy <= 1; ++oy) {
          for (int ox = 0; ox <= 1; ++ox) {
            int yy = y0 + oy, xx = x0 + ox;
            if (yy < 0 || yy >= K || xx < 0 || xx >= K) continue;
            double wgt = (oy ? fy : 1.0 - fy) * (ox ? fx : 1.0 - fx);
            v += wgt * psf.at(c, yy, xx);
          }
        }
        out.at(c, y, x) = v;
        sum += v;
      }
    }
    if (!(sum > 0.0)) throw NumericError("rotate: kernel energy vanished");
    double inv = 1.0 / sum;
    for (int y = 0; y < K; ++y)
      for (int x = 0; x < K; ++x) out.at(c, y, x) *= inv;
  }
  return out;
}

Image fuse_exposures(const std::vector<Image>& captures,
                     const std::vector<double>& times, double sat_level) {
  if (captures.empty() || captures.size() != times.size())
    throw std::invalid_argument("fuse: need matching captures and times");
  for (double t : times)
    if (t <= 0.0) throw std::invalid_argument("fuse: exposure times must be > 0");
  for (const Image& im : captures)
    if (!im.same_shape(captures[0]))
      throw std::invalid_argument("fuse: capture shapes differ");

  if (sat_level <= 0.0) {
    double gmax = 0.0;
    for (const Image& im : captures)
      for (double v : im.data) gmax = std::max(gmax, v);
    if (gmax <= 0.0) throw NumericError("fuse: all captures are zero");
    sat_level = 0.95 * gmax;
  }

  size_t shortest = 0;
  for (size_t i = 1; i < times.size(); ++i)
    if (times[i] < times[shortest]) shortest = i;

  const Image& ref = captures[0];
  Image out(ref.h, ref.w, ref.ch);
  for (size_t p = 0; p < ref.size(); ++p) {
    double acc = 0.0;
    int used = 0;
    for (size_t i = 0; i < captures.size(); ++i) {
      double raw = captures[i].data[p];
      if (raw < sat_level) {
        acc += raw / times[i];
        ++used;
      }
    }
    out.data[p] = used > 0 ? acc / used
                           : captures[shortest].data[p] / times[shortest];
  }
  return out;
}

PsfStack fuse_psf_exposures(const std::vector<Image>& captures,
                            const std::vector<double>& times,
                            double sat_level) {
  Image fused = fuse_exposures(captures, times, sat_level);
  if (fused.ch != 3 || fused.h != fused.w || fused.h % 2 == 0)
    throw std::invalid_argument("fuse: PSF captures must be odd square RGB");

  int K = fused.h;
  PsfStack psf(K);
  psf.angle_deg = 0.0;
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (int y = 0; y < K; ++y)
      for (int x = 0; x < K; ++x) sum += fused.at(y, x, c);
    if (!(sum > 0.0)) throw NumericError("fuse: channel has no energy");
    psf.channel_gains[static_cast<size_t>(c)] = sum;
    double inv = 1.0 / sum;
    for (int y = 0; y < K; ++y)
      for (int x = 0; x < K; ++x) psf.at(c, y, x) = fused.at(y, x, c) * inv;
  }
  return psf;
}

Image gen_synthetic_scene(int h, int w, int highlights, Rng& rng,
                          double base_max, double hi_lo, double hi_hi) {
  if (h < 8 || w < 8) throw std::invalid_argument("scene: size must be >= 8");
  if (highlights < 0 || hi_lo <= 0.0 || hi_hi < hi_lo)
    throw std::invalid_argument("scene: bad highlight parameters");

  // Smooth base: bilinear blow-up of a coarse random grid, per channel.
  constexpr int kCoarse = 8;
  Image im(h, w, 3);
  std::vector<double> coarse(static_cast<size_t>(kCoarse) * kCoarse * 3);
  for (double& v : coarse) v = rng.uniform(0.05, base_max);

  for (int y = 0; y < h; ++y) {
    double gy = static_cast<double>(y) / (h - 1) * (kCoarse - 1);
    int y0 = std::min(static_cast<int>(gy), kCoarse - 2);
    double fy = gy - y0;
    for (int x = 0; x < w; ++x) {
      double gx = static_cast<double>(x) / (w - 1) * (kCoarse - 1);
      int x0 = std::min(static_cast<int>(gx), kCoarse - 2);
      double fx = gx - x0;
      for (int c = 0; c < 3; ++c) {
        auto cc = [&](int yy, int xx) {
          return coarse[(static_cast<size_t>(yy) * kCoarse + xx) * 3 + c];
        };
        im.at(y, x, c) = (1 - fy) * ((1 - fx) * cc(y0, x0) + fx * cc(y0, x0 + 1)) +
                         fy * ((1 - fx) * cc(y0 + 1, x0) + fx * cc(y0 + 1, x0 + 1));
      }
    }
  }

  for (int i = 0; i < highlights; ++i) {
    int cy = static_cast<int>(rng.uniform(2.0, h - 2.0));
    int cx = static_cast<int>(rng.uniform(2.0, w - 2.0));
    double radius = rng.uniform(0.8, 2.5);
    double inten = hi_lo * std::exp(rng.uniform() * std::log(hi_hi / hi_lo));
    // Mild color cast so channels differ.
    double tint[3] = {rng.uniform(0.7, 1.0), rng.uniform(0.7, 1.0),
                      rng.uniform(0.7, 1.0)};
    int rr = static_cast<int>(std::ceil(radius));
    for (int dy = -rr; dy <= rr; ++dy) {
      for (int dx = -rr; dx <= rr; ++dx) {
        int y = cy + dy, x = cx + dx;
        if (y < 0 || y >= h || x < 0 || x >= w) continue;
        double d2 = (dy * dy + dx * dx) / (radius * radius);
        if (d2 > 1.0) continue;
        double fall = 1.0 - 0.5 * d2;
        for (int c = 0; c < 3; ++c)
          im.at(y, x, c) += inten * tint[c] * fall;
      }
    }
  }
  return im;
}

void save_psf(const std::string& path, const PsfStack& psf) {
  Image im(psf.k, psf.k, 3);
  for (int y = 0; y < psf.k; ++y)
    for (int x = 0; x < psf.k; ++x)
      for (int c = 0; c < 3; ++c) im.at(y, x, c) = psf.at(c, y, x);
  write_pfm(path, im);

  std::string meta = "angle_deg=" + std::to_string(psf.angle_deg) + "\n";
  for (int c = 0; c < 3; ++c)
    meta += "gain_" + std::string(1, "rgb"[c]) + "=" +
            std::to_string(psf.channel_gains[static_cast<size_t>(c)]) + "\n";
  std::ofstream out(path + ".meta");
  if (!out) throw IoError("psf: cannot create " + path + ".meta");
  out << meta;
}

PsfStack load_psf(const std::string& path) {
  Image im = read_pfm(path);
  if (im.ch != 3 || im.h != im.w || im.h % 2 == 0)
    throw IoError("psf: " + path + " is not an odd square RGB kernel");

  int K = im.h;
  PsfStack psf(K);
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (int y = 0; y < K; ++y)
      for (int x = 0; x < K; ++x) {
        double v = im.at(y, x, c);
        if (v < 0.0) throw IoError("psf: " + path + " has negative taps");
        psf.at(c, y, x) = v;
        sum += v;
      }
    if (!(sum > 0.0)) throw IoError("psf: " + path + " channel has no energy");
    // Stored kernels are unit sum already; renormalize to absorb float32
    // quantization from the PFM round trip.
    double inv = 1.0 / sum;
    for (int y = 0; y < K; ++y)
      for (int x = 0; x < K; ++x) psf.at(c, y, x) *= inv;
  }

  std::ifstream meta_in(path + ".meta");
  if (meta_in) {
    std::stringstream ss;
    ss << meta_in.rdbuf();
    KeyVal kv = KeyVal::from_string(ss.str(), path + ".meta");
    psf.angle_deg = kv.get_double_or("angle_deg", 0.0);
    psf.channel_gains[0] = kv.get_double_or("gain_r", 1.0);
    psf.channel_gains[1] = kv.get_double_or("gain_g", 1.0);
    psf.channel_gains[2] = kv.get_double_or("gain_b", 1.0);
  }
  return psf;
}

}  // namespace udc
