#include "udc/metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace udc {

double psnr(const Image& a, const Image& b, double peak) {
  if (!a.same_shape(b)) throw std::invalid_argument("psnr: shape mismatch");
  if (peak <= 0.0) throw std::invalid_argument("psnr: peak must be > 0");
  double mse = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    double d = a.data[i] - b.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.data.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

namespace {
constexpr int kWin = 11;

std::vector<double> gaussian_window() {
  std::vector<double> w(static_cast<size_t>(kWin) * kWin);
  double sigma = 1.5, sum = 0.0;
  int r = kWin / 2;
  for (int y = 0; y < kWin; ++y)
    for (int x = 0; x < kWin; ++x) {
      double dy = y - r, dx = x - r;
      double v = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
      w[static_cast<size_t>(y) * kWin + x] = v;
      sum += v;
    }
  for (double& v : w) v /= sum;
  return w;
}
}  // namespace

double ssim(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("ssim: shape mismatch");
  if (a.h < kWin || a.w < kWin)
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");

  static const std::vector<double> win = gaussian_window();
  constexpr double kC1 = 0.01 * 0.01;  // (K1 * L)^2, L = 1
  constexpr double kC2 = 0.03 * 0.03;

  double total = 0.0;
  long count = 0;
  for (int c = 0; c < a.ch; ++c) {
    for (int y = 0; y + kWin <= a.h; ++y) {
      for (int x = 0; x + kWin <= a.w; ++x) {
        double mx = 0.0, my = 0.0;
        for (int wy = 0; wy < kWin; ++wy)
          for (int wx = 0; wx < kWin; ++wx) {
            double wgt = win[static_cast<size_t>(wy) * kWin + wx];
            mx += wgt * a.at(y + wy, x + wx, c);
            my += wgt * b.at(y + wy, x + wx, c);
          }
        double vx = 0.0, vy = 0.0, cov = 0.0;
        for (int wy = 0; wy < kWin; ++wy)
          for (int wx = 0; wx < kWin; ++wx) {
            double wgt = win[static_cast<size_t>(wy) * kWin + wx];
            double da = a.at(y + wy, x + wx, c) - mx;
            double db = b.at(y + wy, x + wx, c) - my;
            vx += wgt * da * da;
            vy += wgt * db * db;
            cov += wgt * da * db;
          }
        double s = ((2.0 * mx * my + kC1) * (2.0 * cov + kC2)) /
                   ((mx * mx + my * my + kC1) * (vx + vy + kC2));
        total += s;
        ++count;
      }
    }
  }
  return total / static_cast<double>(count);
}

namespace {
std::string fmt_psnr(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(4);
  ss << v;
  return ss.str();
}

std::string fmt_ssim(double v) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(6);
  ss << v;
  return ss.str();
}
}  // namespace

std::string metrics_csv(const std::vector<MetricRow>& rows) {
  std::ostringstream out;
  out << "name,psnr,ssim\n";
  double psnr_sum = 0.0, ssim_sum = 0.0;
  bool any_inf = false;
  for (const auto& r : rows) {
    out << r.name << "," << fmt_psnr(r.psnr) << "," << fmt_ssim(r.ssim) << "\n";
    if (std::isinf(r.psnr))
      any_inf = true;
    else
      psnr_sum += r.psnr;
    ssim_sum += r.ssim;
  }
  if (!rows.empty()) {
    double mean_psnr = any_inf ? std::numeric_limits<double>::infinity()
                               : psnr_sum / static_cast<double>(rows.size());
    out << "mean," << fmt_psnr(mean_psnr) << ","
        << fmt_ssim(ssim_sum / static_cast<double>(rows.size())) << "\n";
  }
  return out.str();
}

}  // namespace udc
