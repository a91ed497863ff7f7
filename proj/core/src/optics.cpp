#include "udc/optics.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

#include "udc/errors.hpp"
#include "udc/fft.hpp"
#include "udc/parallel.hpp"

namespace udc {

namespace {
constexpr double kPi = std::numbers::pi;

void warn(std::vector<std::string>* sink, const std::string& msg) {
  if (sink)
    sink->push_back(msg);
  else
    std::cerr << "warning: " << msg << "\n";
}
}  // namespace

void OpticsConfig::validate() const {
  if (grid_n < 16 || grid_n % 2 != 0)
    throw std::invalid_argument("optics: grid_n must be even and >= 16");
  if (pitch <= 0.0) throw std::invalid_argument("optics: pitch must be > 0");
  for (double l : lambda)
    if (l <= 0.0) throw std::invalid_argument("optics: wavelengths must be > 0");
  if (z1 <= 0.0 || d <= 0.0 || f <= 0.0)
    throw std::invalid_argument("optics: z1, d, f must be > 0");
  if (z1 + d <= f)
    throw std::invalid_argument("optics: object inside focal length, no image");
  int k = crop_size();
  if (k % 2 == 0 || k < 3 || k >= grid_n)
    throw std::invalid_argument("optics: kernel_size must be odd, in [3, grid_n)");
}

double OpticsConfig::image_distance() const {
  if (z2 > 0.0) return z2;
  return 1.0 / (1.0 / f - 1.0 / (z1 + d));
}

int OpticsConfig::crop_size() const {
  if (kernel_size > 0) return kernel_size;
  return grid_n - 1;
}

OpticsConfig optics_from_keyval(const KeyVal& kv) {
  OpticsConfig cfg;
  cfg.lambda[0] = kv.get_double_or("lambda_r", cfg.lambda[0]);
  cfg.lambda[1] = kv.get_double_or("lambda_g", cfg.lambda[1]);
  cfg.lambda[2] = kv.get_double_or("lambda_b", cfg.lambda[2]);
  cfg.z1 = kv.get_double_or("z1", cfg.z1);
  cfg.d = kv.get_double_or("d", cfg.d);
  cfg.f = kv.get_double_or("f", cfg.f);
  cfg.z2 = kv.get_double_or("z2", cfg.z2);
  cfg.grid_n = kv.get_int_or("grid_n", cfg.grid_n);
  cfg.pitch = kv.get_double_or("pitch", cfg.pitch);
  cfg.kernel_size = kv.get_int_or("kernel_size", cfg.kernel_size);
  cfg.validate();
  return cfg;
}

ComplexField spherical_wavefront(double lambda, double z1, int n, double pitch) {
  if (lambda <= 0.0 || z1 <= 0.0)
    throw std::invalid_argument("wavefront: lambda and z1 must be > 0");
  ComplexField field(n, pitch);
  double c = kPi / (lambda * z1);
  for (int i = 0; i < n; ++i) {
    double p = (i - n / 2) * pitch;
    for (int j = 0; j < n; ++j) {
      double q = (j - n / 2) * pitch;
      double phase = c * (p * p + q * q);
      field.at(i, j) = {std::cos(phase), std::sin(phase)};
    }
  }
  return field;
}

void modulate(ComplexField& field, const DisplayPattern& pattern) {
  if (pattern.n != field.n)
    throw std::invalid_argument("modulate: grid mismatch");
  size_t n2 = static_cast<size_t>(field.n) * field.n;
  for (size_t i = 0; i < n2; ++i) field.a[i] *= pattern.t[i];
}

void lens_modulate(ComplexField& field, double lambda, double f) {
  if (lambda <= 0.0 || f <= 0.0)
    throw std::invalid_argument("lens: lambda and f must be > 0");
  int n = field.n;
  double c = -kPi / (lambda * f);
  for (int i = 0; i < n; ++i) {
    double p = (i - n / 2) * field.pitch;
    for (int j = 0; j < n; ++j) {
      double q = (j - n / 2) * field.pitch;
      double phase = c * (p * p + q * q);
      field.at(i, j) *= std::complex<double>(std::cos(phase), std::sin(phase));
    }
  }
}

void fresnel_propagate(ComplexField& field, double lambda, double z,
                       std::vector<std::string>* warnings) {
  if (lambda <= 0.0) throw std::invalid_argument("fresnel: lambda must be > 0");
  int n = field.n;
  double ratio = lambda * std::fabs(z) / (n * field.pitch * field.pitch);
  if (ratio > 1.0)
    warn(warnings,
         "fresnel: transfer function undersampled (lambda*z/(n*pitch^2) = " +
             std::to_string(ratio) + " > 1), far spatial frequencies alias");

  fft2(n, n, field.a.data(), false);
  // fftfreq layout: f_i = i/(n*pitch) for i < n/2, (i-n)/(n*pitch) otherwise.
  double df = 1.0 / (n * field.pitch);
  double c = -kPi * lambda * z;
  for (int i = 0; i < n; ++i) {
    double fx = (i < n / 2 ? i : i - n) * df;
    for (int j = 0; j < n; ++j) {
      double fy = (j < n / 2 ? j : j - n) * df;
      double phase = c * (fx * fx + fy * fy);
      field.at(i, j) *= std::complex<double>(std::cos(phase), std::sin(phase));
    }
  }
  fft2(n, n, field.a.data(), true);
}

double field_energy(const ComplexField& field) {
  double e = 0.0;
  for (const auto& v : field.a) e += std::norm(v);
  return e;
}

std::vector<double> simulate_channel(const DisplayPattern& pattern,
                                     const OpticsConfig& cfg, int channel,
                                     std::vector<std::string>* warnings) {
  cfg.validate();
  if (channel < 0 || channel > 2)
    throw std::invalid_argument("simulate: channel out of range");
  if (pattern.n != cfg.grid_n)
    throw std::invalid_argument("simulate: pattern grid != grid_n");
  for (double t : pattern.t)
    if (t < 0.0 || t > 1.0)
      throw std::invalid_argument("simulate: pattern values outside [0, 1]");

  double lambda = cfg.lambda[channel];
  ComplexField field =
      spherical_wavefront(lambda, cfg.z1, cfg.grid_n, cfg.pitch);
  modulate(field, pattern);
  fresnel_propagate(field, lambda, cfg.d, warnings);
  lens_modulate(field, lambda, cfg.f);
  fresnel_propagate(field, lambda, cfg.image_distance(), warnings);

  size_t n2 = static_cast<size_t>(cfg.grid_n) * cfg.grid_n;
  std::vector<double> intensity(n2);
  for (size_t i = 0; i < n2; ++i) intensity[i] = std::norm(field.a[i]);
  return intensity;
}

PsfStack simulate_psf(const DisplayPattern& pattern, const OpticsConfig& cfg,
                      std::vector<std::string>* warnings) {
  cfg.validate();
  int n = cfg.grid_n;
  int k = cfg.crop_size();
  int r = (k - 1) / 2;

  PsfStack psf(k);
  psf.angle_deg = 0.0;

  // Unit-amplitude input carries energy n^2; gains are relative to that.
  double input_energy = static_cast<double>(n) * n;

  for (int c = 0; c < 3; ++c) {
    std::vector<double> intensity = simulate_channel(pattern, cfg, c, warnings);
    double cropped = 0.0;
    for (int y = 0; y < k; ++y) {
      int gy = n / 2 - r + y;
      for (int x = 0; x < k; ++x) {
        int gx = n / 2 - r + x;
        double v = intensity[static_cast<size_t>(gy) * n + gx];
        psf.at(c, y, x) = v;
        cropped += v;
      }
    }
    if (!(cropped > 0.0))
      throw NumericError("simulate: channel " + std::to_string(c) +
                         " has zero cropped energy (fully blocked pattern?)");
    psf.channel_gains[static_cast<size_t>(c)] = cropped / input_energy;
    double inv = 1.0 / cropped;
    for (int y = 0; y < k; ++y)
      for (int x = 0; x < k; ++x) psf.at(c, y, x) *= inv;
  }
  return psf;
}

DisplayPattern make_ones_pattern(int n, double pitch) {
  DisplayPattern p;
  p.n = n;
  p.pitch = pitch;
  p.t.assign(static_cast<size_t>(n) * n, 1.0);
  return p;
}

DisplayPattern make_stripe_pattern(int n, double pitch, int period,
                                   double duty) {
  if (period < 2 || duty <= 0.0 || duty > 1.0)
    throw std::invalid_argument("stripes: need period >= 2, duty in (0, 1]");
  DisplayPattern p;
  p.n = n;
  p.pitch = pitch;
  p.t.assign(static_cast<size_t>(n) * n, 0.0);
  int open = std::max(1, static_cast<int>(std::lround(duty * period)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j % period < open) p.t[static_cast<size_t>(i) * n + j] = 1.0;
  return p;
}

DisplayPattern make_grid_pattern(int n, double pitch, int period, double duty) {
  DisplayPattern rows = make_stripe_pattern(n, pitch, period, duty);
  DisplayPattern p = rows;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      p.t[static_cast<size_t>(i) * n + j] =
          rows.t[static_cast<size_t>(i) * n + j] *
          rows.t[static_cast<size_t>(j) * n + i];
  return p;
}

DisplayPattern pattern_from_values(int n, double pitch,
                                   const std::vector<double>& t) {
  if (t.size() != static_cast<size_t>(n) * n)
    throw std::invalid_argument("pattern: value count != n*n");
  DisplayPattern p;
  p.n = n;
  p.pitch = pitch;
  p.t = t;
  return p;
}

}  // namespace udc
