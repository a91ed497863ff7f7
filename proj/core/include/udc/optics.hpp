#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "udc/keyval.hpp"

namespace udc {

// Scalar field sampled on an n*n grid with physical sample spacing `pitch`
// (meters). Index (i, j) sits at physical coordinate ((i - n/2) * pitch,
// (j - n/2) * pitch), row-major.
struct ComplexField {
  int n = 0;
  double pitch = 0.0;
  std::vector<std::complex<double>> a;

  ComplexField() = default;
  ComplexField(int n_, double pitch_)
      : n(n_), pitch(pitch_), a(static_cast<size_t>(n_) * n_) {}
  std::complex<double>& at(int i, int j) {
    return a[static_cast<size_t>(i) * n + j];
  }
  std::complex<double> at(int i, int j) const {
    return a[static_cast<size_t>(i) * n + j];
  }
};

// Binary-ish transmission mask of the display wiring in front of the lens.
// Values in [0, 1]; 1 = open pixel gap, 0 = blocked.
struct DisplayPattern {
  int n = 0;
  double pitch = 0.0;
  std::vector<double> t;
};

// Per-channel PSF stack. Kernels are k*k, odd k, each channel normalized to
// unit sum; channel_gains keeps the pre-normalization energy throughput
// (cropped energy / unobstructed input energy), angle_deg the orientation
// the stack was rotated to.
struct PsfStack {
  int k = 0;
  double angle_deg = 0.0;
  std::array<double, 3> channel_gains{1.0, 1.0, 1.0};
  std::vector<double> w;  // 3 * k * k, channel-major

  PsfStack() = default;
  PsfStack(int k_) : k(k_), w(static_cast<size_t>(3) * k_ * k_) {}
  double& at(int c, int y, int x) {
    return w[(static_cast<size_t>(c) * k + y) * k + x];
  }
  double at(int c, int y, int x) const {
    return w[(static_cast<size_t>(c) * k + y) * k + x];
  }
};

struct OpticsConfig {
  std::array<double, 3> lambda{610e-9, 530e-9, 470e-9};  // meters, RGB
  double z1 = 1.0;       // scene to display
  double d = 2.0e-3;     // display to lens
  double f = 4.5e-3;     // focal length
  double z2 = 0.0;       // lens to sensor; <= 0 derives the in-focus value
  int grid_n = 512;
  double pitch = 2.0e-6;
  int kernel_size = 0;   // odd crop side; <= 0 picks grid_n - 1

  void validate() const;
  double image_distance() const;  // z2, derived when unset
  int crop_size() const;
};

// Keys: lambda_r lambda_g lambda_b z1 d f z2 grid_n pitch kernel_size.
// All optional, falling back to the defaults above.
OpticsConfig optics_from_keyval(const KeyVal& kv);

// Paraxial diverging wavefront from an on-axis point source at distance z1:
// a(p, q) = exp(i*pi*(p^2 + q^2) / (lambda * z1)), unit amplitude.
ComplexField spherical_wavefront(double lambda, double z1, int n, double pitch);

// Pointwise amplitude modulation by the display mask. Grids must match.
void modulate(ComplexField& field, const DisplayPattern& pattern);

// Thin-lens phase: multiply by exp(-i*pi*(p^2 + q^2) / (lambda * f)).
void lens_modulate(ComplexField& field, double lambda, double f);

// Fresnel propagation over distance z via the transfer-function method:
// A' = IFFT( FFT(A) * exp(-i*pi*lambda*z*(fx^2 + fy^2)) ).
// |H| = 1, so grid energy is conserved exactly up to FFT roundoff. The
// constant exp(ikz) piston phase is dropped; it cancels in any intensity.
// When lambda*|z| / (n*pitch^2) > 1 the quadratic transfer phase is
// undersampled; a warning is appended to `warnings` (or stderr when null)
// and propagation proceeds.
void fresnel_propagate(ComplexField& field, double lambda, double z,
                       std::vector<std::string>* warnings = nullptr);

double field_energy(const ComplexField& field);

// Full chain for one color channel: point-source wavefront, display mask,
// free space d, lens, free space z2, intensity. Returns the uncropped
// intensity grid.
std::vector<double> simulate_channel(const DisplayPattern& pattern,
                                     const OpticsConfig& cfg, int channel,
                                     std::vector<std::string>* warnings);

// All three channels, center-cropped to cfg.crop_size() and normalized to
// unit sum per channel; pre-normalization throughput lands in channel_gains.
PsfStack simulate_psf(const DisplayPattern& pattern, const OpticsConfig& cfg,
                      std::vector<std::string>* warnings = nullptr);

// Pattern builders.
DisplayPattern make_ones_pattern(int n, double pitch);
// Vertical opaque wiring: columns with (j % period) < duty*period open.
DisplayPattern make_stripe_pattern(int n, double pitch, int period, double duty);
// Crossed wiring in both axes (open where both axes are open).
DisplayPattern make_grid_pattern(int n, double pitch, int period, double duty);
// From a grayscale image in [0, 1]; must be n*n single channel.
DisplayPattern pattern_from_values(int n, double pitch,
                                   const std::vector<double>& t);

}  // namespace udc
