#pragma once

#include <string>
#include <vector>

#include "udc/image.hpp"
#include "udc/optics.hpp"
#include "udc/rng.hpp"

namespace udc {

// "Same"-size linear convolution of an HDR scene with the per-channel PSF.
// Zero padding outside the scene; FFT-based, sized H+K-1 by W+K-1, then
// center-cropped. Rejects kernels with side > 4 * min(H, W).
Image convolve_psf(const Image& scene, const PsfStack& psf);

// Sensor saturation: min(x, x_max), and the physical floor max(x, 0).
void clip_inplace(Image& im, double x_max);

// Range compression onto [0, 1): y = x / (x + alpha), x >= 0.
double tonemap_value(double x, double alpha);
Image tonemap(const Image& im, double alpha);
// Inverse: x = alpha * y / (1 - y), y in [0, 1).
double inverse_tonemap_value(double y, double alpha);
Image inverse_tonemap(const Image& im, double alpha);

// i.i.d. Gaussian readout noise in the linear domain.
void add_noise_inplace(Image& im, double sigma, Rng& rng);

struct DegradedPair {
  Image degraded;  // tonemap(clip(scene conv psf + noise))
  Image target;    // tonemap(scene), no blur, no clip
};

DegradedPair simulate_degraded(const Image& scene, const PsfStack& psf,
                               double x_max, double alpha, double noise_sigma,
                               Rng& rng);

// Kernel resampled by bilinear interpolation on a grid rotated about the
// center; |angle_deg| <= 45. Out-of-support samples are zero. Each channel
// is renormalized to unit sum afterwards.
PsfStack rotate_psf(const PsfStack& psf, double angle_deg);

// Multi-exposure HDR merge. captures[i] holds raw sensor values of exposure
// times[i]; per sample, the merged value is the mean of capture/time over
// captures whose raw value < sat_level. If every exposure saturated, the
// shortest exposure's scaled value is used. sat_level <= 0 picks
// 0.95 * (global max over captures).
Image fuse_exposures(const std::vector<Image>& captures,
                     const std::vector<double>& times, double sat_level);

// Merge then per-channel unit-sum normalization into a PSF stack;
// channel_gains records the pre-normalization sums.
PsfStack fuse_psf_exposures(const std::vector<Image>& captures,
                            const std::vector<double>& times,
                            double sat_level);

// Synthetic HDR scene: smooth low-frequency base in (0, base_max] plus
// `highlights` small bright disks with intensities log-uniform in
// [hi_lo, hi_hi] (values above the clip level exercise saturation).
Image gen_synthetic_scene(int h, int w, int highlights, Rng& rng,
                          double base_max = 0.8, double hi_lo = 50.0,
                          double hi_hi = 2000.0);

// PSF container on disk: k*k 3-channel PFM plus a key=value sidecar
// "<path>.meta" carrying angle_deg and channel gains.
void save_psf(const std::string& path, const PsfStack& psf);
PsfStack load_psf(const std::string& path);

}  // namespace udc
