#pragma once

#include <array>

#include "udc/image.hpp"
#include "udc/optics.hpp"

namespace udc {

enum class PadMode {
  kReplicate,  // edge replication, kernel-radius wide; damps border ringing
  kZero,
};

// Frequency-domain Wiener deconvolution in the linear radiance domain:
// X = conj(H) * Y / (|H|^2 + nsr) per channel, computed on the padded grid
// and center-cropped. Linear in y. nsr = 0 demands a spectrum bounded away
// from zero (min |H| > 1e-12), else NumericError. Output clamped at 0.
Image wiener_deconvolve_linear(const Image& y, const PsfStack& psf, double nsr,
                               PadMode pad = PadMode::kReplicate);

// Tone-domain wrapper: inverse_tonemap -> linear deconvolution -> clamp at
// 0 -> tonemap. Input values must lie in [0, 1).
Image wiener_deconvolve(const Image& y, const PsfStack& psf, double nsr,
                        double alpha, PadMode pad = PadMode::kReplicate);

}  // namespace udc
