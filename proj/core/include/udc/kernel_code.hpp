#pragma once

#include <string>
#include <vector>

#include "udc/image.hpp"
#include "udc/optics.hpp"

namespace udc {

// PCA basis over flattened luminance kernels resampled to side*side.
// components are unit-norm rows, sorted by decreasing eigenvalue; a
// rank-deficient fit pads trailing zero components.
struct KernelBasis {
  int b = 0;
  int side = 0;
  std::vector<double> mean;        // side*side
  std::vector<double> components;  // b * side*side, row-major
  std::vector<double> eigenvalues; // b, descending (zeros for padded rows)

  const double* component(int i) const {
    return components.data() + static_cast<size_t>(i) * side * side;
  }
};

// Rec.709 luminance of a PSF stack, area-resampled to side*side and
// renormalized to unit sum. Works for up- and downsampling.
std::vector<double> kernel_signature(const PsfStack& psf, int side);

// Box-filter resample of a single-channel grid (exact area averaging).
std::vector<double> resample_area(const std::vector<double>& src, int sh,
                                  int sw, int dh, int dw);

// PCA fit via the Gram matrix of the centered signatures (m x m eigenproblem
// instead of D x D; exact for the leading min(m-1, b) components).
// Requires at least 2 kernels; if the centered rank is below b the remaining
// components are zero and a note is appended to `warnings`.
KernelBasis fit_pca(const std::vector<PsfStack>& kernels, int b, int side = 64,
                    std::vector<std::string>* warnings = nullptr);

// code_i = <signature - mean, component_i>.
std::vector<double> encode_kernel(const PsfStack& psf, const KernelBasis& basis);

// mean + sum_i code_i * component_i, clamped at 0.
std::vector<double> decode_kernel(const std::vector<double>& code,
                                  const KernelBasis& basis);

// Spatially constant condition maps: out(y, x, i) = code[i] for every pixel.
Image stretch_code(const std::vector<double>& code, int h, int w);

// Binary container: magic "UDCK", u16 version, u16 b, u32 side, then
// eigenvalues, mean and components as little-endian float32.
void save_basis(const std::string& path, const KernelBasis& basis);
KernelBasis load_basis(const std::string& path);

}  // namespace udc
