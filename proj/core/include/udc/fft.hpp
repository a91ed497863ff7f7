#pragma once

#include <complex>

namespace udc {

// In-place 2-D DFT on a row-major h*w grid. Forward is unnormalized;
// the inverse applies the 1/(h*w) factor, so ifft2(fft2(x)) == x up to
// roundoff. Safe to call concurrently (the planner lock is internal).
void fft2(int h, int w, std::complex<double>* data, bool inverse);

}  // namespace udc
