#include "udc/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace udc {

namespace {
// FFTW's planner mutates global state; execution of a made plan is free of
// that, so only planning and destruction are serialized.
std::mutex g_planner_mutex;
}  // namespace

void fft2(int h, int w, std::complex<double>* data, bool inverse) {
  if (h <= 0 || w <= 0) throw std::invalid_argument("fft2: bad grid");
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_planner_mutex);
    plan = fftw_plan_dft_2d(h, w, buf, buf,
                            inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("fft2: planner failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(g_planner_mutex);
    fftw_destroy_plan(plan);
  }
  if (inverse) {
    double scale = 1.0 / (static_cast<double>(h) * static_cast<double>(w));
    size_t n = static_cast<size_t>(h) * w;
    for (size_t i = 0; i < n; ++i) data[i] *= scale;
  }
}

}  // namespace udc
