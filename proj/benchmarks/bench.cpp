#include <benchmark/benchmark.h>

#include <cmath>

#include "udc/formation.hpp"
#include "udc/nn/discnet.hpp"
#include "udc/nn/tape.hpp"
#include "udc/optics.hpp"
#include "udc/rng.hpp"

namespace {

udc::PsfStack gaussian_kernel(int k, double sigma) {
  udc::PsfStack psf(k);
  int r = (k - 1) / 2;
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (int y = 0; y < k; ++y)
      for (int x = 0; x < k; ++x) {
        double dy = y - r, dx = x - r;
        double v = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
        psf.at(c, y, x) = v;
        sum += v;
      }
    for (int y = 0; y < k; ++y)
      for (int x = 0; x < k; ++x) psf.at(c, y, x) /= sum;
  }
  return psf;
}

void BM_ConvolvePsf(benchmark::State& state) {
  int size = static_cast<int>(state.range(0));
  int k = static_cast<int>(state.range(1));
  udc::Rng rng(1);
  udc::Image scene(size, size, 3);
  for (double& v : scene.data) v = rng.uniform();
  udc::PsfStack psf = gaussian_kernel(k, k / 6.0);
  for (auto _ : state) {
    udc::Image out = udc::convolve_psf(scene, psf);
    benchmark::DoNotOptimize(out.data.data());
  }
}
BENCHMARK(BM_ConvolvePsf)->Args({128, 9})->Args({128, 63})->Args({256, 127});

void BM_FresnelPropagate(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  udc::Rng rng(2);
  udc::ComplexField field(n, 2e-6);
  for (auto& a : field.a) a = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  std::vector<std::string> sink;
  for (auto _ : state) {
    udc::ComplexField f = field;
    udc::fresnel_propagate(f, 530e-9, 2e-3, &sink);
    benchmark::DoNotOptimize(f.a.data());
  }
}
BENCHMARK(BM_FresnelPropagate)->Arg(256)->Arg(512);

void BM_DynamicConv(benchmark::State& state) {
  int s = static_cast<int>(state.range(0));
  udc::Rng rng(3);
  udc::nn::Tensor<float> feat(1, 16, 64, 64);
  for (float& v : feat.v) v = static_cast<float>(rng.uniform());
  udc::nn::Tensor<float> filt(1, 16 * s * s, 64, 64);
  for (float& v : filt.v) v = static_cast<float>(rng.uniform(-0.1, 0.1));
  for (auto _ : state) {
    udc::nn::Tape<float> tape;
    int out = tape.dynamic_conv(tape.leaf(feat), tape.leaf(filt), s);
    benchmark::DoNotOptimize(tape.value(out).v.data());
  }
}
BENCHMARK(BM_DynamicConv)->Arg(3)->Arg(5);

void BM_NetForward(benchmark::State& state) {
  udc::nn::NetConfig cfg;
  cfg.c0 = static_cast<int>(state.range(0));
  cfg.s = 3;
  cfg.b = 5;
  auto net = udc::nn::DiscNet<float>::init(cfg, 4);
  udc::Rng rng(5);
  udc::nn::Tensor<float> deg(1, 3, 64, 64), maps(1, 5, 64, 64);
  for (float& v : deg.v) v = static_cast<float>(rng.uniform());
  for (float& v : maps.v) v = static_cast<float>(rng.uniform(-0.5, 0.5));
  for (auto _ : state) {
    udc::nn::Tape<float> tape;
    std::vector<int> ids;
    int out = net.forward(tape, tape.leaf(deg), tape.leaf(maps), ids);
    benchmark::DoNotOptimize(tape.value(out).v.data());
  }
}
BENCHMARK(BM_NetForward)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
