#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "udc/keyval.hpp"
#include "udc/nn/dataset.hpp"
#include "udc/nn/discnet.hpp"

namespace udc::nn {

struct TrainConfig {
  long iters = 200;
  int batch = 2;
  int patch = 32;            // crop side, divisible by 4
  double lr_max = 2e-4;
  double lr_min = 1e-7;
  long restart_period = 200000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double surrogate_lambda = 0.0;  // image-gradient L1 weight; 0 disables
  uint64_t seed = 1;

  void validate() const;
};

// Keys: iters batch patch lr_max lr_min restart_period beta1 beta2 eps
// surrogate_lambda seed. All optional.
TrainConfig train_from_keyval(const KeyVal& kv);

struct LossRow {
  long iter = 0;
  double lr = 0.0;
  double l1 = 0.0;
  double surrogate = 0.0;
  double total = 0.0;
};

// "iter,lr,l1,surrogate,total" with %.8e floats; identical runs produce
// identical strings.
std::string loss_csv(const std::vector<LossRow>& rows);

// Runs the optimization in place. Batches are drawn with the seeded RNG
// (pair index, then crop offsets), so a given (dataset, config) pair yields
// a bit-identical loss trajectory on every run. A non-finite value anywhere
// in the graph aborts with NumericError naming the iteration.
std::vector<LossRow> train(DiscNet<float>& net, const Dataset& ds,
                           const TrainConfig& cfg);

// Single-image restoration. Pads H and W up to multiples of 4 by edge
// replication and crops back. tile = 0 runs the whole frame in one forward;
// tile > 0 (divisible by 4, > 32) blends tile*tile windows overlapped by
// 16 pixels with linear ramps. Output clamped to [0, 1].
Image infer_image(const DiscNet<float>& net, const Image& degraded,
                  const std::vector<double>& code, int tile = 0);

}  // namespace udc::nn
