#pragma once

#include <string>
#include <vector>

#include "udc/image.hpp"
#include "udc/kernel_code.hpp"

namespace udc::nn {

struct TrainPair {
  std::string name;           // stem, e.g. "pair_0003"
  Image degraded;             // tone domain, [0, 1)
  Image target;               // tone domain, [0, 1)
  std::vector<double> code;   // kernel code, length basis.b
  double angle_deg = 0.0;
  std::string psf_name;
};

struct Dataset {
  std::vector<TrainPair> pairs;
  KernelBasis basis;
};

// Writes <stem>_deg.pfm, <stem>_tgt.pfm and <stem>.meta (psf, angle_deg,
// code as a comma list) into dir.
void save_pair(const std::string& dir, const TrainPair& pair);

// Loads every *_deg.pfm with its companions plus basis.udck from dir,
// sorted by name. Throws IoError when the directory holds no pairs or the
// code lengths disagree with the basis.
Dataset load_dataset(const std::string& dir);

}  // namespace udc::nn
