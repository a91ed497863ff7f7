#pragma once

#include <string>

#include "udc/nn/discnet.hpp"

namespace udc::nn {

// Binary checkpoint: magic "UDCN", u16 version, u16 c0/s/b, u32 tensor
// count, then per tensor u16 name length, name, u8 rank, u32 dims and a
// little-endian float32 payload. The loader rebuilds the architecture from
// the header and requires tensor names and shapes to match it exactly.
void save_net(const std::string& path, const DiscNet<float>& net);
DiscNet<float> load_net(const std::string& path);

}  // namespace udc::nn
