#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "udc/nn/tape.hpp"
#include "udc/nn/tensor.hpp"
#include "udc/rng.hpp"

namespace udc::nn {

struct NetConfig {
  int c0 = 16;  // base feature width; scales use c0, 2*c0, 4*c0
  int s = 5;    // predicted per-pixel filter side, odd
  int b = 5;    // kernel code length (condition channels)

  void validate() const {
    if (c0 < 1 || b < 1 || s < 1 || s % 2 == 0)
      throw std::invalid_argument("net: need c0 >= 1, b >= 1, odd s >= 1");
  }
};

constexpr double kLeakySlope = 0.1;

// Restoration network with a dynamic skip connection. Three encoder scales
// (strides 1, 2, 2); a condition branch with the same layout consumes the
// degraded image concatenated with the kernel-code maps and feeds per-scale
// filter generators; the skip tensors are filtered per pixel by the
// generated s*s kernels before the decoder consumes them.
//
// Parameters are an ordered name -> tensor list; the order is fixed by
// construction and is the checkpoint serialization order.
template <typename T>
class DiscNet {
 public:
  NetConfig cfg;
  std::vector<std::pair<std::string, Tensor<T>>> params;

  static DiscNet init(const NetConfig& cfg, uint64_t seed) {
    cfg.validate();
    DiscNet net;
    net.cfg = cfg;
    Rng rng(seed);

    int c0 = cfg.c0, s = cfg.s;
    int widths[3] = {c0, 2 * c0, 4 * c0};
    int enc_in[3] = {3, c0, 2 * c0};
    int cond_in[3] = {3 + cfg.b, c0, 2 * c0};

    auto add_conv = [&](const std::string& name, int cin, int cout, int k) {
      // Kaiming-normal fan-in init matched to the LeakyReLU gain.
      double std_dev =
          std::sqrt(2.0 / ((1.0 + kLeakySlope * kLeakySlope) * cin * k * k));
      Tensor<T> w(cout, cin, k, k);
      for (T& v : w.v) v = static_cast<T>(rng.normal() * std_dev);
      net.params.emplace_back(name + ".w", std::move(w));
      net.params.emplace_back(name + ".b", Tensor<T>(1, cout, 1, 1, T(0)));
    };
    auto add_res = [&](const std::string& name, int width) {
      add_conv(name + ".conv1", width, width, 3);
      add_conv(name + ".conv2", width, width, 3);
    };
    auto add_block = [&](const std::string& name, int cin, int width) {
      add_conv(name + ".conv", cin, width, 3);
      add_res(name + ".res1", width);
      add_res(name + ".res2", width);
    };

    for (int i = 0; i < 3; ++i)
      add_block("enc" + std::to_string(i + 1), enc_in[i], widths[i]);
    for (int i = 0; i < 3; ++i)
      add_block("cond" + std::to_string(i + 1), cond_in[i], widths[i]);
    for (int i = 0; i < 3; ++i) {
      std::string g = "gen" + std::to_string(i + 1);
      add_conv(g + ".conv", widths[i], widths[i], 3);
      add_res(g + ".res1", widths[i]);
      add_res(g + ".res2", widths[i]);
      add_conv(g + ".proj", widths[i], widths[i] * s * s, 1);
    }
    // Decoder, deep to shallow.
    add_conv("dec2.up", widths[2], widths[1], 3);
    add_conv("dec2.fuse", 2 * widths[1], widths[1], 3);
    add_res("dec2.res1", widths[1]);
    add_res("dec2.res2", widths[1]);
    add_conv("dec1.up", widths[1], widths[0], 3);
    add_conv("dec1.fuse", 2 * widths[0], widths[0], 3);
    add_res("dec1.res1", widths[0]);
    add_res("dec1.res2", widths[0]);
    add_conv("head", widths[0], 3, 3);
    return net;
  }

  size_t param_count() const {
    size_t total = 0;
    for (const auto& [name, t] : params) total += t.size();
    return total;
  }

  const Tensor<T>& param(const std::string& name) const {
    for (const auto& [n, t] : params)
      if (n == name) return t;
    throw std::invalid_argument("net: no parameter named " + name);
  }

  // Records the forward graph. deg is (B, 3, H, W) with H, W divisible by 4;
  // maps is (B, b, H, W). Returns the output node (B, 3, H, W) and fills
  // param_ids with one leaf id per parameter, in params order.
  int forward(Tape<T>& tape, int deg, int maps,
              std::vector<int>& param_ids) const {
    const Tensor<T>& x = tape.value(deg);
    const Tensor<T>& m = tape.value(maps);
    if (x.c != 3) throw std::invalid_argument("forward: input must be RGB");
    if (x.h % 4 != 0 || x.w % 4 != 0)
      throw std::invalid_argument("forward: H and W must be divisible by 4");
    if (m.c != cfg.b || m.n != x.n || m.h != x.h || m.w != x.w)
      throw std::invalid_argument("forward: condition maps shape mismatch");

    param_ids.clear();
    std::map<std::string, int> id;
    for (const auto& [name, t] : params) {
      int leaf = tape.leaf(t);
      id[name] = leaf;
      param_ids.push_back(leaf);
    }

    auto conv = [&](int in, const std::string& name, int stride, int pad) {
      return tape.conv2d(in, id.at(name + ".w"), id.at(name + ".b"), stride, pad);
    };
    auto lrelu = [&](int in) { return tape.leaky_relu(in, static_cast<T>(kLeakySlope)); };
    auto res = [&](int in, const std::string& name) {
      int y = lrelu(conv(in, name + ".conv1", 1, 1));
      y = conv(y, name + ".conv2", 1, 1);
      return tape.add(in, y);
    };
    auto block = [&](int in, const std::string& name, int stride) {
      int y = lrelu(conv(in, name + ".conv", stride, 1));
      y = res(y, name + ".res1");
      return res(y, name + ".res2");
    };

    int e1 = block(deg, "enc1", 1);
    int e2 = block(e1, "enc2", 2);
    int e3 = block(e2, "enc3", 2);

    int cond_in = tape.concat_c(deg, maps);
    int h1 = block(cond_in, "cond1", 1);
    int h2 = block(h1, "cond2", 2);
    int h3 = block(h2, "cond3", 2);

    auto gen = [&](int in, const std::string& name) {
      int y = lrelu(conv(in, name + ".conv", 1, 1));
      y = res(y, name + ".res1");
      y = res(y, name + ".res2");
      return conv(y, name + ".proj", 1, 0);
    };
    int r1 = tape.dynamic_conv(e1, gen(h1, "gen1"), cfg.s);
    int r2 = tape.dynamic_conv(e2, gen(h2, "gen2"), cfg.s);
    int r3 = tape.dynamic_conv(e3, gen(h3, "gen3"), cfg.s);

    int u2 = lrelu(conv(tape.upsample2(r3), "dec2.up", 1, 1));
    int d2 = lrelu(conv(tape.concat_c(u2, r2), "dec2.fuse", 1, 1));
    d2 = res(d2, "dec2.res1");
    d2 = res(d2, "dec2.res2");

    int u1 = lrelu(conv(tape.upsample2(d2), "dec1.up", 1, 1));
    int d1 = lrelu(conv(tape.concat_c(u1, r1), "dec1.fuse", 1, 1));
    d1 = res(d1, "dec1.res1");
    d1 = res(d1, "dec1.res2");

    return conv(d1, "head", 1, 1);
  }
};

}  // namespace udc::nn
