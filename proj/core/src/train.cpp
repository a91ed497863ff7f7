#include "udc/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "udc/errors.hpp"
#include "udc/nn/optim.hpp"
#include "udc/nn/tape.hpp"
#include "udc/rng.hpp"

namespace udc::nn {

void TrainConfig::validate() const {
  if (iters < 1) throw std::invalid_argument("train: iters must be >= 1");
  if (batch < 1) throw std::invalid_argument("train: batch must be >= 1");
  if (patch < 8 || patch % 4 != 0)
    throw std::invalid_argument("train: patch must be >= 8 and divisible by 4");
  if (lr_max <= 0.0 || lr_min < 0.0 || lr_min > lr_max)
    throw std::invalid_argument("train: need 0 <= lr_min <= lr_max, lr_max > 0");
  if (restart_period < 1)
    throw std::invalid_argument("train: restart_period must be >= 1");
  if (surrogate_lambda < 0.0)
    throw std::invalid_argument("train: surrogate_lambda must be >= 0");
}

TrainConfig train_from_keyval(const KeyVal& kv) {
  TrainConfig cfg;
  cfg.iters = kv.get_int_or("iters", static_cast<int>(cfg.iters));
  cfg.batch = kv.get_int_or("batch", cfg.batch);
  cfg.patch = kv.get_int_or("patch", cfg.patch);
  cfg.lr_max = kv.get_double_or("lr_max", cfg.lr_max);
  cfg.lr_min = kv.get_double_or("lr_min", cfg.lr_min);
  cfg.restart_period =
      kv.get_int_or("restart_period", static_cast<int>(cfg.restart_period));
  cfg.beta1 = kv.get_double_or("beta1", cfg.beta1);
  cfg.beta2 = kv.get_double_or("beta2", cfg.beta2);
  cfg.eps = kv.get_double_or("eps", cfg.eps);
  cfg.surrogate_lambda =
      kv.get_double_or("surrogate_lambda", cfg.surrogate_lambda);
  cfg.seed = static_cast<uint64_t>(kv.get_int_or("seed", 1));
  cfg.validate();
  return cfg;
}

std::string loss_csv(const std::vector<LossRow>& rows) {
  std::string out = "iter,lr,l1,surrogate,total\n";
  char buf[160];
  for (const LossRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%ld,%.8e,%.8e,%.8e,%.8e\n", r.iter, r.lr,
                  r.l1, r.surrogate, r.total);
    out += buf;
  }
  return out;
}

namespace {

// Batch tensors for a fixed crop: degraded, target, code maps.
struct Batch {
  Tensor<float> deg, tgt, maps;
};

Batch sample_batch(const Dataset& ds, const TrainConfig& cfg, Rng& rng) {
  int P = cfg.patch, B = cfg.batch;
  int b = ds.basis.b;
  Batch out{Tensor<float>(B, 3, P, P), Tensor<float>(B, 3, P, P),
            Tensor<float>(B, b, P, P)};
  for (int bi = 0; bi < B; ++bi) {
    const TrainPair& pair =
        ds.pairs[static_cast<size_t>(rng.next_u64() % ds.pairs.size())];
    const Image& d = pair.degraded;
    if (d.h < P || d.w < P)
      throw std::invalid_argument("train: patch larger than image");
    int y0 = static_cast<int>(rng.next_u64() % static_cast<uint64_t>(d.h - P + 1));
    int x0 = static_cast<int>(rng.next_u64() % static_cast<uint64_t>(d.w - P + 1));
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < P; ++y)
        for (int x = 0; x < P; ++x) {
          out.deg.at(bi, c, y, x) =
              static_cast<float>(d.at(y0 + y, x0 + x, c));
          out.tgt.at(bi, c, y, x) =
              static_cast<float>(pair.target.at(y0 + y, x0 + x, c));
        }
    for (int ci = 0; ci < b; ++ci) {
      float cv = static_cast<float>(pair.code[static_cast<size_t>(ci)]);
      for (int y = 0; y < P; ++y)
        for (int x = 0; x < P; ++x) out.maps.at(bi, ci, y, x) = cv;
    }
  }
  return out;
}

}  // namespace

std::vector<LossRow> train(DiscNet<float>& net, const Dataset& ds,
                           const TrainConfig& cfg) {
  cfg.validate();
  if (ds.pairs.empty()) throw std::invalid_argument("train: empty dataset");
  if (ds.basis.b != net.cfg.b)
    throw std::invalid_argument("train: basis.b != net.b");

  Rng rng(cfg.seed);
  Adam<float> adam(cfg.beta1, cfg.beta2, cfg.eps);
  std::vector<LossRow> rows;
  rows.reserve(static_cast<size_t>(cfg.iters));

  for (long iter = 0; iter < cfg.iters; ++iter) {
    double lr =
        cosine_restart_lr(iter, cfg.restart_period, cfg.lr_max, cfg.lr_min);
    try {
      Batch batch = sample_batch(ds, cfg, rng);
      Tape<float> tape;
      int deg = tape.leaf(std::move(batch.deg));
      int maps = tape.leaf(std::move(batch.maps));
      int tgt = tape.leaf(std::move(batch.tgt));

      std::vector<int> param_ids;
      int out = net.forward(tape, deg, maps, param_ids);
      int l1 = tape.l1_loss(out, tgt);
      int total = l1;
      double sur_v = 0.0;
      if (cfg.surrogate_lambda > 0.0) {
        int sur = tape.grad_l1_loss(out, tgt);
        sur_v = static_cast<double>(tape.value(sur).v[0]);
        total = tape.axpby(l1, 1.0f, sur,
                           static_cast<float>(cfg.surrogate_lambda));
      }
      tape.backward(total);

      std::vector<Tensor<float>*> params;
      std::vector<const Tensor<float>*> grads;
      params.reserve(net.params.size());
      grads.reserve(net.params.size());
      for (size_t i = 0; i < net.params.size(); ++i) {
        params.push_back(&net.params[i].second);
        grads.push_back(&tape.grad(param_ids[i]));
      }
      adam.step(std::move(params), grads, lr);

      rows.push_back({iter, lr, static_cast<double>(tape.value(l1).v[0]),
                      sur_v, static_cast<double>(tape.value(total).v[0])});
    } catch (const NumericError& e) {
      throw NumericError("train: aborted at iteration " + std::to_string(iter) +
                         ": " + e.what());
    }
  }
  return rows;
}

namespace {

Image forward_whole(const DiscNet<float>& net, const Image& im,
                    const std::vector<double>& code) {
  int H = im.h, W = im.w;
  int ph = (H + 3) / 4 * 4, pw = (W + 3) / 4 * 4;

  Tensor<float> deg(1, 3, ph, pw), maps(1, net.cfg.b, ph, pw);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < ph; ++y)
      for (int x = 0; x < pw; ++x)
        deg.at(0, c, y, x) = static_cast<float>(
            im.at(std::min(y, H - 1), std::min(x, W - 1), c));
  for (int ci = 0; ci < net.cfg.b; ++ci) {
    float cv = static_cast<float>(code[static_cast<size_t>(ci)]);
    for (int y = 0; y < ph; ++y)
      for (int x = 0; x < pw; ++x) maps.at(0, ci, y, x) = cv;
  }

  Tape<float> tape;
  int deg_id = tape.leaf(std::move(deg));
  int maps_id = tape.leaf(std::move(maps));
  std::vector<int> param_ids;
  int out = net.forward(tape, deg_id, maps_id, param_ids);
  const Tensor<float>& ov = tape.value(out);

  Image res(H, W, 3);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      for (int c = 0; c < 3; ++c)
        res.at(y, x, c) =
            std::clamp(static_cast<double>(ov.at(0, c, y, x)), 0.0, 1.0);
  return res;
}

}  // namespace

Image infer_image(const DiscNet<float>& net, const Image& degraded,
                  const std::vector<double>& code, int tile) {
  if (degraded.ch != 3)
    throw std::invalid_argument("infer: image must be RGB");
  if (code.size() != static_cast<size_t>(net.cfg.b))
    throw std::invalid_argument("infer: code length != net.b");
  if (tile == 0 || (degraded.h <= tile && degraded.w <= tile))
    return forward_whole(net, degraded, code);
  if (tile < 32 || tile % 4 != 0)
    throw std::invalid_argument("infer: tile must be 0 or >= 32, divisible by 4");

  constexpr int kOverlap = 16;
  int H = degraded.h, W = degraded.w;
  int step = tile - kOverlap;

  Image acc(H, W, 3, 0.0);
  std::vector<double> wsum(static_cast<size_t>(H) * W, 0.0);

  for (int y0 = 0;; y0 += step) {
    int ty = std::min(y0, std::max(0, H - tile));
    int th = std::min(tile, H);
    for (int x0 = 0;; x0 += step) {
      int tx = std::min(x0, std::max(0, W - tile));
      int tw = std::min(tile, W);

      Image sub(th, tw, 3);
      for (int y = 0; y < th; ++y)
        for (int x = 0; x < tw; ++x)
          for (int c = 0; c < 3; ++c)
            sub.at(y, x, c) = degraded.at(ty + y, tx + x, c);
      Image out = forward_whole(net, sub, code);

      for (int y = 0; y < th; ++y) {
        // Linear ramps across the overlapped margins; interior weight 1.
        double wy = 1.0;
        if (ty > 0 && y < kOverlap) wy = (y + 1.0) / (kOverlap + 1.0);
        if (ty + th < H && y >= th - kOverlap)
          wy = std::min(wy, (th - y) / (kOverlap + 1.0));
        for (int x = 0; x < tw; ++x) {
          double wx = 1.0;
          if (tx > 0 && x < kOverlap) wx = (x + 1.0) / (kOverlap + 1.0);
          if (tx + tw < W && x >= tw - kOverlap)
            wx = std::min(wx, (tw - x) / (kOverlap + 1.0));
          double wgt = wy * wx;
          for (int c = 0; c < 3; ++c)
            acc.at(ty + y, tx + x, c) += wgt * out.at(y, x, c);
          wsum[static_cast<size_t>(ty + y) * W + (tx + x)] += wgt;
        }
      }
      if (tx + tw >= W) break;
    }
    if (ty + th >= H) break;
  }

  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      double wgt = wsum[static_cast<size_t>(y) * W + x];
      for (int c = 0; c < 3; ++c)
        acc.at(y, x, c) = std::clamp(acc.at(y, x, c) / wgt, 0.0, 1.0);
    }
  return acc;
}

}  // namespace udc::nn
