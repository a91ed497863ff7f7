#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "udc/errors.hpp"
#include "udc/nn/checkpoint.hpp"
#include "udc/nn/discnet.hpp"
#include "udc/nn/optim.hpp"
#include "udc/nn/tape.hpp"
#include "udc/nn/tensor.hpp"
#include "udc/rng.hpp"

using udc::nn::Tape;
using udc::nn::Tensor;

namespace {

// Values bounded away from zero so kinks in leaky_relu / l1 stay put under
// the finite-difference step.
Tensor<double> signed_random(int n, int c, int h, int w, udc::Rng& rng,
                             double lo = 0.1, double hi = 1.0) {
  Tensor<double> t(n, c, h, w);
  for (double& v : t.v) {
    double mag = rng.uniform(lo, hi);
    v = (rng.next_u64() & 1) ? mag : -mag;
  }
  return t;
}

// Strided zero-padded cross-correlation by direct summation.
Tensor<double> nn_conv_direct(const Tensor<double>& x, const Tensor<double>& w,
                              const Tensor<double>& b, int stride, int pad) {
  int oh = (x.h + 2 * pad - w.h) / stride + 1;
  int ow = (x.w + 2 * pad - w.w) / stride + 1;
  Tensor<double> out(x.n, w.n, oh, ow);
  for (int bi = 0; bi < x.n; ++bi)
    for (int oc = 0; oc < w.n; ++oc)
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox) {
          double acc = b.at(0, oc, 0, 0);
          for (int ic = 0; ic < x.c; ++ic)
            for (int ky = 0; ky < w.h; ++ky)
              for (int kx = 0; kx < w.w; ++kx) {
                int iy = oy * stride - pad + ky;
                int ix = ox * stride - pad + kx;
                if (iy < 0 || iy >= x.h || ix < 0 || ix >= x.w) continue;
                acc += x.at(bi, ic, iy, ix) * w.at(oc, ic, ky, kx);
              }
          out.at(bi, oc, oy, ox) = acc;
        }
  return out;
}

// Checks every partial derivative of a scalar graph against central
// differences. `build` must construct the same graph from the given leaf
// tensors each time it is called.
void check_gradients(
    std::vector<Tensor<double>> inputs,
    const std::function<int(Tape<double>&, const std::vector<int>&)>& build,
    double h = 1e-3, double tol = 1e-4) {
  auto run = [&](const std::vector<Tensor<double>>& in, Tape<double>** tape_out,
                 std::vector<int>* ids_out) {
    auto* tape = new Tape<double>();
    std::vector<int> ids;
    ids.reserve(in.size());
    for (const auto& t : in) ids.push_back(tape->leaf(t));
    int loss = build(*tape, ids);
    REQUIRE(tape->value(loss).size() == 1);
    if (tape_out) *tape_out = tape;
    if (ids_out) *ids_out = ids;
    double v = tape->value(loss).v[0];
    if (!tape_out) delete tape;
    return std::make_pair(v, loss);
  };

  Tape<double>* tape = nullptr;
  std::vector<int> ids;
  auto [loss_value, loss_id] = run(inputs, &tape, &ids);
  tape->backward(loss_id);
  std::vector<Tensor<double>> analytic;
  analytic.reserve(inputs.size());
  for (int id : ids) analytic.push_back(tape->grad(id));
  delete tape;

  for (size_t t = 0; t < inputs.size(); ++t)
    for (size_t j = 0; j < inputs[t].size(); ++j) {
      double keep = inputs[t].v[j];
      inputs[t].v[j] = keep + h;
      double up = run(inputs, nullptr, nullptr).first;
      inputs[t].v[j] = keep - h;
      double dn = run(inputs, nullptr, nullptr).first;
      inputs[t].v[j] = keep;
      double fd = (up - dn) / (2.0 * h);
      double an = analytic[t].v[j];
      double scale = std::max({1e-6, std::fabs(fd), std::fabs(an)});
      INFO("tensor ", t, " element ", j, " fd=", fd, " analytic=", an);
      CHECK(std::fabs(fd - an) <= tol * scale);
    }
}

// Runs the graph once on unperturbed inputs and returns the output offset by
// +-0.5 per element. Frozen before the sweep, this target keeps the l1 loss
// locally linear (perturbations move the output by far less than 0.5) and the
// random signs make gradient cancellation visible. Computing the target from
// the perturbed output instead would make the loss constant.
Tensor<double> offset_target(
    const std::vector<Tensor<double>>& inputs,
    const std::function<int(Tape<double>&, const std::vector<int>&)>& out,
    uint64_t seed) {
  Tape<double> tape;
  std::vector<int> ids;
  ids.reserve(inputs.size());
  for (const auto& t : inputs) ids.push_back(tape.leaf(t));
  Tensor<double> tgt = tape.value(out(tape, ids));
  udc::Rng rng(seed);
  for (double& v : tgt.v) v += (rng.next_u64() & 1) ? 0.5 : -0.5;
  return tgt;
}

size_t expected_param_count(int c0, int s, int b) {
  auto block = [](int cin, int w) {
    return 9 * cin * w + 36 * w * w + 5 * w;
  };
  auto gen = [s](int w) {
    return 45 * w * w + 5 * w + w * w * s * s + w * s * s;
  };
  int w1 = c0, w2 = 2 * c0, w3 = 4 * c0;
  size_t enc = block(3, w1) + block(w1, w2) + block(w2, w3);
  size_t cond = block(3 + b, w1) + block(w1, w2) + block(w2, w3);
  size_t gens = gen(w1) + gen(w2) + gen(w3);
  size_t dec2 = (9 * w3 * w2 + w2) + (9 * 2 * w2 * w2 + w2) + 36 * w2 * w2 + 4 * w2;
  size_t dec1 = (9 * w2 * w1 + w1) + (9 * 2 * w1 * w1 + w1) + 36 * w1 * w1 + 4 * w1;
  size_t head = 27 * w1 + 3;
  return enc + cond + gens + dec2 + dec1 + head;
}

}  // namespace

TEST_CASE("conv2d forward matches direct summation") {
  udc::Rng rng(81);
  for (auto [stride, pad, k] : {std::tuple{1, 1, 3}, {2, 1, 3}, {1, 0, 1}}) {
    Tensor<double> x = signed_random(2, 3, 6, 5, rng);
    Tensor<double> w = signed_random(4, 3, k, k, rng);
    Tensor<double> b = signed_random(1, 4, 1, 1, rng);
    Tape<double> tape;
    int y = tape.conv2d(tape.leaf(x), tape.leaf(w), tape.leaf(b), stride, pad);
    Tensor<double> want = nn_conv_direct(x, w, b, stride, pad);
    REQUIRE(tape.value(y).same_shape(want));
    for (size_t i = 0; i < want.size(); ++i)
      CHECK(tape.value(y).v[i] == doctest::Approx(want.v[i]).epsilon(1e-12));
  }
}

TEST_CASE("conv2d gradients match finite differences") {
  udc::Rng rng(82);
  for (auto [stride, pad] : {std::pair{1, 1}, {2, 1}}) {
    std::vector<Tensor<double>> in;
    in.push_back(signed_random(1, 2, 5, 4, rng));
    in.push_back(signed_random(3, 2, 3, 3, rng, 0.1, 0.5));
    in.push_back(signed_random(1, 3, 1, 1, rng));
    int s = stride;
    auto out = [s, pad](Tape<double>& t, const std::vector<int>& id) {
      return t.conv2d(id[0], id[1], id[2], s, pad);
    };
    Tensor<double> tgt = offset_target(in, out, 101);
    check_gradients(in, [&](Tape<double>& t, const std::vector<int>& id) {
      return t.l1_loss(out(t, id), t.leaf(tgt));
    });
  }
}

TEST_CASE("leaky_relu, add and axpby gradients match finite differences") {
  udc::Rng rng(83);
  std::vector<Tensor<double>> in;
  in.push_back(signed_random(1, 2, 3, 3, rng));
  in.push_back(signed_random(1, 2, 3, 3, rng));
  auto out = [](Tape<double>& t, const std::vector<int>& id) {
    int a = t.leaky_relu(id[0], 0.1);
    int b = t.axpby(a, 0.7, id[1], -0.3);
    return t.add(b, id[0]);
  };
  Tensor<double> tgt = offset_target(in, out, 102);
  check_gradients(in, [&](Tape<double>& t, const std::vector<int>& id) {
    return t.l1_loss(out(t, id), t.leaf(tgt));
  });
}

TEST_CASE("concat and upsample gradients match finite differences") {
  udc::Rng rng(84);
  std::vector<Tensor<double>> in;
  in.push_back(signed_random(1, 2, 2, 3, rng));
  in.push_back(signed_random(1, 1, 2, 3, rng));
  auto out = [](Tape<double>& t, const std::vector<int>& id) {
    int up = t.upsample2(id[0]);
    int up2 = t.upsample2(id[1]);
    return t.concat_c(up, up2);
  };
  Tensor<double> tgt = offset_target(in, out, 103);
  check_gradients(in, [&](Tape<double>& t, const std::vector<int>& id) {
    return t.l1_loss(out(t, id), t.leaf(tgt));
  });
}

TEST_CASE("dynamic_conv forward matches direct summation and identity filters") {
  udc::Rng rng(85);
  for (int s : {3, 5}) {
    Tensor<double> feat = signed_random(2, 2, 6, 5, rng);
    Tensor<double> filt = signed_random(2, 2 * s * s, 6, 5, rng, 0.05, 0.5);
    Tape<double> tape;
    int y = tape.dynamic_conv(tape.leaf(feat), tape.leaf(filt), s);
    Tensor<double> want = oracle::dynamic_conv_direct(feat, filt, s);
    for (size_t i = 0; i < want.size(); ++i)
      CHECK(tape.value(y).v[i] == doctest::Approx(want.v[i]).epsilon(1e-12));

    // A one-hot center tap at every pixel must reproduce the features
    // exactly, padding included.
    Tensor<double> ident(2, 2 * s * s, 6, 5, 0.0);
    int center = (s / 2) * s + (s / 2);
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int yy = 0; yy < 6; ++yy)
          for (int xx = 0; xx < 5; ++xx)
            ident.at(b, c * s * s + center, yy, xx) = 1.0;
    Tape<double> tape2;
    int y2 = tape2.dynamic_conv(tape2.leaf(feat), tape2.leaf(ident), s);
    CHECK(tape2.value(y2).v == feat.v);
  }
}

TEST_CASE("dynamic_conv gradients match finite differences") {
  udc::Rng rng(86);
  std::vector<Tensor<double>> in;
  in.push_back(signed_random(1, 2, 4, 4, rng));
  in.push_back(signed_random(1, 2 * 9, 4, 4, rng, 0.05, 0.4));
  auto out = [](Tape<double>& t, const std::vector<int>& id) {
    return t.dynamic_conv(id[0], id[1], 3);
  };
  Tensor<double> tgt = offset_target(in, out, 104);
  check_gradients(in, [&](Tape<double>& t, const std::vector<int>& id) {
    return t.l1_loss(out(t, id), t.leaf(tgt));
  });
}

TEST_CASE("image-gradient l1 surrogate gradients match finite differences") {
  // Hand values keep every forward difference at least 0.05 away from the
  // kink, so the loss is locally linear around the test point.
  Tensor<double> pred(1, 1, 3, 4);
  pred.v = {0.9, 0.1, 0.7, 0.2, 0.3, 0.8, 0.05, 0.6, 0.5, 0.45, 0.95, 0.15};
  Tensor<double> tgt(1, 1, 3, 4, 0.0);
  check_gradients({pred, tgt},
                  [](Tape<double>& t, const std::vector<int>& id) {
                    return t.grad_l1_loss(id[0], id[1]);
                  });
}

TEST_CASE("l1 loss value and gradient") {
  Tensor<double> a(1, 1, 1, 4);
  a.v = {1.0, -2.0, 0.5, 3.0};
  Tensor<double> b(1, 1, 1, 4);
  b.v = {0.0, 1.0, 0.5, -1.0};
  Tape<double> tape;
  int la = tape.leaf(a), lb = tape.leaf(b);
  int loss = tape.l1_loss(la, lb);
  CHECK(tape.value(loss).v[0] == doctest::Approx((1 + 3 + 0 + 4) / 4.0));
  tape.backward(loss);
  // Tied elements contribute zero subgradient.
  CHECK(tape.grad(la).v[0] == doctest::Approx(0.25));
  CHECK(tape.grad(la).v[1] == doctest::Approx(-0.25));
  CHECK(tape.grad(la).v[2] == doctest::Approx(0.0));
  CHECK(tape.grad(la).v[3] == doctest::Approx(0.25));
  CHECK(tape.grad(lb).v[1] == doctest::Approx(0.25));
}

TEST_CASE("non-finite intermediate values abort with the op name") {
  Tensor<double> x(1, 1, 2, 2, 1e200);
  Tensor<double> w(1, 1, 1, 1, 1e200);
  Tensor<double> b(1, 1, 1, 1, 0.0);
  Tape<double> tape;
  try {
    tape.conv2d(tape.leaf(x), tape.leaf(w), tape.leaf(b), 1, 0);
    FAIL("expected NumericError");
  } catch (const udc::NumericError& e) {
    CHECK(std::string(e.what()).find("conv2d") != std::string::npos);
  }
}

TEST_CASE("adam with a constant gradient takes bias-corrected unit steps") {
  Tensor<double> p(1, 1, 1, 3);
  p.v = {1.0, -0.5, 2.0};
  Tensor<double> g(1, 1, 1, 3);
  g.v = {0.3, -0.02, 1.7};
  Tensor<double> p0 = p;

  udc::nn::Adam<double> opt(0.9, 0.999, 1e-8);
  double lr = 1e-2;
  opt.step({&p}, {&g}, lr);
  // With constant g the bias-corrected moments equal g and g*g at every
  // step, so each update is lr * g / (|g| + eps) = lr * sign(g), nearly.
  for (int j = 0; j < 3; ++j) {
    double want = p0.v[j] - lr * g.v[j] / (std::fabs(g.v[j]) + 1e-8);
    CHECK(p.v[j] == doctest::Approx(want).epsilon(1e-12));
  }
  opt.step({&p}, {&g}, lr);
  for (int j = 0; j < 3; ++j) {
    double want = p0.v[j] - 2 * lr * g.v[j] / (std::fabs(g.v[j]) + 1e-8);
    CHECK(p.v[j] == doctest::Approx(want).epsilon(1e-10));
  }
  CHECK(opt.step_count() == 2);
}

TEST_CASE("cosine schedule hits its endpoints and restarts") {
  double hi = 2e-4, lo = 1e-7;
  long period = 1000;
  CHECK(udc::nn::cosine_restart_lr(0, period, hi, lo) == doctest::Approx(hi));
  CHECK(udc::nn::cosine_restart_lr(500, period, hi, lo) ==
        doctest::Approx(0.5 * (hi + lo)));
  CHECK(udc::nn::cosine_restart_lr(999, period, hi, lo) ==
        doctest::Approx(lo).epsilon(1e-2));
  CHECK(udc::nn::cosine_restart_lr(1000, period, hi, lo) == doctest::Approx(hi));
  for (long t = 1; t < period; ++t)
    CHECK(udc::nn::cosine_restart_lr(t, period, hi, lo) <
          udc::nn::cosine_restart_lr(t - 1, period, hi, lo));
  CHECK_THROWS_AS(udc::nn::cosine_restart_lr(1, 0, hi, lo),
                  std::invalid_argument);
}

TEST_CASE("network construction is deterministic in the seed") {
  udc::nn::NetConfig cfg;
  cfg.c0 = 4;
  cfg.s = 3;
  cfg.b = 2;
  auto a = udc::nn::DiscNet<float>::init(cfg, 7);
  auto b = udc::nn::DiscNet<float>::init(cfg, 7);
  auto c = udc::nn::DiscNet<float>::init(cfg, 8);
  REQUIRE(a.params.size() == b.params.size());
  bool all_equal = true, any_diff_seed = false;
  for (size_t i = 0; i < a.params.size(); ++i) {
    CHECK(a.params[i].first == b.params[i].first);
    if (a.params[i].second.v != b.params[i].second.v) all_equal = false;
    if (a.params[i].second.v != c.params[i].second.v) any_diff_seed = true;
  }
  CHECK(all_equal);
  CHECK(any_diff_seed);
}

TEST_CASE("parameter count matches the layer-by-layer formula") {
  for (auto [c0, s, b] : {std::tuple{16, 5, 5}, {8, 3, 5}, {4, 7, 2}}) {
    udc::nn::NetConfig cfg;
    cfg.c0 = c0;
    cfg.s = s;
    cfg.b = b;
    auto net = udc::nn::DiscNet<float>::init(cfg, 1);
    CHECK(net.param_count() == expected_param_count(c0, s, b));
  }
  udc::nn::NetConfig def;
  auto net = udc::nn::DiscNet<float>::init(def, 1);
  CHECK(net.param_count() == 908419);
}

TEST_CASE("forward pass shape checks and output size") {
  udc::nn::NetConfig cfg;
  cfg.c0 = 4;
  cfg.s = 3;
  cfg.b = 2;
  auto net = udc::nn::DiscNet<float>::init(cfg, 11);

  Tape<float> tape;
  udc::Rng rng(87);
  Tensor<float> deg(1, 3, 8, 8);
  for (float& v : deg.v) v = static_cast<float>(rng.uniform());
  Tensor<float> maps(1, 2, 8, 8);
  for (float& v : maps.v) v = static_cast<float>(rng.uniform());
  std::vector<int> ids;
  int out = net.forward(tape, tape.leaf(deg), tape.leaf(maps), ids);
  const Tensor<float>& ov = tape.value(out);
  CHECK(ov.n == 1);
  CHECK(ov.c == 3);
  CHECK(ov.h == 8);
  CHECK(ov.w == 8);
  CHECK(ids.size() == net.params.size());

  Tape<float> bad;
  Tensor<float> odd(1, 3, 6, 8, 0.1f);
  Tensor<float> m2(1, 2, 6, 8, 0.1f);
  CHECK_THROWS_AS(net.forward(bad, bad.leaf(odd), bad.leaf(m2), ids),
                  std::invalid_argument);
  Tape<float> bad2;
  Tensor<float> wrongc(1, 3, 8, 8, 0.1f);
  CHECK_THROWS_AS(net.forward(bad2, bad2.leaf(deg), bad2.leaf(wrongc), ids),
                  std::invalid_argument);
}

TEST_CASE("checkpoints round trip bit-exactly and reject corruption") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "udc_ckpt_test";
  fs::create_directories(dir);

  udc::nn::NetConfig cfg;
  cfg.c0 = 4;
  cfg.s = 3;
  cfg.b = 2;
  auto net = udc::nn::DiscNet<float>::init(cfg, 3);
  std::string path = (dir / "net.udcn").string();
  udc::nn::save_net(path, net);
  auto back = udc::nn::load_net(path);
  CHECK(back.cfg.c0 == cfg.c0);
  CHECK(back.cfg.s == cfg.s);
  CHECK(back.cfg.b == cfg.b);
  REQUIRE(back.params.size() == net.params.size());
  for (size_t i = 0; i < net.params.size(); ++i) {
    CHECK(back.params[i].first == net.params[i].first);
    CHECK(back.params[i].second.v == net.params[i].second.v);
  }

  // Truncated payload.
  {
    FILE* f = std::fopen(path.c_str(), "rb");
    REQUIRE(f);
    std::fseek(f, 0, SEEK_END);
    long sz = std::ftell(f);
    std::fseek(f, 0, SEEK_SET);
    std::vector<char> buf(static_cast<size_t>(sz));
    REQUIRE(std::fread(buf.data(), 1, buf.size(), f) == buf.size());
    std::fclose(f);
    std::string trunc = (dir / "trunc.udcn").string();
    f = std::fopen(trunc.c_str(), "wb");
    std::fwrite(buf.data(), 1, buf.size() / 2, f);
    std::fclose(f);
    CHECK_THROWS_AS(udc::nn::load_net(trunc), udc::IoError);

    buf[0] = 'X';  // break the magic
    std::string badmagic = (dir / "badmagic.udcn").string();
    f = std::fopen(badmagic.c_str(), "wb");
    std::fwrite(buf.data(), 1, buf.size(), f);
    std::fclose(f);
    CHECK_THROWS_AS(udc::nn::load_net(badmagic), udc::IoError);
  }
  fs::remove_all(dir);
}
