#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "udc/errors.hpp"
#include "udc/nn/tensor.hpp"
#include "udc/parallel.hpp"

namespace udc::nn {

// Reverse-mode autodiff over a recorded op sequence. Each op appends a node
// holding its output value and a closure that scatters the node's gradient
// into its parents. Nodes are appended after their inputs, so walking the
// list backwards is a valid topological order.
//
// Every backward rule below is written in gather form: loops parallelize
// only over disjoint output elements and each element's reduction runs in a
// fixed sequential order, so results are bit-identical for any worker count.
template <typename T>
class Tape {
 public:
  int leaf(Tensor<T> value) {
    nodes_.push_back({std::move(value), nullptr, "leaf"});
    return static_cast<int>(nodes_.size()) - 1;
  }

  const Tensor<T>& value(int id) const { return nodes_[static_cast<size_t>(id)].value; }

  Tensor<T>& grad(int id) {
    if (grads_.size() < nodes_.size()) grads_.resize(nodes_.size());
    Tensor<T>& g = grads_[static_cast<size_t>(id)];
    if (g.size() == 0) {
      const Tensor<T>& v = nodes_[static_cast<size_t>(id)].value;
      g = Tensor<T>(v.n, v.c, v.h, v.w, T(0));
    }
    return g;
  }

  size_t node_count() const { return nodes_.size(); }

  // y = conv(x, w) + b. w is (oc, ic, kh, kw), b is (1, oc, 1, 1), zero
  // padding, floor output size.
  int conv2d(int x, int w, int b, int stride, int pad) {
    const Tensor<T>& xv = value(x);
    const Tensor<T>& wv = value(w);
    const Tensor<T>& bv = value(b);
    if (wv.c != xv.c) throw std::invalid_argument("conv2d: channel mismatch");
    if (bv.c != wv.n || bv.n != 1 || bv.h != 1 || bv.w != 1)
      throw std::invalid_argument("conv2d: bad bias shape");
    if (stride < 1 || pad < 0) throw std::invalid_argument("conv2d: bad stride/pad");

    int oh = (xv.h + 2 * pad - wv.h) / stride + 1;
    int ow = (xv.w + 2 * pad - wv.w) / stride + 1;
    if (oh <= 0 || ow <= 0) throw std::invalid_argument("conv2d: empty output");

    Tensor<T> out(xv.n, wv.n, oh, ow);
    const int kh = wv.h, kw = wv.w, IC = xv.c;
    parallel_for(0, static_cast<int64_t>(xv.n) * wv.n, [&](int64_t bo) {
      int bi = static_cast<int>(bo / wv.n);
      int oc = static_cast<int>(bo % wv.n);
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          T acc = bv.at(0, oc, 0, 0);
          for (int ic = 0; ic < IC; ++ic)
            for (int ky = 0; ky < kh; ++ky) {
              int iy = oy * stride - pad + ky;
              if (iy < 0 || iy >= xv.h) continue;
              for (int kx = 0; kx < kw; ++kx) {
                int ix = ox * stride - pad + kx;
                if (ix < 0 || ix >= xv.w) continue;
                acc += xv.at(bi, ic, iy, ix) * wv.at(oc, ic, ky, kx);
              }
            }
          out.at(bi, oc, oy, ox) = acc;
        }
      }
    });

    return push(std::move(out), "conv2d", [this, x, w, b, stride, pad](int self) {
      const Tensor<T>& gy = grad(self);
      const Tensor<T>& xv = value(x);
      const Tensor<T>& wv = value(w);
      const int kh = wv.h, kw = wv.w, OC = wv.n, IC = xv.c;
      const int oh = gy.h, ow = gy.w;

      Tensor<T>& gx = grad(x);
      parallel_for(0, static_cast<int64_t>(xv.n) * IC, [&](int64_t bi_ic) {
        int bi = static_cast<int>(bi_ic / IC);
        int ic = static_cast<int>(bi_ic % IC);
        for (int iy = 0; iy < xv.h; ++iy)
          for (int ix = 0; ix < xv.w; ++ix) {
            T acc = T(0);
            for (int oc = 0; oc < OC; ++oc)
              for (int ky = 0; ky < kh; ++ky) {
                int ty = iy + pad - ky;
                if (ty < 0 || ty % stride != 0) continue;
                int oy = ty / stride;
                if (oy >= oh) continue;
                for (int kx = 0; kx < kw; ++kx) {
                  int tx = ix + pad - kx;
                  if (tx < 0 || tx % stride != 0) continue;
                  int ox = tx / stride;
                  if (ox >= ow) continue;
                  acc += gy.at(bi, oc, oy, ox) * wv.at(oc, ic, ky, kx);
                }
              }
            gx.at(bi, ic, iy, ix) += acc;
          }
      });

      Tensor<T>& gw = grad(w);
      parallel_for(0, OC, [&](int64_t oc) {
        for (int ic = 0; ic < IC; ++ic)
          for (int ky = 0; ky < kh; ++ky)
            for (int kx = 0; kx < kw; ++kx) {
              T acc = T(0);
              for (int bi = 0; bi < xv.n; ++bi)
                for (int oy = 0; oy < oh; ++oy) {
                  int iy = oy * stride - pad + ky;
                  if (iy < 0 || iy >= xv.h) continue;
                  for (int ox = 0; ox < ow; ++ox) {
                    int ix = ox * stride - pad + kx;
                    if (ix < 0 || ix >= xv.w) continue;
                    acc += gy.at(bi, static_cast<int>(oc), oy, ox) *
                           xv.at(bi, ic, iy, ix);
                  }
                }
              gw.at(static_cast<int>(oc), ic, ky, kx) += acc;
            }
      });

      Tensor<T>& gb = grad(b);
      for (int oc = 0; oc < OC; ++oc) {
        T acc = T(0);
        for (int bi = 0; bi < xv.n; ++bi)
          for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox) acc += gy.at(bi, oc, oy, ox);
        gb.at(0, oc, 0, 0) += acc;
      }
    });
  }

  int leaky_relu(int x, T slope) {
    const Tensor<T>& xv = value(x);
    Tensor<T> out = xv;
    for (T& v : out.v)
      if (v < T(0)) v *= slope;
    return push(std::move(out), "leaky_relu", [this, x, slope](int self) {
      const Tensor<T>& gy = grad(self);
      const Tensor<T>& xv = value(x);
      Tensor<T>& gx = grad(x);
      for (size_t i = 0; i < xv.size(); ++i)
        gx.v[i] += xv.v[i] < T(0) ? gy.v[i] * slope : gy.v[i];
    });
  }

  int add(int a, int b) {
    const Tensor<T>& av = value(a);
    const Tensor<T>& bv = value(b);
    if (!av.same_shape(bv)) throw std::invalid_argument("add: shape mismatch");
    Tensor<T> out = av;
    for (size_t i = 0; i < out.size(); ++i) out.v[i] += bv.v[i];
    return push(std::move(out), "add", [this, a, b](int self) {
      const Tensor<T>& gy = grad(self);
      Tensor<T>& ga = grad(a);
      Tensor<T>& gb = grad(b);
      for (size_t i = 0; i < gy.size(); ++i) {
        ga.v[i] += gy.v[i];
        gb.v[i] += gy.v[i];
      }
    });
  }

  int concat_c(int a, int b) {
    const Tensor<T>& av = value(a);
    const Tensor<T>& bv = value(b);
    if (av.n != bv.n || av.h != bv.h || av.w != bv.w)
      throw std::invalid_argument("concat: spatial/batch mismatch");
    Tensor<T> out(av.n, av.c + bv.c, av.h, av.w);
    for (int ni = 0; ni < av.n; ++ni) {
      for (int ci = 0; ci < av.c; ++ci)
        for (int y = 0; y < av.h; ++y)
          for (int x = 0; x < av.w; ++x)
            out.at(ni, ci, y, x) = av.at(ni, ci, y, x);
      for (int ci = 0; ci < bv.c; ++ci)
        for (int y = 0; y < av.h; ++y)
          for (int x = 0; x < av.w; ++x)
            out.at(ni, av.c + ci, y, x) = bv.at(ni, ci, y, x);
    }
    return push(std::move(out), "concat", [this, a, b](int self) {
      const Tensor<T>& gy = grad(self);
      Tensor<T>& ga = grad(a);
      Tensor<T>& gb = grad(b);
      for (int ni = 0; ni < ga.n; ++ni) {
        for (int ci = 0; ci < ga.c; ++ci)
          for (int y = 0; y < ga.h; ++y)
            for (int x = 0; x < ga.w; ++x)
              ga.at(ni, ci, y, x) += gy.at(ni, ci, y, x);
        for (int ci = 0; ci < gb.c; ++ci)
          for (int y = 0; y < gb.h; ++y)
            for (int x = 0; x < gb.w; ++x)
              gb.at(ni, ci, y, x) += gy.at(ni, ga.c + ci, y, x);
      }
    });
  }

  // Nearest-neighbor 2x upsample.
  int upsample2(int x) {
    const Tensor<T>& xv = value(x);
    Tensor<T> out(xv.n, xv.c, xv.h * 2, xv.w * 2);
    for (int ni = 0; ni < xv.n; ++ni)
      for (int ci = 0; ci < xv.c; ++ci)
        for (int y = 0; y < out.h; ++y)
          for (int xx = 0; xx < out.w; ++xx)
            out.at(ni, ci, y, xx) = xv.at(ni, ci, y / 2, xx / 2);
    return push(std::move(out), "upsample2", [this, x](int self) {
      const Tensor<T>& gy = grad(self);
      Tensor<T>& gx = grad(x);
      for (int ni = 0; ni < gx.n; ++ni)
        for (int ci = 0; ci < gx.c; ++ci)
          for (int y = 0; y < gx.h; ++y)
            for (int xx = 0; xx < gx.w; ++xx)
              gx.at(ni, ci, y, xx) += gy.at(ni, ci, 2 * y, 2 * xx) +
                                      gy.at(ni, ci, 2 * y, 2 * xx + 1) +
                                      gy.at(ni, ci, 2 * y + 1, 2 * xx) +
                                      gy.at(ni, ci, 2 * y + 1, 2 * xx + 1);
    });
  }

  // Per-pixel depthwise filtering: filt packs an s*s kernel per feature
  // channel as filt[b, c*s*s + ky*s + kx, y, x]; features are zero-padded.
  // Gradients flow into both the features and the predicted filters.
  int dynamic_conv(int feat, int filt, int s) {
    const Tensor<T>& fv = value(feat);
    const Tensor<T>& kv = value(filt);
    if (s < 1 || s % 2 == 0) throw std::invalid_argument("dynconv: s must be odd");
    if (kv.n != fv.n || kv.h != fv.h || kv.w != fv.w || kv.c != fv.c * s * s)
      throw std::invalid_argument("dynconv: filter tensor shape mismatch");

    int r = s / 2;
    Tensor<T> out(fv.n, fv.c, fv.h, fv.w);
    parallel_for(0, static_cast<int64_t>(fv.n) * fv.c, [&](int64_t bc) {
      int bi = static_cast<int>(bc / fv.c);
      int ci = static_cast<int>(bc % fv.c);
      for (int y = 0; y < fv.h; ++y)
        for (int x = 0; x < fv.w; ++x) {
          T acc = T(0);
          for (int ky = 0; ky < s; ++ky) {
            int iy = y - r + ky;
            if (iy < 0 || iy >= fv.h) continue;
            for (int kx = 0; kx < s; ++kx) {
              int ix = x - r + kx;
              if (ix < 0 || ix >= fv.w) continue;
              acc += fv.at(bi, ci, iy, ix) *
                     kv.at(bi, ci * s * s + ky * s + kx, y, x);
            }
          }
          out.at(bi, ci, y, x) = acc;
        }
    });

    return push(std::move(out), "dynamic_conv", [this, feat, filt, s](int self) {
      const Tensor<T>& gy = grad(self);
      const Tensor<T>& fv = value(feat);
      const Tensor<T>& kv = value(filt);
      int r = s / 2;

      Tensor<T>& gf = grad(feat);
      parallel_for(0, static_cast<int64_t>(fv.n) * fv.c, [&](int64_t bc) {
        int bi = static_cast<int>(bc / fv.c);
        int ci = static_cast<int>(bc % fv.c);
        for (int iy = 0; iy < fv.h; ++iy)
          for (int ix = 0; ix < fv.w; ++ix) {
            T acc = T(0);
            for (int ky = 0; ky < s; ++ky) {
              int oy = iy + r - ky;
              if (oy < 0 || oy >= fv.h) continue;
              for (int kx = 0; kx < s; ++kx) {
                int ox = ix + r - kx;
                if (ox < 0 || ox >= fv.w) continue;
                acc += gy.at(bi, ci, oy, ox) *
                       kv.at(bi, ci * s * s + ky * s + kx, oy, ox);
              }
            }
            gf.at(bi, ci, iy, ix) += acc;
          }
      });

      Tensor<T>& gk = grad(filt);
      parallel_for(0, static_cast<int64_t>(fv.n) * fv.c, [&](int64_t bc) {
        int bi = static_cast<int>(bc / fv.c);
        int ci = static_cast<int>(bc % fv.c);
        for (int ky = 0; ky < s; ++ky)
          for (int kx = 0; kx < s; ++kx)
            for (int y = 0; y < fv.h; ++y) {
              int iy = y - r + ky;
              if (iy < 0 || iy >= fv.h) continue;
              for (int x = 0; x < fv.w; ++x) {
                int ix = x - r + kx;
                if (ix < 0 || ix >= fv.w) continue;
                gk.at(bi, ci * s * s + ky * s + kx, y, x) +=
                    gy.at(bi, ci, y, x) * fv.at(bi, ci, iy, ix);
              }
            }
      });
    });
  }

  // Mean absolute error; the subgradient at 0 is 0.
  int l1_loss(int pred, int tgt) {
    const Tensor<T>& pv = value(pred);
    const Tensor<T>& tv = value(tgt);
    if (!pv.same_shape(tv)) throw std::invalid_argument("l1: shape mismatch");
    T acc = T(0);
    for (size_t i = 0; i < pv.size(); ++i) {
      T d = pv.v[i] - tv.v[i];
      acc += d < T(0) ? -d : d;
    }
    Tensor<T> out(1, 1, 1, 1);
    out.v[0] = acc / static_cast<T>(pv.size());
    return push(std::move(out), "l1_loss", [this, pred, tgt](int self) {
      const T gy = grad(self).v[0];
      const Tensor<T>& pv = value(pred);
      const Tensor<T>& tv = value(tgt);
      Tensor<T>& gp = grad(pred);
      Tensor<T>& gt = grad(tgt);
      T inv = gy / static_cast<T>(pv.size());
      for (size_t i = 0; i < pv.size(); ++i) {
        T d = pv.v[i] - tv.v[i];
        T s = d > T(0) ? inv : (d < T(0) ? -inv : T(0));
        gp.v[i] += s;
        gt.v[i] -= s;
      }
    });
  }

  // L1 between forward-difference image gradients of pred and tgt, both
  // axes, normalized by the element count of pred.
  int grad_l1_loss(int pred, int tgt) {
    const Tensor<T>& pv = value(pred);
    const Tensor<T>& tv = value(tgt);
    if (!pv.same_shape(tv)) throw std::invalid_argument("grad_l1: shape mismatch");
    T acc = T(0);
    for (int ni = 0; ni < pv.n; ++ni)
      for (int ci = 0; ci < pv.c; ++ci) {
        for (int y = 0; y < pv.h; ++y)
          for (int x = 0; x + 1 < pv.w; ++x) {
            T d = (pv.at(ni, ci, y, x + 1) - pv.at(ni, ci, y, x)) -
                  (tv.at(ni, ci, y, x + 1) - tv.at(ni, ci, y, x));
            acc += d < T(0) ? -d : d;
          }
        for (int y = 0; y + 1 < pv.h; ++y)
          for (int x = 0; x < pv.w; ++x) {
            T d = (pv.at(ni, ci, y + 1, x) - pv.at(ni, ci, y, x)) -
                  (tv.at(ni, ci, y + 1, x) - tv.at(ni, ci, y, x));
            acc += d < T(0) ? -d : d;
          }
      }
    Tensor<T> out(1, 1, 1, 1);
    out.v[0] = acc / static_cast<T>(pv.size());
    return push(std::move(out), "grad_l1_loss", [this, pred, tgt](int self) {
      const T gy = grad(self).v[0];
      const Tensor<T>& pv = value(pred);
      const Tensor<T>& tv = value(tgt);
      Tensor<T>& gp = grad(pred);
      Tensor<T>& gt = grad(tgt);
      T inv = gy / static_cast<T>(pv.size());
      auto sgn = [inv](T d) { return d > T(0) ? inv : (d < T(0) ? -inv : T(0)); };
      for (int ni = 0; ni < pv.n; ++ni)
        for (int ci = 0; ci < pv.c; ++ci) {
          for (int y = 0; y < pv.h; ++y)
            for (int x = 0; x + 1 < pv.w; ++x) {
              T d = (pv.at(ni, ci, y, x + 1) - pv.at(ni, ci, y, x)) -
                    (tv.at(ni, ci, y, x + 1) - tv.at(ni, ci, y, x));
              T s = sgn(d);
              gp.at(ni, ci, y, x + 1) += s;
              gp.at(ni, ci, y, x) -= s;
              gt.at(ni, ci, y, x + 1) -= s;
              gt.at(ni, ci, y, x) += s;
            }
          for (int y = 0; y + 1 < pv.h; ++y)
            for (int x = 0; x < pv.w; ++x) {
              T d = (pv.at(ni, ci, y + 1, x) - pv.at(ni, ci, y, x)) -
                    (tv.at(ni, ci, y + 1, x) - tv.at(ni, ci, y, x));
              T s = sgn(d);
              gp.at(ni, ci, y + 1, x) += s;
              gp.at(ni, ci, y, x) -= s;
              gt.at(ni, ci, y + 1, x) -= s;
              gt.at(ni, ci, y, x) += s;
            }
        }
    });
  }

  // alpha * a + beta * b, elementwise.
  int axpby(int a, T alpha, int b, T beta) {
    const Tensor<T>& av = value(a);
    const Tensor<T>& bv = value(b);
    if (!av.same_shape(bv)) throw std::invalid_argument("axpby: shape mismatch");
    Tensor<T> out = av;
    for (size_t i = 0; i < out.size(); ++i)
      out.v[i] = alpha * av.v[i] + beta * bv.v[i];
    return push(std::move(out), "axpby", [this, a, b, alpha, beta](int self) {
      const Tensor<T>& gy = grad(self);
      Tensor<T>& ga = grad(a);
      Tensor<T>& gb = grad(b);
      for (size_t i = 0; i < gy.size(); ++i) {
        ga.v[i] += alpha * gy.v[i];
        gb.v[i] += beta * gy.v[i];
      }
    });
  }

  // Seeds d(loss)/d(loss) = 1 and sweeps the recorded ops in reverse.
  void backward(int loss) {
    if (value(loss).size() != 1)
      throw std::invalid_argument("backward: loss must be scalar");
    grads_.assign(nodes_.size(), Tensor<T>());
    grad(loss).v[0] = T(1);
    for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
      Node& node = nodes_[static_cast<size_t>(id)];
      if (!node.backward) continue;
      if (grads_[static_cast<size_t>(id)].size() == 0) continue;  // unused branch
      node.backward(id);
    }
  }

 private:
  struct Node {
    Tensor<T> value;
    std::function<void(int)> backward;
    const char* op = "";
  };

  int push(Tensor<T> out, const char* op, std::function<void(int)> bwd) {
    for (const T& v : out.v)
      if (!std::isfinite(static_cast<double>(v)))
        throw NumericError(std::string("autodiff: op '") + op +
                           "' produced a non-finite value");
    nodes_.push_back({std::move(out), std::move(bwd), op});
    return static_cast<int>(nodes_.size()) - 1;
  }

  std::vector<Node> nodes_;
  std::vector<Tensor<T>> grads_;
};

}  // namespace udc::nn
