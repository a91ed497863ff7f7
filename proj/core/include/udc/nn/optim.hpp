#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "udc/nn/tensor.hpp"

namespace udc::nn {

// Cosine-annealed learning rate with warm restarts every `period` steps:
// lr(t) = lr_min + (lr_max - lr_min) * (1 + cos(pi * (t mod period) / period)) / 2.
inline double cosine_restart_lr(long step, long period, double lr_max,
                                double lr_min) {
  if (period <= 0) throw std::invalid_argument("lr: period must be > 0");
  if (step < 0) throw std::invalid_argument("lr: step must be >= 0");
  long t = step % period;
  double phase = 3.14159265358979323846 * static_cast<double>(t) /
                 static_cast<double>(period);
  return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(phase));
}

// Adam with bias correction. Moments are kept in the scalar type of the
// parameters; step() consumes matching parameter/gradient tensor lists.
template <typename T>
class Adam {
 public:
  Adam(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(std::vector<Tensor<T>*> params,
            const std::vector<const Tensor<T>*>& grads, double lr) {
    if (params.size() != grads.size())
      throw std::invalid_argument("adam: parameter/gradient count mismatch");
    if (m_.empty()) {
      m_.reserve(params.size());
      v_.reserve(params.size());
      for (const Tensor<T>* p : params) {
        m_.emplace_back(p->n, p->c, p->h, p->w, T(0));
        v_.emplace_back(p->n, p->c, p->h, p->w, T(0));
      }
    }
    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, t_);
    double bc2 = 1.0 - std::pow(beta2_, t_);
    for (size_t i = 0; i < params.size(); ++i) {
      Tensor<T>& p = *params[i];
      const Tensor<T>& g = *grads[i];
      Tensor<T>& m = m_[i];
      Tensor<T>& v = v_[i];
      if (!p.same_shape(g)) throw std::invalid_argument("adam: shape mismatch");
      for (size_t j = 0; j < p.size(); ++j) {
        double gj = static_cast<double>(g.v[j]);
        double mj = beta1_ * static_cast<double>(m.v[j]) + (1.0 - beta1_) * gj;
        double vj = beta2_ * static_cast<double>(v.v[j]) + (1.0 - beta2_) * gj * gj;
        m.v[j] = static_cast<T>(mj);
        v.v[j] = static_cast<T>(vj);
        double update = (mj / bc1) / (std::sqrt(vj / bc2) + eps_);
        p.v[j] = static_cast<T>(static_cast<double>(p.v[j]) - lr * update);
      }
    }
  }

  long step_count() const { return t_; }

 private:
  double beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Tensor<T>> m_;
  std::vector<Tensor<T>> v_;
};

}  // namespace udc::nn
