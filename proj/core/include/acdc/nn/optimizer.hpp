/*
 * Copyright 2026 The ACDC Workbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef ACDC_NN_OPTIMIZER_HPP_
#define ACDC_NN_OPTIMIZER_HPP_

#include <cmath>
#include <stdexcept>
#include <vector>

#include "acdc/nn/layers.hpp"

namespace acdc {

// Step decay: lr(epoch) = initial * factor^floor(epoch / every).
inline double lr_schedule(int epoch, double initial_lr = 0.001, double decay_factor = 0.95,
                          int decay_every = 5) {
  if (epoch < 0) throw std::invalid_argument("lr_schedule: epoch must be >= 0");
  if (decay_every < 1) throw std::invalid_argument("lr_schedule: decay_every must be >= 1");
  return initial_lr * std::pow(decay_factor, epoch / decay_every);
}

// Adam with the standard moment defaults. One slot pair (m, v) per parameter
// tensor, matched by registry order.
template <typename T>
class Adam {
 public:
  struct Slot {
    std::vector<double> m, v;
  };

  explicit Adam(const std::vector<nn::TensorRef<T>>& params, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& p : params) {
      if (!p.is_param()) continue;
      Slot s;
      s.m.assign(p.value->size(), 0.0);
      s.v.assign(p.value->size(), 0.0);
      slots_.push_back(std::move(s));
    }
  }

  // Applies one update over the same registry the optimizer was built from.
  void step(const std::vector<nn::TensorRef<T>>& params, double lr) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    std::size_t si = 0;
    for (const auto& p : params) {
      if (!p.is_param()) continue;
      if (si >= slots_.size() || slots_[si].m.size() != p.value->size())
        throw std::invalid_argument("Adam: registry does not match optimizer state");
      Slot& s = slots_[si++];
      for (std::size_t i = 0; i < p.value->size(); ++i) {
        const double g = (*p.grad)[i];
        s.m[i] = beta1_ * s.m[i] + (1.0 - beta1_) * g;
        s.v[i] = beta2_ * s.v[i] + (1.0 - beta2_) * g * g;
        const double mhat = s.m[i] / bc1;
        const double vhat = s.v[i] / bc2;
        (*p.value)[i] -= static_cast<T>(lr * mhat / (std::sqrt(vhat) + eps_));
      }
    }
  }

  long long step_count() const { return t_; }
  std::vector<Slot>& slots() { return slots_; }
  const std::vector<Slot>& slots() const { return slots_; }
  void set_step_count(long long t) { t_ = t; }

 private:
  double beta1_, beta2_, eps_;
  long long t_ = 0;
  std::vector<Slot> slots_;
};

}  // namespace acdc

#endif  // ACDC_NN_OPTIMIZER_HPP_
