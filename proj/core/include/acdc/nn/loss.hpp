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
#ifndef ACDC_NN_LOSS_HPP_
#define ACDC_NN_LOSS_HPP_

#include <cmath>
#include <stdexcept>
#include <vector>

#include "acdc/geometry.hpp"
#include "acdc/nn/network.hpp"
#include "acdc/nn/tensor.hpp"

namespace acdc {

// Training objective: mean over the batch of squared count error plus the
// absolute pan and tilt control errors,
//   L = (1/N) sum_i [(c_i - c^_i)^2 + |u_x,i - u^_x,i| + |u_y,i - u^_y,i|].
// Predictions are [N,3] tensors in (u_x, u_y, count) column order.
// Accumulation is in double regardless of the tensor scalar type.
template <typename T>
double control_loss(const nn::Tensor<T>& pred, const std::vector<ControlLabel>& truth) {
  if (pred.shape.size() != 2 || pred.dim(1) != 3)
    throw std::invalid_argument("control_loss: predictions must be [N,3]");
  if (pred.dim(0) != static_cast<int>(truth.size()))
    throw std::invalid_argument("control_loss: batch sizes differ");
  if (truth.empty()) throw std::invalid_argument("control_loss: empty batch");

  const int n = pred.dim(0);
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    const double ux = pred.v[static_cast<std::size_t>(i) * 3 + 0];
    const double uy = pred.v[static_cast<std::size_t>(i) * 3 + 1];
    const double c = pred.v[static_cast<std::size_t>(i) * 3 + 2];
    const double dc = truth[i].count - c;
    acc += dc * dc + std::fabs(truth[i].u_x - ux) + std::fabs(truth[i].u_y - uy);
  }
  return acc / n;
}

// Gradient of control_loss with respect to the predictions, same shape.
// The absolute-error terms use the sign subgradient (0 at the kink).
template <typename T>
nn::Tensor<T> control_loss_grad(const nn::Tensor<T>& pred,
                                const std::vector<ControlLabel>& truth) {
  if (pred.shape.size() != 2 || pred.dim(1) != 3 ||
      pred.dim(0) != static_cast<int>(truth.size()) || truth.empty())
    throw std::invalid_argument("control_loss_grad: bad batch");
  const int n = pred.dim(0);
  const double inv_n = 1.0 / n;
  nn::Tensor<T> g(pred.shape);
  auto sgn = [](double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); };
  for (int i = 0; i < n; ++i) {
    const double ux = pred.v[static_cast<std::size_t>(i) * 3 + 0];
    const double uy = pred.v[static_cast<std::size_t>(i) * 3 + 1];
    const double c = pred.v[static_cast<std::size_t>(i) * 3 + 2];
    g.v[static_cast<std::size_t>(i) * 3 + 0] = static_cast<T>(sgn(ux - truth[i].u_x) * inv_n);
    g.v[static_cast<std::size_t>(i) * 3 + 1] = static_cast<T>(sgn(uy - truth[i].u_y) * inv_n);
    g.v[static_cast<std::size_t>(i) * 3 + 2] = static_cast<T>(2.0 * (c - truth[i].count) * inv_n);
  }
  return g;
}

// Convenience overload over already-decoded model outputs.
inline double control_loss(const std::vector<ModelOutput>& pred,
                           const std::vector<ControlLabel>& truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("control_loss: batch sizes differ");
  if (pred.empty()) throw std::invalid_argument("control_loss: empty batch");
  nn::Tensor<double> t({static_cast<int>(pred.size()), 3});
  for (std::size_t i = 0; i < pred.size(); ++i) {
    t.v[i * 3 + 0] = pred[i].u_x;
    t.v[i * 3 + 1] = pred[i].u_y;
    t.v[i * 3 + 2] = pred[i].count;
  }
  return control_loss(t, truth);
}

}  // namespace acdc

#endif  // ACDC_NN_LOSS_HPP_
