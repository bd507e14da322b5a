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
#ifndef ACDC_NN_TENSOR_HPP_
#define ACDC_NN_TENSOR_HPP_

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace acdc::nn {

// Dense row-major tensor. Feature maps use NCHW, matrices use (rows, cols).
template <typename T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> v;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    v.assign(static_cast<std::size_t>(count(shape)), T(0));
  }

  static long long count(const std::vector<int>& s) {
    long long n = 1;
    for (int d : s) {
      if (d < 0) throw std::invalid_argument("Tensor: negative dimension");
      n *= d;
    }
    return n;
  }

  long long size() const { return static_cast<long long>(v.size()); }
  int dim(std::size_t i) const { return shape.at(i); }
  T* data() { return v.data(); }
  const T* data() const { return v.data(); }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace acdc::nn

#endif  // ACDC_NN_TENSOR_HPP_
