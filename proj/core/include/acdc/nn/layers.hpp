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
#ifndef ACDC_NN_LAYERS_HPP_
#define ACDC_NN_LAYERS_HPP_

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "acdc/nn/tensor.hpp"

namespace acdc::nn {

// Entry in a network's tensor registry. Parameters carry a gradient buffer;
// persistent buffers (batch-norm running statistics) do not.
template <typename T>
struct TensorRef {
  std::string name;
  std::vector<int> shape;
  std::vector<T>* value = nullptr;
  std::vector<T>* grad = nullptr;

  bool is_param() const { return grad != nullptr; }
};

template <typename T>
void glorot_uniform(std::vector<T>& w, int fan_in, int fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (auto& x : w) x = static_cast<T>(dist(rng));
}

// SAME padding: output size ceil(in / stride), surplus padding on the
// bottom/right edge.
inline int conv_out_dim(int in, int stride) { return (in + stride - 1) / stride; }

inline int conv_pad_begin(int in, int kernel, int stride) {
  const int out = conv_out_dim(in, stride);
  const int total = std::max((out - 1) * stride + kernel - in, 0);
  return total / 2;
}

template <typename T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Expands one image [C,H,W] into a [C*k*k, oh*ow] patch matrix.
template <typename T>
void im2col(const T* x, int c_in, int h, int w, int kernel, int stride, T* col) {
  const int oh = conv_out_dim(h, stride);
  const int ow = conv_out_dim(w, stride);
  const int pad_top = conv_pad_begin(h, kernel, stride);
  const int pad_left = conv_pad_begin(w, kernel, stride);
  const int cols = oh * ow;
  for (int c = 0; c < c_in; ++c) {
    for (int ki = 0; ki < kernel; ++ki) {
      for (int kj = 0; kj < kernel; ++kj) {
        T* row = col + (static_cast<long long>((c * kernel + ki) * kernel + kj)) * cols;
        const T* plane = x + static_cast<long long>(c) * h * w;
        for (int oi = 0; oi < oh; ++oi) {
          const int ii = oi * stride - pad_top + ki;
          for (int oj = 0; oj < ow; ++oj) {
            const int jj = oj * stride - pad_left + kj;
            row[oi * ow + oj] = (ii >= 0 && ii < h && jj >= 0 && jj < w)
                                    ? plane[ii * w + jj]
                                    : T(0);
          }
        }
      }
    }
  }
}

// Scatter-adds a patch-matrix gradient back onto the input image gradient.
template <typename T>
void col2im(const T* col, int c_in, int h, int w, int kernel, int stride, T* gx) {
  const int oh = conv_out_dim(h, stride);
  const int ow = conv_out_dim(w, stride);
  const int pad_top = conv_pad_begin(h, kernel, stride);
  const int pad_left = conv_pad_begin(w, kernel, stride);
  const int cols = oh * ow;
  for (int c = 0; c < c_in; ++c) {
    for (int ki = 0; ki < kernel; ++ki) {
      for (int kj = 0; kj < kernel; ++kj) {
        const T* row = col + (static_cast<long long>((c * kernel + ki) * kernel + kj)) * cols;
        T* plane = gx + static_cast<long long>(c) * h * w;
        for (int oi = 0; oi < oh; ++oi) {
          const int ii = oi * stride - pad_top + ki;
          if (ii < 0 || ii >= h) continue;
          for (int oj = 0; oj < ow; ++oj) {
            const int jj = oj * stride - pad_left + kj;
            if (jj < 0 || jj >= w) continue;
            plane[ii * w + jj] += row[oi * ow + oj];
          }
        }
      }
    }
  }
}

template <typename T>
class Conv2d {
 public:
  Conv2d(std::string name, int in_ch, int out_ch, int kernel, int stride)
      : name_(std::move(name)), in_ch_(in_ch), out_ch_(out_ch), k_(kernel), s_(stride) {
    w_.assign(static_cast<std::size_t>(out_ch_) * in_ch_ * k_ * k_, T(0));
    b_.assign(out_ch_, T(0));
    gw_.assign(w_.size(), T(0));
    gb_.assign(b_.size(), T(0));
  }

  void init(std::mt19937_64& rng) {
    glorot_uniform(w_, in_ch_ * k_ * k_, out_ch_ * k_ * k_, rng);
    std::fill(b_.begin(), b_.end(), T(0));
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    if (training) x_ = x;
    return apply(x);
  }

  Tensor<T> infer(const Tensor<T>& x) const { return apply(x); }

  Tensor<T> backward(const Tensor<T>& gy) {
    const int n = x_.dim(0), h = x_.dim(2), w = x_.dim(3);
    const int oh = conv_out_dim(h, s_), ow = conv_out_dim(w, s_);
    const int rows = in_ch_ * k_ * k_, cols = oh * ow;

    Tensor<T> gx(x_.shape);
    std::vector<T> col(static_cast<std::size_t>(rows) * cols);
    std::vector<T> dcol(col.size());
    Eigen::Map<const MatRM<T>> wm(w_.data(), out_ch_, rows);
    Eigen::Map<MatRM<T>> gwm(gw_.data(), out_ch_, rows);
    Eigen::Map<VecX<T>> gbm(gb_.data(), out_ch_);

    for (int i = 0; i < n; ++i) {
      im2col(x_.data() + plane_size(i, h, w), in_ch_, h, w, k_, s_, col.data());
      Eigen::Map<const MatRM<T>> gym(gy.data() + static_cast<long long>(i) * out_ch_ * cols,
                                     out_ch_, cols);
      Eigen::Map<const MatRM<T>> cm(col.data(), rows, cols);
      gwm.noalias() += gym * cm.transpose();
      gbm.noalias() += gym.rowwise().sum();
      Eigen::Map<MatRM<T>> dcm(dcol.data(), rows, cols);
      dcm.noalias() = wm.transpose() * gym;
      col2im(dcol.data(), in_ch_, h, w, k_, s_, gx.data() + plane_size(i, h, w));
    }
    return gx;
  }

  void collect(std::vector<TensorRef<T>>& out) {
    out.push_back({name_ + ".w", {out_ch_, in_ch_, k_, k_}, &w_, &gw_});
    out.push_back({name_ + ".b", {out_ch_}, &b_, &gb_});
  }

  long long param_count() const {
    return static_cast<long long>(w_.size() + b_.size());
  }
  int out_channels() const { return out_ch_; }
  int in_channels() const { return in_ch_; }

 private:
  long long plane_size(int i, int h, int w) const {
    return static_cast<long long>(i) * in_ch_ * h * w;
  }

  Tensor<T> apply(const Tensor<T>& x) const {
    if (x.shape.size() != 4 || x.dim(1) != in_ch_)
      throw std::invalid_argument(name_ + ": input shape mismatch");
    const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
    const int oh = conv_out_dim(h, s_), ow = conv_out_dim(w, s_);
    const int rows = in_ch_ * k_ * k_, cols = oh * ow;

    Tensor<T> y({n, out_ch_, oh, ow});
    std::vector<T> col(static_cast<std::size_t>(rows) * cols);
    Eigen::Map<const MatRM<T>> wm(w_.data(), out_ch_, rows);
    Eigen::Map<const VecX<T>> bm(b_.data(), out_ch_);
    for (int i = 0; i < n; ++i) {
      im2col(x.data() + plane_size(i, h, w), in_ch_, h, w, k_, s_, col.data());
      Eigen::Map<const MatRM<T>> cm(col.data(), rows, cols);
      Eigen::Map<MatRM<T>> ym(y.data() + static_cast<long long>(i) * out_ch_ * cols, out_ch_,
                              cols);
      ym.noalias() = wm * cm;
      ym.colwise() += bm;
    }
    return y;
  }

  std::string name_;
  int in_ch_, out_ch_, k_, s_;
  std::vector<T> w_, b_, gw_, gb_;
  Tensor<T> x_;
};

template <typename T>
class BatchNorm2d {
 public:
  BatchNorm2d(std::string name, int channels, double eps = 1e-3, double momentum = 0.99)
      : name_(std::move(name)), c_(channels), eps_(eps), momentum_(momentum) {
    gamma_.assign(c_, T(1));
    beta_.assign(c_, T(0));
    rmean_.assign(c_, T(0));
    rvar_.assign(c_, T(1));
    ggamma_.assign(c_, T(0));
    gbeta_.assign(c_, T(0));
  }

  Tensor<T> forward(const Tensor<T>& x, bool training, bool update_running = true) {
    check(x);
    if (!training) return infer(x);
    const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
    const long long m = static_cast<long long>(n) * h * w;
    Tensor<T> y(x.shape);

    mean_.assign(c_, 0.0);
    var_.assign(c_, 0.0);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < c_; ++c) {
        const T* p = plane(x, i, c, h, w);
        double s = 0;
        for (long long k = 0; k < static_cast<long long>(h) * w; ++k) s += p[k];
        mean_[c] += s;
      }
    for (int c = 0; c < c_; ++c) mean_[c] /= static_cast<double>(m);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < c_; ++c) {
        const T* p = plane(x, i, c, h, w);
        double s = 0;
        for (long long k = 0; k < static_cast<long long>(h) * w; ++k) {
          const double d = p[k] - mean_[c];
          s += d * d;
        }
        var_[c] += s;
      }
    for (int c = 0; c < c_; ++c) var_[c] /= static_cast<double>(m);

    inv_std_.resize(c_);
    for (int c = 0; c < c_; ++c) inv_std_[c] = 1.0 / std::sqrt(var_[c] + eps_);

    xhat_ = Tensor<T>(x.shape);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < c_; ++c) {
        const T* p = plane(x, i, c, h, w);
        T* xh = plane(xhat_, i, c, h, w);
        T* yp = plane(y, i, c, h, w);
        for (long long k = 0; k < static_cast<long long>(h) * w; ++k) {
          xh[k] = static_cast<T>((p[k] - mean_[c]) * inv_std_[c]);
          yp[k] = static_cast<T>(gamma_[c] * xh[k] + beta_[c]);
        }
      }

    if (update_running)
      for (int c = 0; c < c_; ++c) {
        rmean_[c] = static_cast<T>(momentum_ * rmean_[c] + (1.0 - momentum_) * mean_[c]);
        rvar_[c] = static_cast<T>(momentum_ * rvar_[c] + (1.0 - momentum_) * var_[c]);
      }
    return y;
  }

  Tensor<T> infer(const Tensor<T>& x) const {
    check(x);
    const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
    Tensor<T> y(x.shape);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < c_; ++c) {
        const double inv = 1.0 / std::sqrt(static_cast<double>(rvar_[c]) + eps_);
        const T* p = plane(x, i, c, h, w);
        T* yp = plane(y, i, c, h, w);
        for (long long k = 0; k < static_cast<long long>(h) * w; ++k)
          yp[k] = static_cast<T>(gamma_[c] * (p[k] - rmean_[c]) * inv + beta_[c]);
      }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    const int n = gy.dim(0), h = gy.dim(2), w = gy.dim(3);
    const double m = static_cast<double>(n) * h * w;
    Tensor<T> gx(gy.shape);
    std::vector<double> sum_gy(c_, 0.0), sum_gy_xhat(c_, 0.0);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < c_; ++c) {
        const T* g = plane(gy, i, c, h, w);
        const T* xh = plane(xhat_, i, c, h, w);
        for (long long k = 0; k < static_cast<long long>(h) * w; ++k) {
          sum_gy[c] += g[k];
          sum_gy_xhat[c] += static_cast<double>(g[k]) * xh[k];
        }
      }
    for (int c = 0; c < c_; ++c) {
      ggamma_[c] += static_cast<T>(sum_gy_xhat[c]);
      gbeta_[c] += static_cast<T>(sum_gy[c]);
    }
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < c_; ++c) {
        const double coeff = gamma_[c] * inv_std_[c] / m;
        const T* g = plane(gy, i, c, h, w);
        const T* xh = plane(xhat_, i, c, h, w);
        T* gp = plane(gx, i, c, h, w);
        for (long long k = 0; k < static_cast<long long>(h) * w; ++k)
          gp[k] = static_cast<T>(coeff * (m * g[k] - sum_gy[c] - xh[k] * sum_gy_xhat[c]));
      }
    return gx;
  }

  void collect(std::vector<TensorRef<T>>& out) {
    out.push_back({name_ + ".gamma", {c_}, &gamma_, &ggamma_});
    out.push_back({name_ + ".beta", {c_}, &beta_, &gbeta_});
    out.push_back({name_ + ".running_mean", {c_}, &rmean_, nullptr});
    out.push_back({name_ + ".running_var", {c_}, &rvar_, nullptr});
  }

  long long param_count() const { return 2LL * c_; }

 private:
  void check(const Tensor<T>& x) const {
    if (x.shape.size() != 4 || x.dim(1) != c_)
      throw std::invalid_argument(name_ + ": input shape mismatch");
  }
  static T* plane(Tensor<T>& t, int i, int c, int h, int w) {
    return t.data() + (static_cast<long long>(i) * t.dim(1) + c) * h * w;
  }
  static const T* plane(const Tensor<T>& t, int i, int c, int h, int w) {
    return t.data() + (static_cast<long long>(i) * t.dim(1) + c) * h * w;
  }

  std::string name_;
  int c_;
  double eps_, momentum_;
  std::vector<T> gamma_, beta_, rmean_, rvar_, ggamma_, gbeta_;
  std::vector<double> mean_, var_, inv_std_;
  Tensor<T> xhat_;
};

template <typename T>
class LeakyRelu {
 public:
  explicit LeakyRelu(double slope) : slope_(slope) {}

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    if (training) x_ = x;
    return apply(x);
  }
  Tensor<T> infer(const Tensor<T>& x) const { return apply(x); }

  Tensor<T> backward(const Tensor<T>& gy) const {
    Tensor<T> gx(gy.shape);
    for (std::size_t i = 0; i < gy.v.size(); ++i)
      gx.v[i] = x_.v[i] > T(0) ? gy.v[i] : static_cast<T>(slope_ * gy.v[i]);
    return gx;
  }

 private:
  Tensor<T> apply(const Tensor<T>& x) const {
    Tensor<T> y(x.shape);
    for (std::size_t i = 0; i < x.v.size(); ++i)
      y.v[i] = x.v[i] > T(0) ? x.v[i] : static_cast<T>(slope_ * x.v[i]);
    return y;
  }
  double slope_;
  Tensor<T> x_;
};

template <typename T>
class Elu {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool training) {
    Tensor<T> y = apply(x);
    if (training) y_ = y;
    return y;
  }
  Tensor<T> infer(const Tensor<T>& x) const { return apply(x); }

  Tensor<T> backward(const Tensor<T>& gy) const {
    Tensor<T> gx(gy.shape);
    for (std::size_t i = 0; i < gy.v.size(); ++i)
      gx.v[i] = y_.v[i] > T(0) ? gy.v[i] : static_cast<T>(gy.v[i] * (y_.v[i] + T(1)));
    return gx;
  }

 private:
  static Tensor<T> apply(const Tensor<T>& x) {
    Tensor<T> y(x.shape);
    for (std::size_t i = 0; i < x.v.size(); ++i)
      y.v[i] = x.v[i] > T(0) ? x.v[i] : static_cast<T>(std::expm1(static_cast<double>(x.v[i])));
    return y;
  }
  Tensor<T> y_;
};

// Inverted dropout: active only in training, scales kept units by 1/(1-rate).
template <typename T>
class Dropout {
 public:
  explicit Dropout(double rate) : rate_(rate) {}

  Tensor<T> forward(const Tensor<T>& x, bool training, std::mt19937_64& rng) {
    if (!training || rate_ <= 0) {
      mask_.v.clear();
      mask_.shape.clear();
      return x;
    }
    mask_ = Tensor<T>(x.shape);
    std::bernoulli_distribution keep(1.0 - rate_);
    const T scale = static_cast<T>(1.0 / (1.0 - rate_));
    Tensor<T> y(x.shape);
    for (std::size_t i = 0; i < x.v.size(); ++i) {
      mask_.v[i] = keep(rng) ? scale : T(0);
      y.v[i] = x.v[i] * mask_.v[i];
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) const {
    if (mask_.v.empty()) return gy;
    Tensor<T> gx(gy.shape);
    for (std::size_t i = 0; i < gy.v.size(); ++i) gx.v[i] = gy.v[i] * mask_.v[i];
    return gx;
  }

 private:
  double rate_;
  Tensor<T> mask_;
};

// [N,C,H,W] -> [N,C] spatial mean.
template <typename T>
class GlobalAvgPool {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool training) {
    if (training) in_shape_ = x.shape;
    return apply(x);
  }
  Tensor<T> infer(const Tensor<T>& x) const { return apply(x); }

  Tensor<T> backward(const Tensor<T>& gy) const {
    const int n = in_shape_[0], c = in_shape_[1], h = in_shape_[2], w = in_shape_[3];
    Tensor<T> gx(in_shape_);
    const T inv = static_cast<T>(1.0 / (static_cast<double>(h) * w));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < c; ++j) {
        const T g = gy.v[static_cast<std::size_t>(i) * c + j] * inv;
        T* p = gx.data() + (static_cast<long long>(i) * c + j) * h * w;
        for (long long k = 0; k < static_cast<long long>(h) * w; ++k) p[k] = g;
      }
    return gx;
  }

 private:
  static Tensor<T> apply(const Tensor<T>& x) {
    const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    Tensor<T> y({n, c});
    const double inv = 1.0 / (static_cast<double>(h) * w);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < c; ++j) {
        const T* p = x.data() + (static_cast<long long>(i) * c + j) * h * w;
        double s = 0;
        for (long long k = 0; k < static_cast<long long>(h) * w; ++k) s += p[k];
        y.v[static_cast<std::size_t>(i) * c + j] = static_cast<T>(s * inv);
      }
    return y;
  }
  std::vector<int> in_shape_;
};

template <typename T>
class Dense {
 public:
  Dense(std::string name, int in, int out)
      : name_(std::move(name)), in_(in), out_(out) {
    w_.assign(static_cast<std::size_t>(out_) * in_, T(0));
    b_.assign(out_, T(0));
    gw_.assign(w_.size(), T(0));
    gb_.assign(b_.size(), T(0));
  }

  void init(std::mt19937_64& rng) {
    glorot_uniform(w_, in_, out_, rng);
    std::fill(b_.begin(), b_.end(), T(0));
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    if (training) x_ = x;
    return apply(x);
  }
  Tensor<T> infer(const Tensor<T>& x) const { return apply(x); }

  Tensor<T> backward(const Tensor<T>& gy) {
    const int n = x_.dim(0);
    Eigen::Map<const MatRM<T>> gym(gy.data(), n, out_);
    Eigen::Map<const MatRM<T>> xm(x_.data(), n, in_);
    Eigen::Map<MatRM<T>> gwm(gw_.data(), out_, in_);
    Eigen::Map<VecX<T>> gbm(gb_.data(), out_);
    gwm.noalias() += gym.transpose() * xm;
    gbm.noalias() += gym.colwise().sum().transpose();
    Tensor<T> gx({n, in_});
    Eigen::Map<MatRM<T>> gxm(gx.data(), n, in_);
    Eigen::Map<const MatRM<T>> wm(w_.data(), out_, in_);
    gxm.noalias() = gym * wm;
    return gx;
  }

  void collect(std::vector<TensorRef<T>>& out) {
    out.push_back({name_ + ".w", {out_, in_}, &w_, &gw_});
    out.push_back({name_ + ".b", {out_}, &b_, &gb_});
  }

  long long param_count() const { return static_cast<long long>(w_.size() + b_.size()); }

 private:
  Tensor<T> apply(const Tensor<T>& x) const {
    if (x.shape.size() != 2 || x.dim(1) != in_)
      throw std::invalid_argument(name_ + ": input shape mismatch");
    const int n = x.dim(0);
    Tensor<T> y({n, out_});
    Eigen::Map<const MatRM<T>> xm(x.data(), n, in_);
    Eigen::Map<const MatRM<T>> wm(w_.data(), out_, in_);
    Eigen::Map<MatRM<T>> ym(y.data(), n, out_);
    ym.noalias() = xm * wm.transpose();
    ym.rowwise() += Eigen::Map<const VecX<T>>(b_.data(), out_).transpose();
    return y;
  }

  std::string name_;
  int in_, out_;
  std::vector<T> w_, b_, gw_, gb_;
  Tensor<T> x_;
};

// Output heads over a [N,3] pre-activation: columns 0 and 1 are hard-clipped
// to [-1,1] (unit gradient inside, zero outside), column 2 passes through
// ReLU so the count stays non-negative.
template <typename T>
class HeadActivation {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool training) {
    if (training) x_ = x;
    return apply(x);
  }
  Tensor<T> infer(const Tensor<T>& x) const { return apply(x); }

  Tensor<T> backward(const Tensor<T>& gy) const {
    const int n = gy.dim(0);
    Tensor<T> gx(gy.shape);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < 2; ++j) {
        const T z = x_.v[static_cast<std::size_t>(i) * 3 + j];
        gx.v[static_cast<std::size_t>(i) * 3 + j] =
            (z > T(-1) && z < T(1)) ? gy.v[static_cast<std::size_t>(i) * 3 + j] : T(0);
      }
      const T z = x_.v[static_cast<std::size_t>(i) * 3 + 2];
      gx.v[static_cast<std::size_t>(i) * 3 + 2] =
          z > T(0) ? gy.v[static_cast<std::size_t>(i) * 3 + 2] : T(0);
    }
    return gx;
  }

 private:
  static Tensor<T> apply(const Tensor<T>& x) {
    if (x.shape.size() != 2 || x.dim(1) != 3)
      throw std::invalid_argument("HeadActivation: expects [N,3]");
    const int n = x.dim(0);
    Tensor<T> y(x.shape);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < 2; ++j)
        y.v[static_cast<std::size_t>(i) * 3 + j] =
            std::clamp(x.v[static_cast<std::size_t>(i) * 3 + j], T(-1), T(1));
      y.v[static_cast<std::size_t>(i) * 3 + 2] =
          std::max(x.v[static_cast<std::size_t>(i) * 3 + 2], T(0));
    }
    return y;
  }
  Tensor<T> x_;
};

}  // namespace acdc::nn

#endif  // ACDC_NN_LAYERS_HPP_
