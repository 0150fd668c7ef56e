/*
 Copyright 2026 The fog-skills Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "fog/nn/layers.hpp"

#include <cmath>

#include "fog/core/errors.hpp"

namespace fog::nn {

using MapM = Eigen::Map<const Matrix>;
using MapV = Eigen::Map<const Vector>;
using MutMapM = Eigen::Map<Matrix>;
using MutMapV = Eigen::Map<Vector>;

Matrix activate(Activation act, const Matrix& z) {
  switch (act) {
    case Activation::kIdentity:
      return z;
    case Activation::kRelu:
      return z.cwiseMax(0.0);
    case Activation::kTanh:
      return z.array().tanh().matrix();
    case Activation::kSilu:
      return (z.array() / (1.0 + (-z.array()).exp())).matrix();
  }
  return z;
}

Matrix activation_backward(Activation act, const Matrix& z, const Matrix& a, const Matrix& da) {
  switch (act) {
    case Activation::kIdentity:
      return da;
    case Activation::kRelu:
      return (z.array() > 0.0).select(da, 0.0);
    case Activation::kTanh:
      return (da.array() * (1.0 - a.array().square())).matrix();
    case Activation::kSilu: {
      const auto sig = 1.0 / (1.0 + (-z.array()).exp());
      return (da.array() * sig * (1.0 + z.array() * (1.0 - sig))).matrix();
    }
  }
  return da;
}

// ---------------------------------------------------------------------------
// MLP

MlpLayout::MlpLayout(std::vector<int> sizes, Activation hidden)
    : sizes_(std::move(sizes)), hidden_(hidden) {
  if (sizes_.size() < 2) throw InvalidArgument("MLP needs at least input and output sizes");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(num_params_);
    num_params_ += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
}

void MlpLayout::init(double* params, core::Rng& rng, double last_scale) const {
  const std::size_t layers = offsets_.size();
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in)) * (l + 1 == layers ? last_scale : 1.0);
    const std::size_t n = static_cast<std::size_t>(in) * out + out;
    for (std::size_t i = 0; i < n; ++i) params[offsets_[l] + i] = rng.uniform(-bound, bound);
  }
}

Matrix MlpLayout::forward(const double* params, const Matrix& x, MlpTape* tape) const {
  if (x.rows() != sizes_.front()) throw InvalidArgument("MLP input has wrong dimension");
  const std::size_t layers = offsets_.size();
  if (tape) {
    tape->inputs.resize(layers);
    tape->pre.resize(layers);
  }
  Matrix h = x;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    MapM w(params + offsets_[l], out, in);
    MapV b(params + offsets_[l] + static_cast<std::size_t>(in) * out, out);
    Matrix z(out, h.cols());
    z.noalias() = w * h;
    z.colwise() += b;
    Matrix a = (l + 1 == layers) ? z : activate(hidden_, z);
    if (tape) {
      tape->inputs[l] = std::move(h);
      tape->pre[l] = std::move(z);
    }
    h = std::move(a);
  }
  if (tape) tape->output = h;
  return h;
}

Matrix MlpLayout::backward(const double* params, const MlpTape& tape, const Matrix& dy,
                           double* grad) const {
  const std::size_t layers = offsets_.size();
  Matrix delta = dy;
  for (std::size_t l = layers; l-- > 0;) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    if (l + 1 != layers) {
      // Output of layer l is the input of layer l + 1.
      delta = activation_backward(hidden_, tape.pre[l], tape.inputs[l + 1], delta);
    }
    if (grad) {
      MutMapM gw(grad + offsets_[l], out, in);
      MutMapV gb(grad + offsets_[l] + static_cast<std::size_t>(in) * out, out);
      gw.noalias() += delta * tape.inputs[l].transpose();
      gb += delta.rowwise().sum();
    }
    MapM w(params + offsets_[l], out, in);
    Matrix dx(in, delta.cols());
    dx.noalias() = w.transpose() * delta;
    delta = std::move(dx);
  }
  return delta;
}

// ---------------------------------------------------------------------------
// Convolution

ConvLayout::ConvLayout(int in_height, int in_width, int in_channels, std::vector<ConvSpec> layers)
    : in_h_(in_height), in_w_(in_width), in_c_(in_channels) {
  int h = in_h_, w = in_w_, c = in_c_;
  for (const ConvSpec& s : layers) {
    Geometry g{};
    g.in_h = h;
    g.in_w = w;
    g.in_c = c;
    g.k = s.kernel;
    g.stride = s.stride;
    g.pad = s.padding;
    g.out_c = s.out_channels;
    g.out_h = (h + 2 * s.padding - s.kernel) / s.stride + 1;
    g.out_w = (w + 2 * s.padding - s.kernel) / s.stride + 1;
    if (g.out_h <= 0 || g.out_w <= 0) throw InvalidArgument("convolution shrinks the map to nothing");
    g.w_offset = num_params_;
    num_params_ += static_cast<std::size_t>(g.out_c) * g.k * g.k * g.in_c;
    g.b_offset = num_params_;
    num_params_ += g.out_c;
    geo_.push_back(g);
    h = g.out_h;
    w = g.out_w;
    c = g.out_c;
  }
}

int ConvLayout::output_dim() const {
  if (geo_.empty()) return input_dim();
  const Geometry& g = geo_.back();
  return g.out_h * g.out_w * g.out_c;
}

void ConvLayout::init(double* params, core::Rng& rng) const {
  for (const Geometry& g : geo_) {
    const int fan_in = g.k * g.k * g.in_c;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = g.w_offset; i < g.b_offset + g.out_c; ++i) params[i] = rng.uniform(-bound, bound);
  }
}

Matrix ConvLayout::im2col(const Geometry& g, const double* x) const {
  const int kk = g.k * g.k * g.in_c;
  Matrix cols = Matrix::Zero(kk, g.out_h * g.out_w);
  for (int oh = 0; oh < g.out_h; ++oh) {
    for (int ow = 0; ow < g.out_w; ++ow) {
      double* col = cols.col(oh * g.out_w + ow).data();
      for (int kh = 0; kh < g.k; ++kh) {
        const int ih = oh * g.stride - g.pad + kh;
        if (ih < 0 || ih >= g.in_h) continue;
        for (int kw = 0; kw < g.k; ++kw) {
          const int iw = ow * g.stride - g.pad + kw;
          if (iw < 0 || iw >= g.in_w) continue;
          const double* src = x + (static_cast<std::size_t>(ih) * g.in_w + iw) * g.in_c;
          double* dst = col + (kh * g.k + kw) * g.in_c;
          for (int c = 0; c < g.in_c; ++c) dst[c] = src[c];
        }
      }
    }
  }
  return cols;
}

void ConvLayout::col2im(const Geometry& g, const Matrix& cols, double* dx) const {
  for (int oh = 0; oh < g.out_h; ++oh) {
    for (int ow = 0; ow < g.out_w; ++ow) {
      const double* col = cols.col(oh * g.out_w + ow).data();
      for (int kh = 0; kh < g.k; ++kh) {
        const int ih = oh * g.stride - g.pad + kh;
        if (ih < 0 || ih >= g.in_h) continue;
        for (int kw = 0; kw < g.k; ++kw) {
          const int iw = ow * g.stride - g.pad + kw;
          if (iw < 0 || iw >= g.in_w) continue;
          double* dst = dx + (static_cast<std::size_t>(ih) * g.in_w + iw) * g.in_c;
          const double* src = col + (kh * g.k + kw) * g.in_c;
          for (int c = 0; c < g.in_c; ++c) dst[c] += src[c];
        }
      }
    }
  }
}

Matrix ConvLayout::forward(const double* params, const Matrix& x, ConvTape* tape) const {
  if (x.rows() != input_dim()) throw InvalidArgument("conv input has wrong dimension");
  const Eigen::Index batch = x.cols();
  if (tape) {
    tape->patches.assign(geo_.size(), {});
    tape->pre.assign(geo_.size(), {});
    tape->post.assign(geo_.size(), {});
  }
  Matrix h = x;
  for (std::size_t l = 0; l < geo_.size(); ++l) {
    const Geometry& g = geo_[l];
    const int kk = g.k * g.k * g.in_c;
    const int positions = g.out_h * g.out_w;
    MapM w(params + g.w_offset, g.out_c, kk);
    MapV b(params + g.b_offset, g.out_c);
    Matrix z(static_cast<Eigen::Index>(g.out_c) * positions, batch);
    if (tape) tape->patches[l].resize(static_cast<std::size_t>(batch));
    for (Eigen::Index s = 0; s < batch; ++s) {
      Matrix cols = im2col(g, h.col(s).data());
      MutMapM zs(z.col(s).data(), g.out_c, positions);
      zs.noalias() = w * cols;
      zs.colwise() += b;
      if (tape) tape->patches[l][static_cast<std::size_t>(s)] = std::move(cols);
    }
    Matrix a = z.cwiseMax(0.0);
    if (tape) {
      tape->pre[l] = std::move(z);
      tape->post[l] = a;
    }
    h = std::move(a);
  }
  return h;
}

Matrix ConvLayout::backward(const double* params, const ConvTape& tape, const Matrix& dy,
                            double* grad) const {
  Matrix delta = dy;
  const Eigen::Index batch = dy.cols();
  for (std::size_t l = geo_.size(); l-- > 0;) {
    const Geometry& g = geo_[l];
    const int kk = g.k * g.k * g.in_c;
    const int positions = g.out_h * g.out_w;
    delta = (tape.pre[l].array() > 0.0).select(delta, 0.0);
    MapM w(params + g.w_offset, g.out_c, kk);
    Matrix dx = Matrix::Zero(static_cast<Eigen::Index>(g.in_h) * g.in_w * g.in_c, batch);
    for (Eigen::Index s = 0; s < batch; ++s) {
      MapM ds(delta.col(s).data(), g.out_c, positions);
      const Matrix& cols = tape.patches[l][static_cast<std::size_t>(s)];
      if (grad) {
        MutMapM gw(grad + g.w_offset, g.out_c, kk);
        MutMapV gb(grad + g.b_offset, g.out_c);
        gw.noalias() += ds * cols.transpose();
        gb += ds.rowwise().sum();
      }
      Matrix dcols(kk, positions);
      dcols.noalias() = w.transpose() * ds;
      col2im(g, dcols, dx.col(s).data());
    }
    delta = std::move(dx);
  }
  return delta;
}

}  // namespace fog::nn
