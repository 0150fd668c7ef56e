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

#pragma once

// Minimal dense and convolutional layers with hand-written backprop.
//
// Layers are parameter *layouts*: they do not own weights. Weights live in a
// caller-owned flat array so optimizers, checkpoints and hashes see one
// contiguous buffer. Batches are column-major matrices, one sample per column.

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "fog/core/rng.hpp"

namespace fog::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { kIdentity, kRelu, kTanh, kSilu };

/// Applies `act` elementwise.
Matrix activate(Activation act, const Matrix& z);
/// dL/dz given dL/da, the pre-activation z and the activation a = act(z).
Matrix activation_backward(Activation act, const Matrix& z, const Matrix& a, const Matrix& da);

struct MlpTape {
  std::vector<Matrix> inputs;  // input to each layer
  std::vector<Matrix> pre;     // pre-activation of each layer
  Matrix output;
};

/// Fully connected stack. Hidden layers use `hidden`; the last layer is linear.
class MlpLayout {
 public:
  MlpLayout() = default;
  MlpLayout(std::vector<int> sizes, Activation hidden);

  std::size_t num_params() const noexcept { return num_params_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  const std::vector<int>& sizes() const noexcept { return sizes_; }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)); the last layer is scaled by `last_scale`.
  void init(double* params, core::Rng& rng, double last_scale = 1.0) const;

  Matrix forward(const double* params, const Matrix& x, MlpTape* tape) const;
  /// Accumulates parameter gradients into `grad` when non-null and returns dL/dx.
  Matrix backward(const double* params, const MlpTape& tape, const Matrix& dy, double* grad) const;

 private:
  std::vector<int> sizes_;
  Activation hidden_ = Activation::kRelu;
  std::vector<std::size_t> offsets_;  // start of each layer's W; b follows W
  std::size_t num_params_ = 0;
};

/// One 2-D convolution over HWC-ordered feature maps.
struct ConvSpec {
  int out_channels;
  int kernel;
  int stride;
  int padding;
};

struct ConvTape {
  std::vector<std::vector<Matrix>> patches;  // [layer][sample] im2col matrices
  std::vector<Matrix> pre;                   // [layer] (Cout*P x batch)
  std::vector<Matrix> post;
};

/// Stack of ReLU convolutions. Input and output columns are flattened HWC maps.
class ConvLayout {
 public:
  ConvLayout() = default;
  ConvLayout(int in_height, int in_width, int in_channels, std::vector<ConvSpec> layers);

  std::size_t num_params() const noexcept { return num_params_; }
  int input_dim() const { return in_h_ * in_w_ * in_c_; }
  int output_dim() const;

  void init(double* params, core::Rng& rng) const;
  Matrix forward(const double* params, const Matrix& x, ConvTape* tape) const;
  Matrix backward(const double* params, const ConvTape& tape, const Matrix& dy, double* grad) const;

 private:
  struct Geometry {
    int in_h, in_w, in_c, out_h, out_w, out_c, k, stride, pad;
    std::size_t w_offset, b_offset;
  };
  Matrix im2col(const Geometry& g, const double* x) const;
  void col2im(const Geometry& g, const Matrix& cols, double* dx) const;

  int in_h_ = 0, in_w_ = 0, in_c_ = 0;
  std::vector<Geometry> geo_;
  std::size_t num_params_ = 0;
};

}  // namespace fog::nn
