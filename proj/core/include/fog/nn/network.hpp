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

#include <cstdint>
#include <vector>

#include "fog/core/binary_io.hpp"
#include "fog/core/rng.hpp"
#include "fog/core/types.hpp"
#include "fog/nn/layers.hpp"

namespace fog::nn {

enum class EncoderKind : std::uint8_t { kVector = 0, kConv = 1 };

struct NetworkSpec {
  EncoderKind encoder = EncoderKind::kVector;
  /// Length of a vector observation; ignored for kConv (64x64x3 frames).
  int obs_dim = 0;
  /// Fixed per-feature multiplier for vector observations (empty = ones).
  Vector obs_scale;
  /// Extra inputs concatenated after the encoded observation (skill, action, goal...).
  int extra_dim = 0;
  std::vector<int> hidden{256, 256};
  int out_dim = 1;
  Activation activation = Activation::kRelu;
  double last_layer_scale = 1.0;
};

struct NetworkTape {
  ConvTape conv;
  MlpTape head;
  int feature_dim = 0;
};

/// Observation encoder followed by an MLP head, with one flat parameter vector.
///
/// Vector observations are scaled elementwise; frames pass through a small
/// three-layer stride-2 ReLU convolution stack.
class Network {
 public:
  Network() = default;
  Network(NetworkSpec spec, core::Rng& rng);

  const NetworkSpec& spec() const noexcept { return spec_; }
  std::size_t num_params() const noexcept { return static_cast<std::size_t>(params_.size()); }
  Vector& params() noexcept { return params_; }
  const Vector& params() const noexcept { return params_; }

  /// obs: one observation per column; extra: (extra_dim x batch), may be empty when extra_dim == 0.
  Matrix forward(const Matrix& obs, const Matrix& extra, NetworkTape* tape = nullptr) const;
  /// Accumulates dL/dparams into `grad` (sized num_params) when non-null; returns dL/dextra.
  Matrix backward(const NetworkTape& tape, const Matrix& dy, Vector* grad) const;

  /// Frames are fed as raw bytes / 255 in HWC order.
  static Matrix frames_to_matrix(const std::vector<const core::Image*>& frames);
  /// One column per state. All states must share a kind (and length, for vectors).
  static Matrix states_to_matrix(const std::vector<const core::State*>& states);

 private:
  NetworkSpec spec_;
  ConvLayout conv_;
  MlpLayout head_;
  std::size_t head_offset_ = 0;
  Vector params_;
};

/// Adaptive-moment optimizer over one flat parameter vector.
class Adam {
 public:
  Adam() = default;
  explicit Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  /// Gradient *descent* step.
  void step(Vector& params, const Vector& grad);

  double lr() const noexcept { return lr_; }
  std::int64_t steps() const noexcept { return t_; }

  void save(core::ByteWriter& out) const;
  void load(core::ByteReader& in);

 private:
  double lr_ = 1e-4, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  Vector m_, v_;
  std::int64_t t_ = 0;
};

/// Polyak averaging: target <- tau * target + (1 - tau) * source.
void soft_update(Vector& target, const Vector& source, double tau);

}  // namespace fog::nn
