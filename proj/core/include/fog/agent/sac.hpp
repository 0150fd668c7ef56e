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

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "fog/core/binary_io.hpp"
#include "fog/core/rng.hpp"
#include "fog/core/types.hpp"
#include "fog/nn/network.hpp"

namespace fog::agent {

using core::Vec;
using nn::Matrix;
using nn::Vector;

struct SacConfig {
  bool image_obs = false;
  int obs_dim = 0;        // vector observations only
  Vec obs_scale;          // per-feature multiplier (empty = ones)
  int cond_dim = 0;       // conditioning input appended at the head (skill, ...)
  int action_dim = 0;
  int hidden_width = 256;
  double lr = 3e-4;
  double alpha_lr = 1e-3;  // temperature; faster than lr so entropy tracks its target
  double discount = 0.99;
  double target_decay = 0.995;  // target <- decay * target + (1 - decay) * online
  double init_alpha = 1.0;
  /// Entropy target; NaN means -action_dim.
  double target_entropy = std::numeric_limits<double>::quiet_NaN();
};

/// One minibatch. Columns are samples.
struct SacBatch {
  Matrix obs, cond, actions, next_obs, next_cond;
  Vector rewards;
  Vector terminal;  // 1 stops bootstrapping; time-limit ends are not terminal
};

struct SacStats {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double alpha = 0.0;
  double entropy = 0.0;  // -mean log pi of fresh actions
  double q_mean = 0.0;
};

/// Tanh-squashed Gaussian policy pi(a | s, c).
class Policy {
 public:
  static constexpr double kLogStdMin = -5.0;
  static constexpr double kLogStdMax = 2.0;

  Policy() = default;
  Policy(const SacConfig& cfg, core::Rng& rng);

  int action_dim() const noexcept { return action_dim_; }
  nn::Network& net() noexcept { return net_; }
  const nn::Network& net() const noexcept { return net_; }

  struct Sample {
    Matrix actions;   // tanh(u)
    Vector log_prob;  // per column
    // Intermediates for the reparameterised gradient.
    Matrix mean, raw_log_std, log_std, noise;
    nn::NetworkTape tape;
  };

  /// Stochastic sample (noise drawn from rng) or, when deterministic, tanh(mean).
  Sample sample(const Matrix& obs, const Matrix& cond, bool deterministic, core::Rng& rng, bool keep_tape) const;

  /// Single observation convenience. Result lies in [-1, 1]^action_dim.
  Vec act(const Matrix& obs_col, const Vec& cond, bool deterministic, core::Rng& rng) const;

  /// Backprop dL/da and dL/dlogpi (per column) into parameter gradients.
  void backward(const Sample& s, const Matrix& d_actions, const Vector& d_log_prob, Vector* grad) const;

  std::uint64_t param_hash() const;

 private:
  nn::Network net_;
  int action_dim_ = 0;
};

/// Twin Q networks with Polyak-averaged targets.
class CriticPair {
 public:
  CriticPair() = default;
  CriticPair(const SacConfig& cfg, core::Rng& rng);

  nn::Network& q(int i) noexcept { return q_[i]; }
  const nn::Network& q(int i) const noexcept { return q_[i]; }
  nn::Network& target(int i) noexcept { return target_[i]; }
  const nn::Network& target(int i) const noexcept { return target_[i]; }

  /// Q_i(s, c, a), one value per column.
  Vector value(int i, const Matrix& obs, const Matrix& cond, const Matrix& actions, nn::NetworkTape* tape = nullptr) const;
  Vector target_value(int i, const Matrix& obs, const Matrix& cond, const Matrix& actions) const;

  void update_targets(double decay);

 private:
  nn::Network q_[2];
  nn::Network target_[2];
};

/// Soft actor-critic with automatic temperature tuning.
class SacAgent {
 public:
  SacAgent() = default;
  SacAgent(SacConfig cfg, core::Rng& rng);

  const SacConfig& config() const noexcept { return cfg_; }
  Policy& policy() noexcept { return policy_; }
  const Policy& policy() const noexcept { return policy_; }
  CriticPair& critics() noexcept { return critics_; }
  const CriticPair& critics() const noexcept { return critics_; }

  double alpha() const { return std::exp(log_alpha_); }
  double log_alpha() const noexcept { return log_alpha_; }
  double target_entropy() const noexcept { return target_entropy_; }

  /// One critic, actor and temperature step followed by a target update.
  /// Throws TrainingDivergenceError on non-finite losses or gradients.
  SacStats update(const SacBatch& batch, core::Rng& rng);

  /// Critic step only (exposed for tests).
  double update_critics(const SacBatch& batch, core::Rng& rng);

  std::int64_t updates() const noexcept { return updates_; }

  void save(core::ByteWriter& out) const;
  void load(core::ByteReader& in);

 private:
  SacConfig cfg_;
  Policy policy_;
  CriticPair critics_;
  nn::Adam policy_opt_, q_opt_[2], alpha_opt_;
  double log_alpha_ = 0.0;
  double target_entropy_ = 0.0;
  std::int64_t updates_ = 0;
};

}  // namespace fog::agent
