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
#include <memory>
#include <string>

#include "fog/core/types.hpp"

namespace fog::envs {

using core::Vec;

struct EnvSpec {
  std::string name;
  int state_dim = 0;
  int action_dim = 0;
  int episode_len = 200;
  bool render_available = true;
};

struct StepResult {
  core::State state;
  bool done = false;
};

/// Reward-free, deterministic, fixed-horizon environment.
///
/// Instances are single-owner mutable objects. Dynamics are pure functions of
/// (state, action): replaying an action log reproduces the trajectory bitwise.
class Env {
 public:
  virtual ~Env() = default;

  virtual const EnvSpec& spec() const noexcept = 0;
  /// Start state is fixed; the seed is accepted for interface symmetry.
  virtual core::State reset(std::uint64_t seed = 0) = 0;
  /// Actions are clipped to [-1, 1]. Throws EpisodeFinishedError after the last step.
  virtual StepResult step(const Vec& action) = 0;
  virtual core::State state() const = 0;
  /// Frame of the current state.
  virtual core::Image render() const = 0;
  /// Planar coordinates used for coverage and hazard checks (x, y).
  virtual Eigen::Vector2d position() const = 0;
  virtual std::unique_ptr<Env> clone() const = 0;

  /// Per-feature multiplier bringing observations to roughly unit scale.
  virtual Vec observation_scale() const = 0;
  /// Plain-language summaries used when asking a language model for a checker.
  virtual std::string task_description() const = 0;
  virtual std::string state_space_doc() const = 0;

  int t() const noexcept { return t_; }
  bool finished() const noexcept { return t_ >= spec().episode_len; }

 protected:
  int t_ = 0;
};

/// "pointroom" or "tipcart". Throws InvalidArgument for unknown names.
std::unique_ptr<Env> make_env(const std::string& name);
EnvSpec env_spec(const std::string& name);

/// Renders a frame directly from a state vector of the named environment.
core::Image render_state(const std::string& env_name, const Vec& state);
/// Planar coordinates of a state vector of the named environment.
Eigen::Vector2d position_of(const std::string& env_name, const Vec& state);

}  // namespace fog::envs
