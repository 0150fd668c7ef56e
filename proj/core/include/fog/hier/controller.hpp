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
#include <functional>
#include <vector>

#include "fog/agent/config.hpp"
#include "fog/agent/sac.hpp"
#include "fog/core/rng.hpp"
#include "fog/core/types.hpp"
#include "fog/envs/env.hpp"

namespace fog::hier {

using core::Vec;

inline constexpr int kDecisionInterval = 50;
inline constexpr double kGoalRange = 10.0;
inline constexpr double kReachRadius = 1.0;
inline constexpr double kGoalReward = 10.0;

/// Target position with both coordinates in [-10, 10].
class Goal {
 public:
  /// Throws InvalidArgument when a coordinate is outside the range or non-finite.
  Goal(double x, double y);
  static Goal sample(core::Rng& rng);

  const Eigen::Vector2d& position() const noexcept { return g_; }
  bool reached(const Eigen::Vector2d& pos) const { return (pos - g_).norm() < kReachRadius; }

 private:
  Eigen::Vector2d g_;
};

/// What the high level sees before each decision.
struct DecisionContext {
  Vec state;         // vector state of the environment
  const Goal* goal;
  bool reached;      // goal reward already collected
  int decision;      // 0, 1, 2, ...
};

/// Maps a decision context to a unit skill.
using SkillChooser = std::function<core::Skill(const DecisionContext&)>;

struct Decision {
  DecisionContext ctx;
  core::Skill skill;
  Vec raw_action;    // controller output before normalization (empty for non-learned choosers)
  double reward = 0.0;
};

struct HierEpisode {
  double ret = 0.0;
  int reached_step = -1;  // env step after which the goal held, -1 if never
  core::Trajectory traj;  // vector states; z is the first decision's skill
  std::vector<int> decision_steps;
  std::vector<Decision> decisions;
};

/// Runs one episode: a skill is chosen at every multiple of K and the frozen
/// policy executes it deterministically. Reward 10 is paid once, at the first
/// step whose position lies within 1.0 of the goal.
HierEpisode run_hier_episode(const SkillChooser& chooser, const agent::Policy& frozen, agent::ObsMode obs_mode,
                             envs::Env& env, const Goal& goal);

struct ControllerConfig {
  int hidden_width = 64;
  double lr = 1e-3;
  double discount = 0.99;  // per decision
  double init_alpha = 0.1;
  int batch_size = 64;
  int updates_per_episode = 16;
  int warmup_episodes = 10;  // random skills before the first update
};

/// Actor-critic over decisions. Its observation is the scaled state, the
/// goal / 10, the reached flag and the decision index / decisions-per-episode.
class Controller {
 public:
  Controller(const envs::EnvSpec& env, const Vec& obs_scale, int skill_dim, const ControllerConfig& cfg,
             core::Rng& rng);

  Vec observation(const DecisionContext& ctx) const;
  /// Raw action in [-1, 1]^skill_dim.
  Vec act(const DecisionContext& ctx, bool deterministic, core::Rng& rng) const;
  /// Normalized skill; a zero raw action falls back to the first axis.
  static core::Skill to_skill(const Vec& raw);

  agent::SacAgent& agent() noexcept { return sac_; }
  const agent::SacAgent& agent() const noexcept { return sac_; }
  int skill_dim() const noexcept { return skill_dim_; }
  int decisions_per_episode() const noexcept { return decisions_; }

 private:
  agent::SacAgent sac_;
  int skill_dim_;
  int decisions_;
};

struct ControllerResult {
  std::vector<double> returns;  // one per training episode
  std::uint64_t frozen_hash_before = 0;
  std::uint64_t frozen_hash_after = 0;
};

/// Trains `controller` for `episodes` episodes with fresh goals. Throws
/// TrainingDivergenceError if the frozen policy's parameters change.
ControllerResult train_controller(Controller& controller, const agent::Policy& frozen, agent::ObsMode obs_mode,
                                  envs::Env& env, int episodes, const ControllerConfig& cfg, core::Rng& rng);

/// Same protocol with a uniformly random skill at every decision.
std::vector<double> random_skill_baseline(const agent::Policy& frozen, agent::ObsMode obs_mode, envs::Env& env,
                                          int skill_dim, int episodes, core::Rng& rng);

/// Mean of the last `n` entries (all entries if fewer).
double tail_mean(const std::vector<double>& values, std::size_t n);

}  // namespace fog::hier
