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


#include "fog/hier/controller.hpp"

#include <cmath>
#include <string>

#include "fog/agent/trainer.hpp"
#include "fog/core/errors.hpp"

namespace fog::hier {

namespace {

void check_frozen(const agent::Policy& frozen, agent::ObsMode mode, const envs::Env& env, int skill_dim) {
  const auto& spec = frozen.net().spec();
  const bool conv = spec.encoder == nn::EncoderKind::kConv;
  if (conv != (mode == agent::ObsMode::kPixels)) {
    throw InvalidArgument("frozen policy observation kind does not match the requested mode");
  }
  if (!conv && spec.obs_dim != env.spec().state_dim) {
    throw InvalidArgument("frozen policy expects " + std::to_string(spec.obs_dim) + " state features but " +
                          env.spec().name + " has " + std::to_string(env.spec().state_dim));
  }
  if (spec.extra_dim != skill_dim) {
    throw InvalidArgument("frozen policy is conditioned on " + std::to_string(spec.extra_dim) +
                          "-dimensional skills, not " + std::to_string(skill_dim));
  }
}

struct HighTransition {
  Vec obs, action, next_obs;
  double reward = 0.0;
  bool terminal = false;
};

}  // namespace

Goal::Goal(double x, double y) : g_(x, y) {
  if (!std::isfinite(x) || !std::isfinite(y) || std::abs(x) > kGoalRange || std::abs(y) > kGoalRange) {
    throw InvalidArgument("goal (" + std::to_string(x) + ", " + std::to_string(y) + ") lies outside [-10, 10]^2");
  }
}

Goal Goal::sample(core::Rng& rng) {
  const double x = rng.uniform(-kGoalRange, kGoalRange);
  const double y = rng.uniform(-kGoalRange, kGoalRange);
  return Goal(x, y);
}

HierEpisode run_hier_episode(const SkillChooser& chooser, const agent::Policy& frozen, agent::ObsMode obs_mode,
                             envs::Env& env, const Goal& goal) {
  const int skill_dim = frozen.net().spec().extra_dim;
  check_frozen(frozen, obs_mode, env, skill_dim);
  core::Rng unused(0);  // deterministic execution never draws

  HierEpisode ep;
  ep.traj.states.push_back(env.reset());
  bool reached = false;
  core::Skill z;
  while (!env.finished()) {
    const int t = env.t();
    if (t % kDecisionInterval == 0) {
      DecisionContext ctx{env.state().vec(), &goal, reached, t / kDecisionInterval};
      z = chooser(ctx);
      if (z.dim() != skill_dim) throw InvalidArgument("chooser returned a skill of the wrong dimension");
      if (ep.decisions.empty()) ep.traj.z = z;
      ep.decision_steps.push_back(t);
      ep.decisions.push_back({ctx, z, Vec(), 0.0});
    }
    const core::State obs = agent::observe(env, obs_mode);
    const Vec a = frozen.act(nn::Network::states_to_matrix({&obs}), z.z(), true, unused);
    const envs::StepResult r = env.step(a);
    ep.traj.actions.push_back(a);
    ep.traj.scores.push_back(1.0);
    ep.traj.states.push_back(r.state);
    if (!reached && goal.reached(env.position())) {
      reached = true;
      ep.reached_step = env.t();
      ep.ret += kGoalReward;
      ep.decisions.back().reward += kGoalReward;
    }
  }
  return ep;
}

Controller::Controller(const envs::EnvSpec& env, const Vec& obs_scale, int skill_dim, const ControllerConfig& cfg,
                       core::Rng& rng)
    : skill_dim_(skill_dim), decisions_((env.episode_len + kDecisionInterval - 1) / kDecisionInterval) {
  if (skill_dim < 1) throw InvalidArgument("controller needs skill_dim >= 1");
  if (obs_scale.size() != env.state_dim) throw InvalidArgument("observation scale does not match the state");
  agent::SacConfig sc;
  sc.obs_dim = env.state_dim + 4;
  sc.obs_scale = Vec::Ones(sc.obs_dim);
  sc.obs_scale.head(env.state_dim) = obs_scale;
  sc.action_dim = skill_dim;
  sc.hidden_width = cfg.hidden_width;
  sc.lr = cfg.lr;
  sc.discount = cfg.discount;
  sc.init_alpha = cfg.init_alpha;
  sac_ = agent::SacAgent(sc, rng);
}

Vec Controller::observation(const DecisionContext& ctx) const {
  const Eigen::Index n = ctx.state.size();
  Vec o(n + 4);
  o.head(n) = ctx.state;
  o[n] = ctx.goal->position().x() / kGoalRange;
  o[n + 1] = ctx.goal->position().y() / kGoalRange;
  o[n + 2] = ctx.reached ? 1.0 : 0.0;
  o[n + 3] = static_cast<double>(ctx.decision) / decisions_;
  return o;
}

Vec Controller::act(const DecisionContext& ctx, bool deterministic, core::Rng& rng) const {
  return sac_.policy().act(observation(ctx), Vec(), deterministic, rng);
}

core::Skill Controller::to_skill(const Vec& raw) {
  if (raw.norm() < 1e-12) {
    Vec e = Vec::Zero(raw.size());
    e[0] = 1.0;
    return core::Skill(e);
  }
  return core::Skill::normalized(raw);
}

ControllerResult train_controller(Controller& controller, const agent::Policy& frozen, agent::ObsMode obs_mode,
                                  envs::Env& env, int episodes, const ControllerConfig& cfg, core::Rng& rng) {
  if (episodes < 0) throw InvalidArgument("episode count must be non-negative");
  ControllerResult result;
  result.frozen_hash_before = frozen.param_hash();
  core::Rng act_rng = rng.fork(1);
  core::Rng update_rng = rng.fork(2);
  core::Rng goal_rng = rng.fork(3);
  std::vector<HighTransition> memory;
  const int dim = controller.skill_dim();

  for (int e = 0; e < episodes; ++e) {
    const Goal goal = Goal::sample(goal_rng);
    std::vector<Vec> raws;
    const bool warmup = e < cfg.warmup_episodes;
    const SkillChooser chooser = [&](const DecisionContext& ctx) {
      Vec raw(dim);
      if (warmup) {
        for (int i = 0; i < dim; ++i) raw[i] = act_rng.uniform(-1.0, 1.0);
      } else {
        raw = controller.act(ctx, false, act_rng);
      }
      raws.push_back(raw);
      return Controller::to_skill(raw);
    };
    HierEpisode ep = run_hier_episode(chooser, frozen, obs_mode, env, goal);
    result.returns.push_back(ep.ret);

    const std::size_t k = ep.decisions.size();
    for (std::size_t i = 0; i < k; ++i) {
      HighTransition h;
      h.obs = controller.observation(ep.decisions[i].ctx);
      h.action = raws[i];
      h.reward = ep.decisions[i].reward;
      h.terminal = i + 1 == k;
      if (h.terminal) {
        h.next_obs = h.obs;
      } else {
        h.next_obs = controller.observation(ep.decisions[i + 1].ctx);
      }
      memory.push_back(std::move(h));
    }
    if (warmup || memory.empty()) continue;

    const Eigen::Index obs_dim = memory.front().obs.size();
    const auto b = static_cast<Eigen::Index>(std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), memory.size()));
    for (int u = 0; u < cfg.updates_per_episode; ++u) {
      agent::SacBatch batch;
      batch.obs.resize(obs_dim, b);
      batch.next_obs.resize(obs_dim, b);
      batch.actions.resize(dim, b);
      batch.cond.resize(0, b);
      batch.next_cond.resize(0, b);
      batch.rewards.resize(b);
      batch.terminal.resize(b);
      for (Eigen::Index j = 0; j < b; ++j) {
        const HighTransition& h = memory[update_rng.index(memory.size())];
        batch.obs.col(j) = h.obs;
        batch.next_obs.col(j) = h.next_obs;
        batch.actions.col(j) = h.action;
        batch.rewards[j] = h.reward;
        batch.terminal[j] = h.terminal ? 1.0 : 0.0;
      }
      controller.agent().update(batch, update_rng);
    }
  }

  result.frozen_hash_after = frozen.param_hash();
  if (result.frozen_hash_after != result.frozen_hash_before) {
    throw TrainingDivergenceError("frozen low-level policy changed during controller training");
  }
  return result;
}

std::vector<double> random_skill_baseline(const agent::Policy& frozen, agent::ObsMode obs_mode, envs::Env& env,
                                          int skill_dim, int episodes, core::Rng& rng) {
  core::Rng skill_rng = rng.fork(1);
  core::Rng goal_rng = rng.fork(3);
  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(std::max(episodes, 0)));
  const SkillChooser chooser = [&](const DecisionContext&) { return core::sample_skill(skill_dim, skill_rng); };
  for (int e = 0; e < episodes; ++e) {
    const Goal goal = Goal::sample(goal_rng);
    returns.push_back(run_hier_episode(chooser, frozen, obs_mode, env, goal).ret);
  }
  return returns;
}

double tail_mean(const std::vector<double>& values, std::size_t n) {
  if (values.empty()) return 0.0;
  const std::size_t k = std::min(n, values.size());
  double s = 0.0;
  for (std::size_t i = values.size() - k; i < values.size(); ++i) s += values[i];
  return s / static_cast<double>(k);
}

}  // namespace fog::hier
