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
#include <vector>

#include "fog/core/binary_io.hpp"
#include "fog/core/rng.hpp"
#include "fog/core/types.hpp"
#include "fog/nn/network.hpp"
#include "fog/score/score.hpp"

namespace fog::dsd {

using core::Vec;
using nn::Matrix;
using nn::Vector;

/// Minibatch view into the replay buffer.
using Batch = std::vector<const core::Transition*>;
Batch as_batch(const std::vector<core::Transition>& transitions);

inline constexpr double kDefaultEpsilon = 1e-3;
inline constexpr double kDefaultInitLambda = 30.0;
inline constexpr double kDefaultLr = 1e-4;

/// State representation phi: S -> R^D. Vector states are scaled per feature;
/// frames go through the small convolutional encoder.
class PhiNet {
 public:
  PhiNet() = default;
  PhiNet(nn::NetworkSpec spec, core::Rng& rng, double lr = kDefaultLr);

  /// Two hidden SiLU layers of `width` units over a vector or frame encoder.
  static PhiNet make(bool image_obs, int state_dim, const Vec& obs_scale, int skill_dim, int width,
                     core::Rng& rng, double lr = kDefaultLr);

  int dim() const noexcept { return net_.spec().out_dim; }

  /// Throws InvalidArgument when the state does not match the network input.
  Vec forward(const core::State& s) const;
  /// One column per state.
  Matrix forward(const std::vector<const core::State*>& states, nn::NetworkTape* tape = nullptr) const;

  nn::Network& net() noexcept { return net_; }
  const nn::Network& net() const noexcept { return net_; }
  nn::Adam& optimizer() noexcept { return opt_; }

  void save(core::ByteWriter& out) const;
  void load(core::ByteReader& in);

 private:
  void check_state(const core::State& s) const;

  nn::Network net_;
  nn::Adam opt_;
};

/// Lagrange multiplier lambda = exp(log_lambda) and slack epsilon.
struct DualState {
  double log_lambda = 0.0;
  double epsilon = kDefaultEpsilon;
  nn::Adam opt{1, kDefaultLr};

  static DualState make(double init_lambda = kDefaultInitLambda, double epsilon = kDefaultEpsilon,
                        double lr = kDefaultLr);
  double lambda() const { return std::exp(log_lambda); }

  void save(core::ByteWriter& out) const;
  void load(core::ByteReader& in);
};

enum class MetricKind { kEuclidean, kTemporal, kScore };

std::string to_string(MetricKind k);
MetricKind metric_kind_from_string(const std::string& s);

/// Distance d(s, s') in the Lipschitz constraint. The score kind reads f(s')
/// from `score_fn` (non-owning) when evaluating raw pairs, and from the score
/// stored on a Transition during training.
struct MetricSpec {
  MetricKind kind = MetricKind::kTemporal;
  score::ScoreFn* score_fn = nullptr;

  /// Throws InvalidArgument for a score metric with no bound ScoreFn.
  void validate() const;
};

/// euclidean: ||s' - s||; temporal: 1; score: f(s').
/// Throws UnsupportedMetricError for euclidean on frames.
double metric_distance(const MetricSpec& spec, const core::State& s, const core::State& s_next);
/// Same, but the score kind uses the stored t.score.
double transition_distance(MetricKind kind, const core::Transition& t);

/// How the constraint ||phi(s) - phi(s')|| <= d(s, s') enters the penalty.
/// Both forms share the feasible set and the sign of the slack:
///   kSquared: d^2 - ||phi(s) - phi(s')||^2  (pull on a violating pair shrinks with it)
///   kNorm:    d - ||phi(s) - phi(s')||      (pull of constant size lambda)
enum class SlackForm { kSquared, kNorm };

std::string to_string(SlackForm f);
SlackForm slack_form_from_string(const std::string& s);

/// Slack of one pair from its distance and latent gap.
double slack_value(SlackForm form, double distance, const Vector& delta);

/// (phi(s') - phi(s))^T z.
double skill_reward(const PhiNet& phi, const core::State& s, const core::State& s_next, const core::Skill& z);
/// f(s') * r_skill.
double weighted_reward(double score, double r_skill);
/// Slack of one raw pair; positive when the constraint holds.
double constraint_slack(const PhiNet& phi, const MetricSpec& spec, const core::State& s, const core::State& s_next,
                        SlackForm form = SlackForm::kSquared);

struct PhiStats {
  double objective = 0.0;       // alignment + penalty
  double alignment = 0.0;       // mean (phi(s') - phi(s))^T z
  double penalty = 0.0;         // mean lambda * min(eps, slack)
  double mean_min_slack = 0.0;  // mean min(eps, slack)
  double satisfied = 0.0;       // fraction of pairs with slack >= 0
};

/// Batch objective
///   J = mean[(phi(s') - phi(s))^T z + lambda * min(eps, slack)]
/// and, when `grad` is non-null, dJ/dparams added into it. For kNorm, where
/// phi(s) = phi(s') the norm's subgradient is taken as zero.
PhiStats phi_objective(const PhiNet& phi, double lambda, double epsilon, const Batch& batch, MetricKind kind,
                       Vector* grad = nullptr, SlackForm form = SlackForm::kSquared);

/// One ascent step on J with lambda held fixed. Throws TrainingDivergenceError
/// on a non-finite gradient.
PhiStats update_phi(PhiNet& phi, const DualState& dual, const Batch& batch, MetricKind kind,
                    SlackForm form = SlackForm::kSquared);

/// Mean min(eps, slack) over the batch under the current phi.
double mean_min_slack(const PhiNet& phi, double epsilon, const Batch& batch, MetricKind kind,
                      SlackForm form = SlackForm::kSquared);

/// One descent step on lambda * E[min(eps, slack)] through log_lambda.
/// Returns the E[min(eps, slack)] used.
double update_lambda(DualState& dual, const Batch& batch, const PhiNet& phi, MetricKind kind,
                     SlackForm form = SlackForm::kSquared);
/// Same update from a precomputed E[min(eps, slack)].
void update_lambda_from_slack(DualState& dual, double mean_min_slack);

/// Skill rewards (phi(s') - phi(s))^T z for a batch.
Vector batch_skill_rewards(const PhiNet& phi, const Batch& batch);

/// Everything the trainer needs after a phi step, from one forward pass.
struct PairTerms {
  double mean_min_slack = 0.0;
  double satisfied = 0.0;
  Vector skill_rewards;
};
PairTerms evaluate_pairs(const PhiNet& phi, double epsilon, const Batch& batch, MetricKind kind,
                         SlackForm form = SlackForm::kSquared);

struct ScaledPhiReport {
  std::size_t pairs = 0;
  std::size_t biconditional_failures = 0;
  double max_norm_deviation = 0.0;    // | ||d phi~|| - f ||d phi|| |
  double max_reward_deviation = 0.0;  // | d phi~^T z - f d phi^T z |
  bool ok(double tol) const { return biconditional_failures == 0 && max_norm_deviation < tol &&
                                     max_reward_deviation < tol; }
};

/// With phi~ = f_const * phi, checks per pair that
///   ||phi~(s) - phi~(s')|| <= f_const  <=>  ||phi(s) - phi(s')|| <= 1
/// and that (phi~(s') - phi~(s))^T z = f_const * (phi(s') - phi(s))^T z.
/// Inputs are phi outputs, one column per pair.
ScaledPhiReport scaled_phi_check(double f_const, const Matrix& phi_s, const Matrix& phi_s_next, const Matrix& z);
/// Same, evaluating phi on (s, s', z) triples.
ScaledPhiReport scaled_phi_check(const PhiNet& phi, double f_const, const std::vector<core::Transition>& pairs);

}  // namespace fog::dsd
