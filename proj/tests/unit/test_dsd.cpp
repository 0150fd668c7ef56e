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


#include <gtest/gtest.h>

#include <cmath>

#include "fog/core/errors.hpp"
#include "fog/dsd/dsd.hpp"

using namespace fog;
using core::Vec;

namespace {

Vec v(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

// phi(s) = W s + b with s in R^1 and phi in R^2: four parameters (W0, W1, b0, b1).
dsd::PhiNet linear_phi(double w0, double w1, double b0 = 0.0, double b1 = 0.0) {
  nn::NetworkSpec spec;
  spec.obs_dim = 1;
  spec.hidden = {};
  spec.out_dim = 2;
  core::Rng rng(0);
  dsd::PhiNet phi(spec, rng);
  phi.net().params() << w0, w1, b0, b1;
  return phi;
}

core::Transition pair(double s, double s_next, const Vec& z, double score = 1.0) {
  core::Transition t;
  t.s = core::State::vector(v({s}));
  t.s_next = core::State::vector(v({s_next}));
  t.action = Vec::Zero(1);
  t.z = core::Skill::normalized(z);
  t.score = score;
  return t;
}

}  // namespace

TEST(PhiObjective, HandComputedLinearCase) {
  const auto phi = linear_phi(1.0, 2.0);
  const std::vector<core::Transition> ts{pair(0.0, 1.0, v({1, 0}))};
  const auto b = dsd::as_batch(ts);
  // delta = (1, 2), reward 1, temporal distance 1.
  const auto sq = dsd::phi_objective(phi, 2.0, 1e-3, b, dsd::MetricKind::kTemporal);
  EXPECT_NEAR(sq.alignment, 1.0, 1e-12);
  EXPECT_NEAR(sq.mean_min_slack, 1.0 - 5.0, 1e-12);
  EXPECT_NEAR(sq.objective, 1.0 + 2.0 * -4.0, 1e-12);
  EXPECT_EQ(sq.satisfied, 0.0);
  const auto nm = dsd::phi_objective(phi, 2.0, 1e-3, b, dsd::MetricKind::kTemporal, nullptr, dsd::SlackForm::kNorm);
  EXPECT_NEAR(nm.objective, 1.0 + 2.0 * (1.0 - std::sqrt(5.0)), 1e-12);
}

TEST(PhiObjective, SlackIsCappedAtEpsilon) {
  const auto phi = linear_phi(0.1, 0.0);
  const std::vector<core::Transition> ts{pair(0.0, 1.0, v({0, 1}))};
  const auto st = dsd::phi_objective(phi, 5.0, 1e-3, dsd::as_batch(ts), dsd::MetricKind::kTemporal);
  EXPECT_NEAR(st.mean_min_slack, 1e-3, 1e-15);
  EXPECT_NEAR(st.penalty, 5e-3, 1e-15);
  EXPECT_EQ(st.satisfied, 1.0);
}

class PhiGradient : public ::testing::TestWithParam<dsd::SlackForm> {};

TEST_P(PhiGradient, MatchesFiniteDifferences) {
  core::Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    auto phi = linear_phi(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    std::vector<core::Transition> ts;
    for (int i = 0; i < 6; ++i) {
      ts.push_back(pair(rng.uniform(-1, 1), rng.uniform(-1, 1), v({rng.normal(), rng.normal()}), rng.uniform(0.1, 1)));
    }
    const auto b = dsd::as_batch(ts);
    for (auto kind : {dsd::MetricKind::kTemporal, dsd::MetricKind::kScore, dsd::MetricKind::kEuclidean}) {
      nn::Vector grad = nn::Vector::Zero(4);
      dsd::phi_objective(phi, 3.0, 1e-3, b, kind, &grad, GetParam());
      for (Eigen::Index k = 0; k < 4; ++k) {
        const double h = 1e-7, saved = phi.net().params()[k];
        phi.net().params()[k] = saved + h;
        const double up = dsd::phi_objective(phi, 3.0, 1e-3, b, kind, nullptr, GetParam()).objective;
        phi.net().params()[k] = saved - h;
        const double down = dsd::phi_objective(phi, 3.0, 1e-3, b, kind, nullptr, GetParam()).objective;
        phi.net().params()[k] = saved;
        ASSERT_NEAR(grad[k], (up - down) / (2 * h), 1e-5) << "trial " << trial << " param " << k;
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(BothForms, PhiGradient, ::testing::Values(dsd::SlackForm::kSquared, dsd::SlackForm::kNorm),
                         [](const auto& info) { return dsd::to_string(info.param); });

TEST(PhiObjective, NormFormHasZeroSubgradientAtCoincidentEmbeddings) {
  const auto phi = linear_phi(0.0, 0.0, 1.0, 1.0);
  const std::vector<core::Transition> ts{pair(0.3, -0.4, v({1, 1}), 0.0)};
  nn::Vector grad = nn::Vector::Zero(4);
  const auto st = dsd::phi_objective(phi, 1.0, 1e-3, dsd::as_batch(ts), dsd::MetricKind::kScore, &grad,
                                     dsd::SlackForm::kNorm);
  EXPECT_TRUE(grad.allFinite());
  EXPECT_EQ(st.mean_min_slack, 0.0);
}

TEST(SlackValue, FormsShareFeasibleSetProperty) {
  core::Rng rng(2);
  for (int i = 0; i < 2000; ++i) {
    const double d = rng.uniform(0, 2);
    const nn::Vector delta = v({rng.normal(), rng.normal(), rng.normal()}) * rng.uniform(0, 2);
    const double sq = dsd::slack_value(dsd::SlackForm::kSquared, d, delta);
    const double nm = dsd::slack_value(dsd::SlackForm::kNorm, d, delta);
    ASSERT_EQ(sq >= 0, nm >= 0);
  }
}

TEST(Metric, DistanceOracles) {
  const auto a = core::State::vector(v({0, 0})), b = core::State::vector(v({3, 4}));
  EXPECT_EQ(dsd::metric_distance({dsd::MetricKind::kEuclidean}, a, b), 5.0);
  EXPECT_EQ(dsd::metric_distance({dsd::MetricKind::kTemporal}, a, b), 1.0);
  score::ConstantScore f(0.3);
  EXPECT_EQ(dsd::metric_distance({dsd::MetricKind::kScore, &f}, a, b), 0.3);
  EXPECT_THROW(dsd::metric_distance({dsd::MetricKind::kScore}, a, b), InvalidArgument);
  const auto img = core::State::image(core::Image::filled(1, 1, 1));
  EXPECT_THROW(dsd::metric_distance({dsd::MetricKind::kEuclidean}, img, img), UnsupportedMetricError);
}

TEST(ConstraintSlack, Examples) {
  const auto s = core::State::vector(v({0})), s2 = core::State::vector(v({1}));
  const dsd::MetricSpec temporal{dsd::MetricKind::kTemporal};
  EXPECT_EQ(dsd::constraint_slack(linear_phi(0.0, 0.0), temporal, s, s2), 1.0);
  EXPECT_NEAR(dsd::constraint_slack(linear_phi(0.6, 0.8), temporal, s, s2), 0.0, 1e-15);
  EXPECT_NEAR(dsd::constraint_slack(linear_phi(0.6, 0.8), temporal, s, s2, dsd::SlackForm::kNorm), 0.0, 1e-15);
  score::ConstantScore undesirable(0.0);
  EXPECT_LT(dsd::constraint_slack(linear_phi(0.6, 0.8), {dsd::MetricKind::kScore, &undesirable}, s, s2), 0.0);
}

TEST(Rewards, WeightedRewardAndBatchRewards) {
  EXPECT_EQ(dsd::weighted_reward(0.5, 2.0), 1.0);
  EXPECT_EQ(dsd::weighted_reward(0.0, -3.0), 0.0);
  const auto phi = linear_phi(1.0, -1.0);
  const std::vector<core::Transition> ts{pair(0, 2, v({0, 1})), pair(1, 0, v({1, 0}))};
  const auto r = dsd::batch_skill_rewards(phi, dsd::as_batch(ts));
  EXPECT_NEAR(r[0], -2.0, 1e-12);
  EXPECT_NEAR(r[1], -1.0, 1e-12);
  EXPECT_NEAR(dsd::skill_reward(phi, ts[0].s, ts[0].s_next, ts[0].z), -2.0, 1e-12);
}

TEST(Dual, LambdaRisesOnViolationAndFallsOnSlack) {
  const std::vector<core::Transition> ts{pair(0, 1, v({1, 0}))};
  const auto b = dsd::as_batch(ts);
  auto dual = dsd::DualState::make(30.0, 1e-3, 0.01);
  EXPECT_NEAR(dual.lambda(), 30.0, 1e-9);
  dsd::update_lambda(dual, b, linear_phi(3.0, 0.0), dsd::MetricKind::kTemporal);
  EXPECT_GT(dual.lambda(), 30.0);
  auto dual2 = dsd::DualState::make(30.0, 1e-3, 0.01);
  dsd::update_lambda(dual2, b, linear_phi(0.1, 0.0), dsd::MetricKind::kTemporal);
  EXPECT_LT(dual2.lambda(), 30.0);
}

TEST(Dual, LambdaStaysPositiveAndFiniteUnderAdversarialUpdates) {
  auto falling = dsd::DualState::make(30.0);
  auto rising = dsd::DualState::make(30.0);
  for (int i = 0; i < 100000; ++i) {
    dsd::update_lambda_from_slack(falling, 1e-3);
    dsd::update_lambda_from_slack(rising, -1e3);
  }
  EXPECT_GT(falling.lambda(), 0.0);
  EXPECT_LT(falling.lambda(), 30.0);
  EXPECT_GT(rising.lambda(), 30.0);
  EXPECT_TRUE(std::isfinite(rising.lambda()));
}

TEST(UpdatePhi, AscentImprovesObjective) {
  core::Rng rng(4);
  auto phi = dsd::PhiNet::make(false, 1, Vec::Ones(1), 2, 16, rng, 1e-3);
  std::vector<core::Transition> ts;
  for (int i = 0; i < 32; ++i) ts.push_back(pair(rng.uniform(-1, 1), rng.uniform(-1, 1), v({1, 0})));
  const auto b = dsd::as_batch(ts);
  const auto dual = dsd::DualState::make(1.0);
  const double before = dsd::phi_objective(phi, 1.0, 1e-3, b, dsd::MetricKind::kTemporal).objective;
  for (int i = 0; i < 50; ++i) dsd::update_phi(phi, dual, b, dsd::MetricKind::kTemporal);
  EXPECT_GT(dsd::phi_objective(phi, 1.0, 1e-3, b, dsd::MetricKind::kTemporal).objective, before);
}

TEST(UpdatePhi, RepeatedStepsReduceViolation) {
  // |delta phi|^2 = 9 against a temporal distance of 1: every pair violates.
  auto phi = linear_phi(3.0, 0.0);
  std::vector<core::Transition> ts;
  for (int i = 0; i < 8; ++i) ts.push_back(pair(0.1 * i, 0.1 * i + 1.0, v({0, 1})));
  const auto b = dsd::as_batch(ts);
  const auto dual = dsd::DualState::make(30.0);
  double prev = dsd::mean_min_slack(phi, 1e-3, b, dsd::MetricKind::kTemporal);
  ASSERT_LT(prev, 0.0);
  for (int i = 0; i < 100; ++i) {
    dsd::update_phi(phi, dual, b, dsd::MetricKind::kTemporal);
    const double now = dsd::mean_min_slack(phi, 1e-3, b, dsd::MetricKind::kTemporal);
    EXPECT_GT(now, prev) << "step " << i;
    prev = now;
  }
}

TEST(EvaluatePairs, AgreesWithSeparateCalls) {
  core::Rng rng(9);
  auto phi = dsd::PhiNet::make(false, 1, Vec::Ones(1), 2, 8, rng);
  std::vector<core::Transition> ts;
  for (int i = 0; i < 10; ++i) ts.push_back(pair(rng.uniform(-1, 1), rng.uniform(-1, 1), v({1, 1}), 0.5));
  const auto b = dsd::as_batch(ts);
  for (auto form : {dsd::SlackForm::kSquared, dsd::SlackForm::kNorm}) {
    const auto terms = dsd::evaluate_pairs(phi, 1e-3, b, dsd::MetricKind::kScore, form);
    EXPECT_NEAR(terms.mean_min_slack, dsd::mean_min_slack(phi, 1e-3, b, dsd::MetricKind::kScore, form), 1e-12);
    EXPECT_TRUE(terms.skill_rewards.isApprox(dsd::batch_skill_rewards(phi, b)));
  }
}

TEST(ScaledPhi, BiconditionalAndRewardScalingProperty) {
  core::Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const double f = rng.uniform(0.05, 1.0);
    nn::Matrix a(3, 20), b(3, 20), z(3, 20);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      a.data()[i] = rng.normal();
      b.data()[i] = a.data()[i] + 0.6 * rng.normal();
      z.data()[i] = rng.normal();
    }
    const auto rep = dsd::scaled_phi_check(f, a, b, z);
    EXPECT_EQ(rep.pairs, 20u);
    EXPECT_TRUE(rep.ok(1e-9));
  }
}

TEST(SlackForm, StringRoundTrip) {
  for (auto f : {dsd::SlackForm::kSquared, dsd::SlackForm::kNorm}) {
    EXPECT_EQ(dsd::slack_form_from_string(dsd::to_string(f)), f);
  }
  EXPECT_THROW(dsd::slack_form_from_string("cubic"), InvalidArgument);
}
