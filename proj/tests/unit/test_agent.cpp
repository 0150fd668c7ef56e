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
#include <filesystem>
#include <fstream>
#include <numbers>

#include "fog/agent/trainer.hpp"
#include "fog/core/errors.hpp"
#include "fog/envs/env.hpp"

using namespace fog;
using core::Vec;
using nn::Matrix;
using nn::Vector;

namespace {

agent::SacConfig small_sac() {
  agent::SacConfig c;
  c.obs_dim = 2;
  c.cond_dim = 2;
  c.action_dim = 2;
  c.hidden_width = 8;
  c.lr = 1e-2;
  return c;
}

agent::TrainConfig tiny(agent::Method m, std::uint64_t seed = 1) {
  auto c = agent::TrainConfig::for_method(m);
  c.epochs = 3;
  c.episodes_per_epoch = 2;
  c.gradient_steps_per_epoch = 4;
  c.batch_size = 32;
  c.hidden_width = 16;
  c.seed = seed;
  c.checkpoint_every = 0;
  if (m == agent::Method::kFog) {
    c.score.mode = score::ScoreMode::kBinary;
    c.score.intentions = {{"ground is blue", "ground is orange"}};
  }
  return c;
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("fog_test_agent_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Policy, ActionsStayInBoxProperty) {
  core::Rng rng(1);
  auto cfg = small_sac();
  agent::Policy pi(cfg, rng);
  for (int i = 0; i < 100; ++i) {
    Matrix obs = Matrix::Random(2, 1) * 20.0, cond = Matrix::Random(2, 1) * 5.0;
    const auto s = pi.sample(obs, cond, i % 2 == 0, rng, false);
    ASSERT_LE(s.actions.cwiseAbs().maxCoeff(), 1.0);
    ASSERT_TRUE(s.log_prob.allFinite());
  }
}

// The tanh Jacobian term carries the usual 1e-6 stabiliser inside the log.
TEST(Policy, LogProbIsSquashedGaussianDensity) {
  core::Rng rng(2);
  agent::Policy pi(small_sac(), rng);
  const auto s = pi.sample(Matrix::Random(2, 5), Matrix::Random(2, 5), false, rng, false);
  for (Eigen::Index j = 0; j < 5; ++j) {
    double lp = 0.0;
    for (Eigen::Index i = 0; i < 2; ++i) {
      const double u = s.mean(i, j) + std::exp(s.log_std(i, j)) * s.noise(i, j);
      lp += -0.5 * s.noise(i, j) * s.noise(i, j) - s.log_std(i, j) - 0.5 * std::log(2 * std::numbers::pi) -
            std::log(1 - std::tanh(u) * std::tanh(u) + 1e-6);
      EXPECT_NEAR(s.actions(i, j), std::tanh(u), 1e-12);
    }
    EXPECT_NEAR(s.log_prob[j], lp, 1e-8);
  }
}

TEST(Policy, BackwardMatchesFiniteDifferences) {
  core::Rng init(3);
  agent::Policy pi(small_sac(), init);
  const Matrix obs = Matrix::Random(2, 3), cond = Matrix::Random(2, 3);
  const Matrix wa = Matrix::Random(2, 3);
  const Vector wl = Vector::Random(3);
  const core::Rng noise(77);
  auto loss = [&](const agent::Policy& p) {
    core::Rng r = noise;
    const auto s = p.sample(obs, cond, false, r, false);
    return (s.actions.array() * wa.array()).sum() + s.log_prob.dot(wl);
  };
  core::Rng r = noise;
  const auto s = pi.sample(obs, cond, false, r, true);
  Vector grad = Vector::Zero(static_cast<Eigen::Index>(pi.net().num_params()));
  pi.backward(s, wa, wl, &grad);
  for (Eigen::Index k = 0; k < grad.size(); k += 3) {
    const double h = 1e-6, saved = pi.net().params()[k];
    pi.net().params()[k] = saved + h;
    const double up = loss(pi);
    pi.net().params()[k] = saved - h;
    const double down = loss(pi);
    pi.net().params()[k] = saved;
    ASSERT_NEAR(grad[k], (up - down) / (2 * h), 1e-5 * std::max(1.0, std::abs(grad[k]))) << k;
  }
}

TEST(Sac, CriticsRegressTerminalRewards) {
  core::Rng rng(4);
  agent::SacAgent sac(small_sac(), rng);
  agent::SacBatch b;
  b.obs = Matrix::Random(2, 16);
  b.cond = Matrix::Random(2, 16);
  b.actions = Matrix::Random(2, 16);
  b.next_obs = b.obs;
  b.next_cond = b.cond;
  b.rewards = b.obs.row(0).transpose();
  b.terminal = Vector::Ones(16);
  const double first = sac.update_critics(b, rng);
  double last = first;
  for (int i = 0; i < 300; ++i) last = sac.update_critics(b, rng);
  EXPECT_LT(last, 0.1 * first);
}

TEST(Sac, CriticLossFallsOnZeroRewards) {
  core::Rng rng(6);
  agent::SacAgent sac(small_sac(), rng);
  agent::SacBatch b;
  b.obs = Matrix::Random(2, 32);
  b.cond = Matrix::Random(2, 32);
  b.actions = Matrix::Random(2, 32);
  b.next_obs = Matrix::Random(2, 32);
  b.next_cond = b.cond;
  b.rewards = Vector::Zero(32);
  b.terminal = Vector::Zero(32);
  std::vector<double> loss;
  for (int i = 0; i < 100; ++i) loss.push_back(sac.update_critics(b, rng));
  double head = 0.0, tail = 0.0;
  for (int i = 0; i < 10; ++i) {
    head += loss[static_cast<std::size_t>(i)];
    tail += loss[loss.size() - 1 - static_cast<std::size_t>(i)];
  }
  EXPECT_LT(tail, head);
}

TEST(Sac, TemperatureStartsAtConfiguredValue) {
  core::Rng rng(5);
  auto cfg = small_sac();
  cfg.init_alpha = 0.5;
  agent::SacAgent sac(cfg, rng);
  EXPECT_NEAR(sac.alpha(), 0.5, 1e-12);
  EXPECT_EQ(sac.target_entropy(), -2.0);
}

TEST(Sac, TemperatureDrivesEntropyToTargetOnTipCart) {
  // configs/tipcart_metra.json for 100 epochs x 50 gradient steps = 5k updates.
  auto c = agent::TrainConfig::for_method(agent::Method::kMetra);
  c.env = "tipcart";
  c.epochs = 100;
  c.hidden_width = 64;
  c.phi_lr = c.dual_lr = 3e-4;
  c.init_lambda = 1.0;
  c.init_alpha = 0.1;
  c.checkpoint_every = 0;
  agent::Trainer t(c);
  double tail = 0.0;
  for (int e = 0; e < c.epochs; ++e) {
    const auto rep = t.run_epoch();
    if (e >= c.epochs - 10) tail += rep.entropy / 10.0;
  }
  EXPECT_NEAR(tail, -2.0, 0.5);
}

TEST(TrainConfig, JsonRoundTripKeepsHash) {
  auto c = tiny(agent::Method::kFog);
  c.slack_form = dsd::SlackForm::kNorm;
  c.score.skip_n = 3;
  const auto back = agent::TrainConfig::from_json(c.to_json());
  EXPECT_EQ(back.hash(), c.hash());
  EXPECT_EQ(back.slack_form, dsd::SlackForm::kNorm);
  EXPECT_EQ(back.metric, dsd::MetricKind::kScore);
}

TEST(TrainConfig, ValidationRules) {
  EXPECT_NO_THROW(tiny(agent::Method::kFog).validate());
  auto c = tiny(agent::Method::kMetraPlus);
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = tiny(agent::Method::kLsd);
  c.obs_mode = agent::ObsMode::kPixels;
  EXPECT_THROW(c.validate(), UnsupportedMetricError);
  c = tiny(agent::Method::kMetra);
  c.metric = dsd::MetricKind::kScore;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = tiny(agent::Method::kMetra);
  c.env = "halfcheetah";
  EXPECT_THROW(c.validate(), InvalidArgument);
  EXPECT_THROW(agent::TrainConfig::from_json(nlohmann::json{{"skill_dim", "two"}}), InvalidArgument);
  EXPECT_THROW(agent::method_from_string("diayn"), InvalidArgument);
}

TEST(EpochReport, LogLineRoundTrip) {
  agent::EpochReport r;
  r.epoch = 12;
  r.mean_skill_reward = 0.125;
  r.lambda = 31.5;
  r.constraint_sat = 0.75;
  r.embedder_calls = 1600;
  r.mean_score = 0.1 + 0.2;
  r.wall_time_s = 1.5;
  const auto line = r.to_log_line();
  EXPECT_EQ(line.find("wall"), std::string::npos);
  EXPECT_NE(line.find("epoch=12 skill_reward=0.125"), std::string::npos);
  const auto back = agent::EpochReport::parse_log_line(r.to_log_line(true));
  EXPECT_EQ(back.epoch, 12);
  EXPECT_EQ(back.lambda, 31.5);
  EXPECT_EQ(back.embedder_calls, 1600u);
  EXPECT_EQ(back.mean_score, r.mean_score);
  EXPECT_EQ(back.wall_time_s, 1.5);
}

TEST(CollectEpisode, StoresScoreOfNextState) {
  auto env = envs::make_env("pointroom");
  core::Rng rng(6);
  agent::SacConfig sc = small_sac();
  agent::Policy pi(sc, rng);
  score::ScoreConfig cfg;
  cfg.mode = score::ScoreMode::kPredicate;
  cfg.predicate = "s[0] > 0";
  cfg.alpha = 0.25;
  auto f = score::make_scorer(cfg, nullptr, 2, core::Rng(0));
  Vec z(2);
  z << 1, 0;
  const auto ep = agent::collect_episode(*env, pi, core::Skill(z), *f, rng);
  ASSERT_EQ(ep.traj.length(), 200u);
  ASSERT_EQ(ep.traj.states.size(), 201u);
  ASSERT_EQ(ep.transitions.size(), 200u);
  for (std::size_t t = 0; t < 200; ++t) {
    const double expected = ep.traj.states[t + 1].vec()[0] > 0 ? 0.25 : 1.0;
    ASSERT_EQ(ep.traj.scores[t], expected);
    ASSERT_EQ(ep.transitions[t].score, expected);
    ASSERT_EQ(ep.transitions[t].s_next, ep.traj.states[t + 1]);
  }
}

TEST(TransitionRewards, MethodContracts) {
  std::vector<core::Transition> ts(3);
  ts[0].score = 0.0;
  ts[1].score = 0.5;
  ts[2].score = 1.0;
  const auto b = dsd::as_batch(ts);
  Vector r(3);
  r << 2.0, -2.0, 3.0;
  EXPECT_EQ(agent::transition_rewards(agent::Method::kFrSac, b, r), Vector::LinSpaced(3, 0.0, 1.0));
  Vector weighted(3);
  weighted << 0.0, -1.0, 3.0;
  EXPECT_EQ(agent::transition_rewards(agent::Method::kFog, b, r), weighted);
  EXPECT_EQ(agent::transition_rewards(agent::Method::kMetraPlus, b, r), weighted);
  EXPECT_EQ(agent::transition_rewards(agent::Method::kMetra, b, r), r);
  EXPECT_EQ(agent::transition_rewards(agent::Method::kLsd, b, r), r);
  EXPECT_THROW(agent::transition_rewards(agent::Method::kFog, b, Vector::Zero(2)), InvalidArgument);
}

TEST(Trainer, SkillChangesTheActionDistribution) {
  auto c = tiny(agent::Method::kMetra);
  c.epochs = 5;
  agent::Trainer t(c);
  for (int e = 0; e < c.epochs; ++e) t.run_epoch();
  const Matrix obs = Matrix::Zero(2, 1);
  core::Rng rng(11);
  Vec mean_a = Vec::Zero(2), mean_b = Vec::Zero(2);
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    mean_a += t.sac().policy().act(obs, Vec::Unit(2, 0), false, rng) / n;
    mean_b += t.sac().policy().act(obs, -Vec::Unit(2, 0), false, rng) / n;
  }
  // Standard error of each mean is below 0.025; require a gap well beyond it.
  EXPECT_GT((mean_a - mean_b).norm(), 0.1);
}

TEST(Trainer, SameSeedSameRun) {
  agent::Trainer a(tiny(agent::Method::kFog)), b(tiny(agent::Method::kFog));
  for (int i = 0; i < 2; ++i) EXPECT_EQ(a.run_epoch().to_log_line(), b.run_epoch().to_log_line());
  EXPECT_EQ(a.checkpoint_bytes(), b.checkpoint_bytes());
  agent::Trainer c(tiny(agent::Method::kFog, 2));
  c.run_epoch();
  c.run_epoch();
  EXPECT_NE(a.checkpoint_bytes(), c.checkpoint_bytes());
}

TEST(Trainer, CheckpointResumeMatchesUninterruptedRun) {
  agent::Trainer full(tiny(agent::Method::kFog));
  full.run_epoch();
  const auto bytes = full.checkpoint_bytes();
  const auto expected = full.run_epoch().to_log_line();
  auto resumed = agent::Trainer::from_checkpoint_bytes(bytes);
  EXPECT_EQ(resumed->epoch(), 1);
  EXPECT_EQ(resumed->run_epoch().to_log_line(), expected);
  EXPECT_EQ(resumed->checkpoint_bytes(), full.checkpoint_bytes());
}

TEST(Trainer, CorruptCheckpointsAreRejected) {
  agent::Trainer t(tiny(agent::Method::kMetra));
  auto bytes = t.checkpoint_bytes();
  auto flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x5a;
  EXPECT_THROW(agent::Trainer::from_checkpoint_bytes(flipped), IoError);
  auto truncated = bytes;
  truncated.resize(bytes.size() / 3);
  EXPECT_THROW(agent::Trainer::from_checkpoint_bytes(truncated), IoError);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(agent::Trainer::from_checkpoint_bytes(magic), IoError);
  EXPECT_THROW(agent::Trainer::load_checkpoint("/nonexistent/ckpt.bin"), IoError);
}

TEST(Trainer, FrSacNeverTouchesPhi) {
  auto c = tiny(agent::Method::kFrSac);
  c.score.mode = score::ScoreMode::kPredicate;
  c.score.predicate = "s[0] > 0";
  agent::Trainer t(c);
  const auto before = t.phi().net().params();
  t.run_epoch();
  EXPECT_EQ(t.phi_updates(), 0u);
  EXPECT_EQ(t.phi().net().params(), before);
}

TEST(Trainer, DualStepsOncePerGradientStep) {
  agent::Trainer t(tiny(agent::Method::kMetra));
  t.run_epoch();
  EXPECT_EQ(t.phi_updates(), 4u);
  EXPECT_EQ(t.lambda_updates(), 4u);
}

TEST(Trainer, EmbedderCallsCountFrames) {
  agent::Trainer t(tiny(agent::Method::kFog));
  const auto rep = t.run_epoch();
  // Two episodes of 200 frames; the constant first-state frame is cached away or absent.
  EXPECT_GT(rep.embedder_calls, 0u);
  EXPECT_LE(rep.embedder_calls, 400u);
}

TEST(Train, WritesLogsAndCheckpoint) {
  const auto dir = scratch("train");
  auto c = tiny(agent::Method::kMetra);
  c.checkpoint_every = 2;
  const auto res = agent::train(c, dir);
  ASSERT_EQ(res.reports.size(), 3u);
  EXPECT_TRUE(std::filesystem::exists(dir / "config.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "checkpoint_latest.bin"));
  std::ifstream log(dir / "progress.log");
  std::string line;
  int lines = 0;
  while (std::getline(log, line)) {
    EXPECT_EQ(agent::EpochReport::parse_log_line(line).epoch, ++lines);
  }
  EXPECT_EQ(lines, 3);
  EXPECT_EQ(agent::Trainer::load_checkpoint(dir / "checkpoint_latest.bin")->epoch(), 3);
  std::filesystem::remove_all(dir);
}

TEST(Train, PixelRunsUseTheConvEncoder) {
  auto c = tiny(agent::Method::kMetra);
  c.obs_mode = agent::ObsMode::kPixels;
  c.epochs = 1;
  c.hidden_width = 8;
  c.batch_size = 8;
  c.gradient_steps_per_epoch = 1;
  agent::Trainer t(c);
  EXPECT_NO_THROW(t.run_epoch());
  EXPECT_EQ(t.phi().net().spec().encoder, nn::EncoderKind::kConv);
}
