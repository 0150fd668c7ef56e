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


#include <benchmark/benchmark.h>

#include <vector>

#include "fog/agent/sac.hpp"
#include "fog/core/rng.hpp"
#include "fog/dsd/dsd.hpp"
#include "fog/envs/env.hpp"
#include "fog/envs/toy_envs.hpp"
#include "fog/eval/metrics.hpp"

using namespace fog;

namespace {

core::Vec normal_vec(int n, core::Rng& rng) {
  core::Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

std::vector<core::Transition> random_pairs(int n, int state_dim, int skill_dim, core::Rng& rng) {
  std::vector<core::Transition> out(static_cast<std::size_t>(n));
  for (auto& t : out) {
    t.s = core::State::vector(normal_vec(state_dim, rng));
    t.s_next = core::State::vector(t.s.vec() + 0.1 * normal_vec(state_dim, rng));
    t.action = core::Vec::Zero(2);
    t.z = core::sample_skill(skill_dim, rng);
    t.score = rng.uniform();
  }
  return out;
}

void BM_NetworkForwardBackward(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  core::Rng rng(0);
  nn::NetworkSpec spec;
  spec.obs_dim = 4;
  spec.extra_dim = 2;
  spec.hidden = {width, width};
  spec.out_dim = 2;
  spec.activation = nn::Activation::kSilu;
  nn::Network net(spec, rng);
  const nn::Matrix obs = nn::Matrix::Random(4, 256);
  const nn::Matrix extra = nn::Matrix::Random(2, 256);
  nn::Vector grad = nn::Vector::Zero(static_cast<Eigen::Index>(net.num_params()));
  for (auto _ : state) {
    nn::NetworkTape tape;
    const auto y = net.forward(obs, extra, &tape);
    net.backward(tape, nn::Matrix::Ones(y.rows(), y.cols()), &grad);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(BM_NetworkForwardBackward)->Arg(64)->Arg(256);

void BM_PhiObjectiveGradient(benchmark::State& state) {
  core::Rng rng(1);
  auto phi = dsd::PhiNet::make(false, 2, core::Vec::Ones(2), 2, 64, rng);
  const auto pairs = random_pairs(256, 2, 2, rng);
  const auto batch = dsd::as_batch(pairs);
  nn::Vector grad = nn::Vector::Zero(static_cast<Eigen::Index>(phi.net().num_params()));
  for (auto _ : state) {
    grad.setZero();
    benchmark::DoNotOptimize(dsd::phi_objective(phi, 1.0, 1e-3, batch, dsd::MetricKind::kScore, &grad));
  }
}
BENCHMARK(BM_PhiObjectiveGradient);

void BM_SacUpdate(benchmark::State& state) {
  core::Rng rng(2);
  agent::SacConfig cfg;
  cfg.obs_dim = 2;
  cfg.cond_dim = 2;
  cfg.action_dim = 2;
  cfg.hidden_width = static_cast<int>(state.range(0));
  agent::SacAgent sac(cfg, rng);
  const int n = 256;
  agent::SacBatch b;
  b.obs = nn::Matrix::Random(2, n);
  b.cond = nn::Matrix::Random(2, n);
  b.actions = nn::Matrix::Random(2, n);
  b.next_obs = nn::Matrix::Random(2, n);
  b.next_cond = b.cond;
  b.rewards = nn::Vector::Random(n);
  b.terminal = nn::Vector::Zero(n);
  for (auto _ : state) benchmark::DoNotOptimize(sac.update(b, rng));
}
BENCHMARK(BM_SacUpdate)->Arg(64)->Arg(256);

void BM_EnvStep(benchmark::State& state, const char* name) {
  auto env = envs::make_env(name);
  env->reset(0);
  const core::Vec a = core::Vec::Constant(env->spec().action_dim, 0.3);
  for (auto _ : state) {
    auto r = env->step(a);
    if (r.done) env->reset(0);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK_CAPTURE(BM_EnvStep, pointroom, "pointroom");
BENCHMARK_CAPTURE(BM_EnvStep, tipcart, "tipcart");

void BM_Render(benchmark::State& state, const char* name) {
  auto env = envs::make_env(name);
  env->reset(0);
  for (auto _ : state) benchmark::DoNotOptimize(env->render());
}
BENCHMARK_CAPTURE(BM_Render, pointroom, "pointroom");
BENCHMARK_CAPTURE(BM_Render, tipcart, "tipcart");

void BM_StateCoverage(benchmark::State& state) {
  core::Rng rng(3);
  std::vector<core::Trajectory> trajs(48);
  for (auto& t : trajs) {
    for (int i = 0; i < 200; ++i) t.states.push_back(core::State::vector(20.0 * normal_vec(2, rng)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(eval::state_coverage("pointroom", trajs));
}
BENCHMARK(BM_StateCoverage);

}  // namespace

BENCHMARK_MAIN();
