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

#include "fog/eval/metrics.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <numeric>

#include "fog/agent/trainer.hpp"
#include "fog/core/errors.hpp"
#include "fog/core/image_io.hpp"

namespace fog::eval {

CoverageGrid::CoverageGrid(double bin_size) : bin_(bin_size) {
  if (!(bin_size > 0.0)) throw InvalidArgument("bin size must be positive");
}

void CoverageGrid::add(const Eigen::Vector2d& p) {
  occupied_.emplace(static_cast<std::int64_t>(std::llround(p.x() / bin_)),
                    static_cast<std::int64_t>(std::llround(p.y() / bin_)));
}

void CoverageGrid::add(const std::string& env_name, const core::Trajectory& traj) {
  for (const auto& s : traj.states) add(envs::position_of(env_name, s.vec()));
}

Eigen::Vector2d CoverageGrid::center(const std::pair<std::int64_t, std::int64_t>& cell) const {
  return {static_cast<double>(cell.first) * bin_, static_cast<double>(cell.second) * bin_};
}

std::size_t state_coverage(const std::string& env_name, const std::vector<core::Trajectory>& trajs, double bin_size) {
  CoverageGrid g(bin_size);
  for (const auto& t : trajs) g.add(env_name, t);
  return g.size();
}

HazardSplit hazard_split(const std::string& env_name, const std::vector<core::Trajectory>& trajs,
                         const envs::Region& hazard, double bin_size) {
  CoverageGrid g(bin_size);
  for (const auto& t : trajs) g.add(env_name, t);
  HazardSplit h;
  for (const auto& cell : g.occupied()) {
    if (hazard.contains(g.center(cell))) ++h.hazard;
    else ++h.safe;
  }
  return h;
}

std::int64_t safe_state_coverage(const std::string& env_name, const std::vector<core::Trajectory>& trajs,
                                 const envs::Region& hazard, double bin_size) {
  return hazard_split(env_name, trajs, hazard, bin_size).signed_coverage();
}

double flip_percentage(const std::vector<core::Trajectory>& trajs) {
  if (trajs.empty()) return 0.0;
  std::size_t flipped = 0;
  for (const auto& t : trajs) {
    for (const auto& s : t.states) {
      if (envs::is_flipped(s.vec())) {
        ++flipped;
        break;
      }
    }
  }
  return 100.0 * static_cast<double>(flipped) / static_cast<double>(trajs.size());
}

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  a.n = values.size();
  if (values.empty()) return a;
  a.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(a.n);
  if (a.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.stderr_ = std::sqrt(ss / static_cast<double>(a.n - 1)) / std::sqrt(static_cast<double>(a.n));
  }
  return a;
}

std::vector<core::Skill> eval_skills(int skill_dim, int n, std::uint64_t seed) {
  core::Rng rng = core::Rng(seed).fork(0xe7a1);
  std::vector<core::Skill> skills;
  skills.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) skills.push_back(core::sample_skill(skill_dim, rng));
  return skills;
}

EvalReport report_for(const std::string& env_name, std::vector<core::Trajectory> trajs, const envs::Region& hazard,
                      double bin_size) {
  EvalReport r;
  r.env = env_name;
  r.coverage = state_coverage(env_name, trajs, bin_size);
  const HazardSplit h = hazard_split(env_name, trajs, hazard, bin_size);
  r.safe_coverage = h.signed_coverage();
  r.hazard_fraction = h.hazard_fraction();
  if (env_name == "tipcart") r.flip_pct = flip_percentage(trajs);
  for (const auto& t : trajs) r.endpoints.push_back(envs::position_of(env_name, t.states.back().vec()));
  r.trajectories = std::move(trajs);
  return r;
}

EvalReport evaluate(const agent::Policy& policy, const std::string& env_name, agent::ObsMode obs_mode,
                    const std::vector<core::Skill>& skills, const envs::Region& hazard, double bin_size) {
  auto env = envs::make_env(env_name);
  score::ConstantScore unit;
  core::Rng unused(0);
  std::vector<core::Trajectory> trajs;
  trajs.reserve(skills.size());
  for (const auto& z : skills) {
    trajs.push_back(agent::collect_episode(*env, policy, z, unit, unused, obs_mode, true).traj);
  }
  return report_for(env_name, std::move(trajs), hazard, bin_size);
}

AuditResult audit_scores(const std::vector<envs::DumpRecord>& records, score::ScoreFn& score_fn,
                         const std::filesystem::path& dump_dir) {
  AuditResult out;
  double sum_al = 0, sum_mis = 0, sum_all = 0;
  std::size_t n_al = 0, n_mis = 0, n_all = 0;
  for (const auto& ep : envs::group_episodes(records)) {
    score_fn.reset();
    std::vector<double> series;
    series.reserve(ep.size());
    for (const auto& r : ep) {
      const core::Vec& s = r.next_state.size() ? r.next_state : r.state;
      double f;
      if (score_fn.needs_frames()) {
        if (r.frame.empty()) {
          throw InvalidArgument("score function needs frames but dump record (episode " + std::to_string(r.episode) +
                                ", t " + std::to_string(r.t) + ") has none; dump with frames enabled");
        }
        const core::Image img = core::read_frame_png(dump_dir / r.frame);
        f = score_fn(score::ScoreQuery(s, img));
      } else {
        f = score_fn(score::ScoreQuery(s));
      }
      series.push_back(f);
      sum_all += f;
      ++n_all;
      if (r.label == "aligned") {
        sum_al += f;
        ++n_al;
      } else if (r.label == "misaligned") {
        sum_mis += f;
        ++n_mis;
      }
    }
    out.episode_ids.push_back(ep.front().episode);
    out.labels.push_back(ep.front().label);
    out.scores.push_back(std::move(series));
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.mean_aligned = n_al ? sum_al / static_cast<double>(n_al) : nan;
  out.mean_misaligned = n_mis ? sum_mis / static_cast<double>(n_mis) : nan;
  out.mean_all = n_all ? sum_all / static_cast<double>(n_all) : nan;
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%S", &tm);
  return buf;
}

std::string run_dir_name(const std::string& env, const std::string& method, std::uint64_t seed,
                         const std::string& timestamp) {
  return env + "_" + method + "_" + std::to_string(seed) + "_" + (timestamp.empty() ? utc_timestamp() : timestamp);
}

}  // namespace fog::eval
