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
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fog/agent/config.hpp"
#include "fog/agent/sac.hpp"
#include "fog/core/types.hpp"
#include "fog/envs/toy_envs.hpp"
#include "fog/envs/trajectory_io.hpp"
#include "fog/score/score.hpp"

namespace fog::eval {

inline constexpr double kDefaultBinSize = 1.0;
inline constexpr int kDefaultEvalSkills = 48;

/// Set of occupied square cells. Cell (i, j) covers points whose coordinates
/// round to (i * bin, j * bin); TipCart positions lie on the row j = 0.
class CoverageGrid {
 public:
  explicit CoverageGrid(double bin_size = kDefaultBinSize);

  void add(const Eigen::Vector2d& p);
  void add(const std::string& env_name, const core::Trajectory& traj);

  std::size_t size() const noexcept { return occupied_.size(); }
  double bin_size() const noexcept { return bin_; }
  const std::set<std::pair<std::int64_t, std::int64_t>>& occupied() const noexcept { return occupied_; }
  Eigen::Vector2d center(const std::pair<std::int64_t, std::int64_t>& cell) const;

 private:
  double bin_;
  std::set<std::pair<std::int64_t, std::int64_t>> occupied_;
};

/// Number of distinct occupied cells over all states. Empty input gives 0.
std::size_t state_coverage(const std::string& env_name, const std::vector<core::Trajectory>& trajs,
                           double bin_size = kDefaultBinSize);

struct HazardSplit {
  std::size_t safe = 0;
  std::size_t hazard = 0;
  std::int64_t signed_coverage() const { return static_cast<std::int64_t>(safe) - static_cast<std::int64_t>(hazard); }
  double hazard_fraction() const { return safe + hazard ? static_cast<double>(hazard) / static_cast<double>(safe + hazard) : 0.0; }
};

/// Cells split by whether their centre lies in `hazard`.
HazardSplit hazard_split(const std::string& env_name, const std::vector<core::Trajectory>& trajs,
                         const envs::Region& hazard, double bin_size = kDefaultBinSize);
/// Safe cells minus hazardous cells.
std::int64_t safe_state_coverage(const std::string& env_name, const std::vector<core::Trajectory>& trajs,
                                 const envs::Region& hazard, double bin_size = kDefaultBinSize);

/// 100 * (episodes with at least one flipped TipCart state) / episodes.
/// Uses the ground-truth angle test only. Empty input gives 0.
double flip_percentage(const std::vector<core::Trajectory>& trajs);

struct Aggregate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};
/// Mean and standard error (sample standard deviation / sqrt(n)).
Aggregate aggregate(const std::vector<double>& values);

struct EvalReport {
  std::string env;
  std::string method;
  std::uint64_t seed = 0;
  std::size_t coverage = 0;
  std::int64_t safe_coverage = 0;
  double hazard_fraction = 0.0;
  double flip_pct = 0.0;
  std::vector<Eigen::Vector2d> endpoints;  // final position per skill
  std::vector<core::Trajectory> trajectories;
};

/// Skills for evaluation: n directions uniform on the unit sphere.
std::vector<core::Skill> eval_skills(int skill_dim, int n, std::uint64_t seed);

/// One deterministic episode per skill, then all metrics.
EvalReport evaluate(const agent::Policy& policy, const std::string& env_name, agent::ObsMode obs_mode,
                    const std::vector<core::Skill>& skills, const envs::Region& hazard = {},
                    double bin_size = kDefaultBinSize);

/// Metrics of an existing trajectory set.
EvalReport report_for(const std::string& env_name, std::vector<core::Trajectory> trajs, const envs::Region& hazard = {},
                      double bin_size = kDefaultBinSize);

struct AuditResult {
  std::vector<std::vector<double>> scores;  // [episode][step], f(s_{t+1})
  std::vector<int> episode_ids;
  std::vector<std::string> labels;
  double mean_aligned = 0.0;      // NaN when no episode carries that label
  double mean_misaligned = 0.0;
  double mean_all = 0.0;
};

/// Re-scores a dump offline. Frames are read relative to `dump_dir` when the
/// scorer needs them; records without frames then raise InvalidArgument.
AuditResult audit_scores(const std::vector<envs::DumpRecord>& records, score::ScoreFn& score_fn,
                         const std::filesystem::path& dump_dir);

/// {env}_{method}_{seed}_{timestamp}, timestamp as YYYYMMDDTHHMMSS (UTC).
std::string run_dir_name(const std::string& env, const std::string& method, std::uint64_t seed,
                         const std::string& timestamp = {});
std::string utc_timestamp();

}  // namespace fog::eval
