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
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fog/agent/config.hpp"
#include "fog/agent/sac.hpp"
#include "fog/core/replay_buffer.hpp"
#include "fog/dsd/dsd.hpp"
#include "fog/embed/embedder.hpp"
#include "fog/envs/env.hpp"
#include "fog/score/score.hpp"

namespace fog::agent {

/// Observation handed to the networks: the vector state or the rendered frame.
core::State observe(const envs::Env& env, ObsMode mode);

struct Episode {
  core::Trajectory traj;                 // vector states, scores of states[t + 1]
  std::vector<core::Transition> transitions;
};

/// Rolls out one full episode from reset under skill `z`. Each transition
/// stores f(s_{t+1}); the scorer is reset first so hold schedules restart.
Episode collect_episode(envs::Env& env, const Policy& policy, const core::Skill& z, score::ScoreFn& score_fn,
                        core::Rng& rng, ObsMode obs_mode = ObsMode::kState, bool deterministic = false);

/// SAC reward per transition: f(s') * r_skill for fog and metra_plus, the
/// stored score alone for fr_sac, r_skill otherwise.
Vector transition_rewards(Method method, const dsd::Batch& batch, const Vector& skill_rewards);

struct EpochReport {
  int epoch = 0;
  double mean_skill_reward = 0.0;     // (phi(s') - phi(s))^T z over training minibatches
  double mean_weighted_reward = 0.0;  // reward actually fed to the actor-critic
  double lambda = 0.0;
  double constraint_sat = 0.0;        // fraction of minibatch pairs with slack >= 0
  std::uint64_t embedder_calls = 0;   // images sent to the embedder this epoch
  double wall_time_s = 0.0;
  double alpha = 0.0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double entropy = 0.0;
  double mean_score = 0.0;            // mean stored f(s') of this epoch's episodes

  /// key=value pairs separated by spaces. Wall time is left out unless asked
  /// for, so logs of equal runs compare byte for byte.
  std::string to_log_line(bool with_wall_time = false) const;
  static EpochReport parse_log_line(const std::string& line);
};

/// Skill-discovery training loop. Single-threaded and fully determined by the
/// config (including its seed).
class Trainer {
 public:
  static constexpr std::uint32_t kCheckpointVersion = 1;

  /// The embedder is built from config.embedder when null and the score needs one.
  explicit Trainer(TrainConfig cfg, std::shared_ptr<embed::Embedder> embedder = nullptr);

  /// Collection, then gradient steps. Returns the epoch's report.
  EpochReport run_epoch();

  int epoch() const noexcept { return epoch_; }
  const TrainConfig& config() const noexcept { return cfg_; }
  const dsd::PhiNet& phi() const noexcept { return phi_; }
  const dsd::DualState& dual() const noexcept { return dual_; }
  const SacAgent& sac() const noexcept { return sac_; }
  const core::ReplayBuffer& buffer() const noexcept { return buffer_; }
  const envs::EnvSpec& env_spec() const { return env_->spec(); }
  std::uint64_t phi_updates() const noexcept { return phi_updates_; }
  std::uint64_t lambda_updates() const noexcept { return lambda_updates_; }
  embed::Embedder* embedder() const noexcept { return embedder_.get(); }

  std::vector<std::uint8_t> checkpoint_bytes() const;
  void save_checkpoint(const std::filesystem::path& path) const;
  /// Throws IoError on a bad magic, version, checksum or truncated file.
  static std::unique_ptr<Trainer> load_checkpoint(const std::filesystem::path& path,
                                                  std::shared_ptr<embed::Embedder> embedder = nullptr);
  static std::unique_ptr<Trainer> from_checkpoint_bytes(const std::vector<std::uint8_t>& bytes,
                                                        std::shared_ptr<embed::Embedder> embedder = nullptr);

 private:
  SacBatch make_sac_batch(const dsd::Batch& batch, const Vector& rewards) const;
  bool uses_phi() const noexcept { return cfg_.method != Method::kFrSac; }

  TrainConfig cfg_;
  std::shared_ptr<embed::Embedder> embedder_;
  std::unique_ptr<envs::Env> env_;
  score::ScoreFnPtr scorer_;
  dsd::PhiNet phi_;
  dsd::DualState dual_;
  SacAgent sac_;
  core::ReplayBuffer buffer_;
  core::Rng collect_rng_, sample_rng_, update_rng_;
  int epoch_ = 0;
  std::uint64_t phi_updates_ = 0;
  std::uint64_t lambda_updates_ = 0;
};

struct TrainResult {
  std::vector<EpochReport> reports;
  std::filesystem::path checkpoint;  // last written checkpoint
};

/// Runs all epochs of `cfg`, appending to out_dir/progress.log and writing
/// out_dir/checkpoint_latest.bin every checkpoint_every epochs and at the end.
/// On divergence the previous checkpoint is kept and the error rethrown.
TrainResult train(const TrainConfig& cfg, const std::filesystem::path& out_dir,
                  std::shared_ptr<embed::Embedder> embedder = nullptr,
                  const std::function<void(const EpochReport&)>& on_epoch = {});

/// Continues a checkpointed run up to its configured epoch count.
TrainResult resume(std::unique_ptr<Trainer> trainer, const std::filesystem::path& out_dir,
                   const std::function<void(const EpochReport&)>& on_epoch = {});

}  // namespace fog::agent
