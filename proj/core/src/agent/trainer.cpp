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

#include "fog/agent/trainer.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fog/core/errors.hpp"

namespace fog::agent {

namespace {

constexpr char kMagic[8] = {'F', 'O', 'G', 'C', 'K', 'P', 'T', '\0'};

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

SacConfig sac_config(const TrainConfig& cfg, const envs::Env& env) {
  SacConfig s;
  s.image_obs = cfg.obs_mode == ObsMode::kPixels;
  s.obs_dim = env.spec().state_dim;
  s.obs_scale = env.observation_scale();
  s.cond_dim = cfg.skill_dim;
  s.action_dim = env.spec().action_dim;
  s.hidden_width = cfg.hidden_width;
  s.lr = cfg.sac_lr;
  s.alpha_lr = cfg.alpha_lr;
  s.discount = cfg.discount;
  s.init_alpha = cfg.init_alpha;
  return s;
}

bool needs_embedder(const score::ScoreConfig& sc) {
  return sc.mode == score::ScoreMode::kBinary || sc.mode == score::ScoreMode::kSoftmax ||
         sc.mode == score::ScoreMode::kMulti;
}

}  // namespace

core::State observe(const envs::Env& env, ObsMode mode) {
  return mode == ObsMode::kPixels ? core::State::image(env.render()) : env.state();
}

Episode collect_episode(envs::Env& env, const Policy& policy, const core::Skill& z, score::ScoreFn& score_fn,
                        core::Rng& rng, ObsMode obs_mode, bool deterministic) {
  Episode ep;
  env.reset();
  score_fn.reset();
  ep.traj.z = z;
  ep.traj.states.push_back(env.state());
  core::State obs = observe(env, obs_mode);
  const auto len = static_cast<std::size_t>(env.spec().episode_len);
  ep.traj.actions.reserve(len);
  ep.transitions.reserve(len);
  while (!env.finished()) {
    const Vec a = policy.act(nn::Network::states_to_matrix({&obs}), z.z(), deterministic, rng);
    envs::StepResult res = env.step(a);
    core::State next_obs = observe(env, obs_mode);
    const Vec& sv = res.state.vec();
    const double f = obs_mode == ObsMode::kPixels
                         ? score_fn(score::ScoreQuery(sv, next_obs.img()))
                         : score_fn(score::ScoreQuery(sv, [&env] { return env.render(); }));
    ep.transitions.push_back(core::Transition{obs, a, next_obs, z, f, res.done});
    ep.traj.actions.push_back(a);
    ep.traj.scores.push_back(f);
    ep.traj.states.push_back(std::move(res.state));
    obs = std::move(next_obs);
  }
  return ep;
}

// ---------------------------------------------------------------------------
// EpochReport

std::string EpochReport::to_log_line(bool with_wall_time) const {
  std::ostringstream os;
  os << "epoch=" << epoch << " skill_reward=" << fmt_double(mean_skill_reward)
     << " weighted_reward=" << fmt_double(mean_weighted_reward) << " lambda=" << fmt_double(lambda)
     << " constraint_sat=" << fmt_double(constraint_sat) << " embedder_calls=" << embedder_calls
     << " alpha=" << fmt_double(alpha) << " critic_loss=" << fmt_double(critic_loss)
     << " actor_loss=" << fmt_double(actor_loss) << " entropy=" << fmt_double(entropy)
     << " mean_score=" << fmt_double(mean_score);
  if (with_wall_time) os << " wall_s=" << fmt_double(wall_time_s);
  return os.str();
}

EpochReport EpochReport::parse_log_line(const std::string& line) {
  EpochReport r;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw InvalidArgument("malformed log token '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "epoch") r.epoch = std::stoi(val);
    else if (key == "skill_reward") r.mean_skill_reward = std::stod(val);
    else if (key == "weighted_reward") r.mean_weighted_reward = std::stod(val);
    else if (key == "lambda") r.lambda = std::stod(val);
    else if (key == "constraint_sat") r.constraint_sat = std::stod(val);
    else if (key == "embedder_calls") r.embedder_calls = std::stoull(val);
    else if (key == "alpha") r.alpha = std::stod(val);
    else if (key == "critic_loss") r.critic_loss = std::stod(val);
    else if (key == "actor_loss") r.actor_loss = std::stod(val);
    else if (key == "entropy") r.entropy = std::stod(val);
    else if (key == "mean_score") r.mean_score = std::stod(val);
    else if (key == "wall_s") r.wall_time_s = std::stod(val);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Trainer

Trainer::Trainer(TrainConfig cfg, std::shared_ptr<embed::Embedder> embedder)
    : cfg_(std::move(cfg)), embedder_(std::move(embedder)), buffer_(cfg_.buffer_capacity) {
  cfg_.validate();
  env_ = envs::make_env(cfg_.env);
  const core::Rng master(cfg_.seed);
  core::Rng init_rng = master.fork(1);
  collect_rng_ = master.fork(2);
  sample_rng_ = master.fork(3);
  update_rng_ = master.fork(4);

  const bool scored = cfg_.method == Method::kFog || cfg_.method == Method::kMetraPlus ||
                      cfg_.method == Method::kFrSac;
  if (scored) {
    if (!embedder_ && needs_embedder(cfg_.score)) embedder_ = embed::make_embedder(cfg_.embedder);
    scorer_ = score::make_scorer(cfg_.score, embedder_, env_->spec().state_dim, master.fork(5));
  } else {
    scorer_ = std::make_unique<score::ConstantScore>(1.0);
  }

  const bool image = cfg_.obs_mode == ObsMode::kPixels;
  phi_ = dsd::PhiNet::make(image, env_->spec().state_dim, env_->observation_scale(), cfg_.skill_dim,
                           cfg_.hidden_width, init_rng, cfg_.phi_lr);
  dual_ = dsd::DualState::make(cfg_.init_lambda, cfg_.epsilon, cfg_.dual_lr);
  sac_ = SacAgent(sac_config(cfg_, *env_), init_rng);
}

Vector transition_rewards(Method method, const dsd::Batch& batch, const Vector& skill_rewards) {
  if (skill_rewards.size() != static_cast<Eigen::Index>(batch.size())) {
    throw InvalidArgument("one skill reward per transition expected");
  }
  Vector out(skill_rewards.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double score = batch[static_cast<std::size_t>(i)]->score;
    switch (method) {
      case Method::kFog:
      case Method::kMetraPlus: out[i] = dsd::weighted_reward(score, skill_rewards[i]); break;
      case Method::kFrSac: out[i] = score; break;
      case Method::kMetra:
      case Method::kLsd: out[i] = skill_rewards[i]; break;
    }
  }
  return out;
}

SacBatch Trainer::make_sac_batch(const dsd::Batch& batch, const Vector& rewards) const {
  const auto b = static_cast<Eigen::Index>(batch.size());
  std::vector<const core::State*> s, sn;
  s.reserve(batch.size());
  sn.reserve(batch.size());
  SacBatch sb;
  sb.cond.resize(cfg_.skill_dim, b);
  sb.actions.resize(env_->spec().action_dim, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const core::Transition& t = *batch[static_cast<std::size_t>(i)];
    s.push_back(&t.s);
    sn.push_back(&t.s_next);
    sb.cond.col(i) = t.z.z();
    sb.actions.col(i) = t.action;
  }
  sb.obs = nn::Network::states_to_matrix(s);
  sb.next_obs = nn::Network::states_to_matrix(sn);
  sb.next_cond = sb.cond;
  sb.rewards = rewards;
  sb.terminal = Vector::Zero(b);  // fixed-length episodes: always bootstrap
  return sb;
}

EpochReport Trainer::run_epoch() {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t calls_before = embedder_ ? embedder_->image_count() : 0;
  EpochReport rep;

  double score_sum = 0.0;
  std::size_t score_n = 0;
  for (int e = 0; e < cfg_.episodes_per_epoch; ++e) {
    const core::Skill z = core::sample_skill(cfg_.skill_dim, collect_rng_);
    Episode ep = collect_episode(*env_, sac_.policy(), z, *scorer_, collect_rng_, cfg_.obs_mode);
    for (auto& t : ep.transitions) {
      score_sum += t.score;
      ++score_n;
      buffer_.push(std::move(t));
    }
  }

  const dsd::MetricKind kind = cfg_.metric;
  for (int g = 0; g < cfg_.gradient_steps_per_epoch; ++g) {
    const auto idx = buffer_.sample_indices(static_cast<std::size_t>(cfg_.batch_size), sample_rng_);
    dsd::Batch batch;
    batch.reserve(idx.size());
    for (auto i : idx) batch.push_back(&buffer_.at(i));
    const auto b = static_cast<Eigen::Index>(batch.size());

    Vector skill_rewards = Vector::Zero(b);
    if (uses_phi()) {
      dsd::update_phi(phi_, dual_, batch, kind, cfg_.slack_form);
      ++phi_updates_;
      const dsd::PairTerms pt = dsd::evaluate_pairs(phi_, dual_.epsilon, batch, kind, cfg_.slack_form);
      dsd::update_lambda_from_slack(dual_, pt.mean_min_slack);
      ++lambda_updates_;
      skill_rewards = pt.skill_rewards;
      rep.mean_skill_reward += pt.skill_rewards.mean();
      rep.constraint_sat += pt.satisfied;
    }
    const Vector rewards = transition_rewards(cfg_.method, batch, skill_rewards);
    if (!rewards.allFinite()) throw TrainingDivergenceError("non-finite reward");
    rep.mean_weighted_reward += rewards.mean();

    const SacStats st = sac_.update(make_sac_batch(batch, rewards), update_rng_);
    rep.critic_loss += st.critic_loss;
    rep.actor_loss += st.actor_loss;
    rep.entropy += st.entropy;
  }

  ++epoch_;
  const double steps = std::max(1, cfg_.gradient_steps_per_epoch);
  rep.epoch = epoch_;
  rep.mean_skill_reward /= steps;
  rep.mean_weighted_reward /= steps;
  rep.constraint_sat /= steps;
  rep.critic_loss /= steps;
  rep.actor_loss /= steps;
  rep.entropy /= steps;
  rep.lambda = dual_.lambda();
  rep.alpha = sac_.alpha();
  rep.mean_score = score_n ? score_sum / static_cast<double>(score_n) : 0.0;
  rep.embedder_calls = (embedder_ ? embedder_->image_count() : 0) - calls_before;
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

// ---------------------------------------------------------------------------
// Checkpoints

std::vector<std::uint8_t> Trainer::checkpoint_bytes() const {
  core::ByteWriter w;
  w.put_bytes(kMagic, sizeof kMagic);
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put_string(cfg_.to_json().dump());
  w.put<std::uint64_t>(cfg_.hash());
  w.put<std::int32_t>(epoch_);
  phi_.save(w);
  dual_.save(w);
  sac_.save(w);
  w.put_string(collect_rng_.serialize());
  w.put_string(sample_rng_.serialize());
  w.put_string(update_rng_.serialize());
  core::ByteWriter sw;
  scorer_->save_state(sw);
  w.put_string(std::string(sw.bytes().begin(), sw.bytes().end()));
  buffer_.save(w);
  w.put<std::uint64_t>(phi_updates_);
  w.put<std::uint64_t>(lambda_updates_);
  const std::uint64_t checksum = core::fnv1a(w.bytes().data(), w.bytes().size());
  w.put<std::uint64_t>(checksum);
  return w.take();
}

void Trainer::save_checkpoint(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_file_atomic(path, checkpoint_bytes());
}

std::unique_ptr<Trainer> Trainer::from_checkpoint_bytes(const std::vector<std::uint8_t>& bytes,
                                                        std::shared_ptr<embed::Embedder> embedder) {
  if (bytes.size() < sizeof kMagic + sizeof(std::uint32_t) + sizeof(std::uint64_t) ||
      std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw IoError("not a checkpoint file");
  }
  const std::size_t body = bytes.size() - sizeof(std::uint64_t);
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body, sizeof stored);
  if (core::fnv1a(bytes.data(), body) != stored) throw IoError("checkpoint checksum mismatch");

  core::ByteReader r(std::string_view(reinterpret_cast<const char*>(bytes.data()), body));
  char magic[sizeof kMagic];
  r.get_bytes(magic, sizeof magic);
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  TrainConfig cfg;
  try {
    cfg = TrainConfig::from_json(nlohmann::json::parse(r.get_string()));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("checkpoint holds a malformed config: ") + e.what());
  }
  if (r.get<std::uint64_t>() != cfg.hash()) throw IoError("checkpoint config hash mismatch");

  auto t = std::make_unique<Trainer>(cfg, std::move(embedder));
  t->epoch_ = r.get<std::int32_t>();
  t->phi_.load(r);
  t->dual_.load(r);
  t->sac_.load(r);
  t->collect_rng_.deserialize(r.get_string());
  t->sample_rng_.deserialize(r.get_string());
  t->update_rng_.deserialize(r.get_string());
  const std::string scorer_state = r.get_string();
  core::ByteReader sr(scorer_state);
  t->scorer_->load_state(sr);
  t->buffer_ = core::ReplayBuffer::load(r);
  t->phi_updates_ = r.get<std::uint64_t>();
  t->lambda_updates_ = r.get<std::uint64_t>();
  if (!r.done()) throw IoError("trailing bytes in checkpoint");
  return t;
}

std::unique_ptr<Trainer> Trainer::load_checkpoint(const std::filesystem::path& path,
                                                  std::shared_ptr<embed::Embedder> embedder) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_checkpoint_bytes(bytes, std::move(embedder));
}

// ---------------------------------------------------------------------------

namespace {

TrainResult run_loop(Trainer& trainer, const std::filesystem::path& out_dir, bool append,
                     const std::function<void(const EpochReport&)>& on_epoch) {
  std::filesystem::create_directories(out_dir);
  const auto mode = append ? std::ios::app : std::ios::trunc;
  std::ofstream log(out_dir / "progress.log", std::ios::out | mode);
  std::ofstream timing(out_dir / "timing.log", std::ios::out | mode);
  if (!log || !timing) throw IoError("cannot open logs in " + out_dir.string());

  TrainResult result;
  const auto ckpt = out_dir / "checkpoint_latest.bin";
  const int every = trainer.config().checkpoint_every;
  int saved_at = -1;
  while (trainer.epoch() < trainer.config().epochs) {
    EpochReport rep;
    try {
      rep = trainer.run_epoch();
    } catch (const TrainingDivergenceError& e) {
      log << "diverged epoch=" << trainer.epoch() + 1 << " reason=\"" << e.what() << "\"\n";
      throw;
    }
    log << rep.to_log_line() << '\n' << std::flush;
    timing << "epoch=" << rep.epoch << " wall_s=" << fmt_double(rep.wall_time_s) << '\n';
    result.reports.push_back(rep);
    if (on_epoch) on_epoch(rep);
    if (every > 0 && trainer.epoch() % every == 0) {
      trainer.save_checkpoint(ckpt);
      saved_at = trainer.epoch();
    }
  }
  if (saved_at != trainer.epoch()) trainer.save_checkpoint(ckpt);
  result.checkpoint = ckpt;
  return result;
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const std::filesystem::path& out_dir,
                  std::shared_ptr<embed::Embedder> embedder, const std::function<void(const EpochReport&)>& on_epoch) {
  Trainer trainer(cfg, std::move(embedder));
  std::filesystem::create_directories(out_dir);
  cfg.save(out_dir / "config.json");
  return run_loop(trainer, out_dir, false, on_epoch);
}

TrainResult resume(std::unique_ptr<Trainer> trainer, const std::filesystem::path& out_dir,
                   const std::function<void(const EpochReport&)>& on_epoch) {
  if (!trainer) throw InvalidArgument("resume needs a trainer");
  return run_loop(*trainer, out_dir, true, on_epoch);
}

}  // namespace fog::agent
