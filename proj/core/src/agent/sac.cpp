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

#include "fog/agent/sac.hpp"

#include <cmath>
#include <numbers>

#include "fog/core/errors.hpp"

namespace fog::agent {

namespace {

constexpr double kSquashEps = 1e-6;
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

nn::NetworkSpec head_spec(const SacConfig& cfg, int extra_dim, int out_dim) {
  nn::NetworkSpec spec;
  spec.encoder = cfg.image_obs ? nn::EncoderKind::kConv : nn::EncoderKind::kVector;
  spec.obs_dim = cfg.image_obs ? 0 : cfg.obs_dim;
  if (!cfg.image_obs) spec.obs_scale = cfg.obs_scale;
  spec.extra_dim = extra_dim;
  spec.hidden = {cfg.hidden_width, cfg.hidden_width};
  spec.out_dim = out_dim;
  spec.activation = nn::Activation::kRelu;
  return spec;
}

Matrix stack(const Matrix& top, const Matrix& bottom) {
  Matrix m(top.rows() + bottom.rows(), bottom.cols());
  if (top.rows() > 0) m.topRows(top.rows()) = top;
  m.bottomRows(bottom.rows()) = bottom;
  return m;
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw TrainingDivergenceError(std::string(what) + " is not finite");
}

}  // namespace

// ---------------------------------------------------------------------------
// Policy

Policy::Policy(const SacConfig& cfg, core::Rng& rng)
    : net_(head_spec(cfg, cfg.cond_dim, 2 * cfg.action_dim), rng), action_dim_(cfg.action_dim) {
  if (cfg.action_dim < 1) throw InvalidArgument("policy needs action_dim >= 1");
}

Policy::Sample Policy::sample(const Matrix& obs, const Matrix& cond, bool deterministic, core::Rng& rng,
                              bool keep_tape) const {
  Sample s;
  const Matrix out = net_.forward(obs, cond, keep_tape ? &s.tape : nullptr);
  const Eigen::Index a = action_dim_;
  const Eigen::Index b = out.cols();
  s.mean = out.topRows(a);
  s.raw_log_std = out.bottomRows(a);
  s.log_std = (kLogStdMin + 0.5 * (kLogStdMax - kLogStdMin) * (s.raw_log_std.array().tanh() + 1.0)).matrix();
  s.noise = Matrix::Zero(a, b);
  if (!deterministic) {
    for (Eigen::Index j = 0; j < b; ++j) {
      for (Eigen::Index i = 0; i < a; ++i) s.noise(i, j) = rng.normal();
    }
  }
  const Matrix u = s.mean + (s.log_std.array().exp() * s.noise.array()).matrix();
  s.actions = u.array().tanh().matrix();
  s.log_prob = Vector::Zero(b);
  for (Eigen::Index j = 0; j < b; ++j) {
    double lp = 0.0;
    for (Eigen::Index i = 0; i < a; ++i) {
      const double act = s.actions(i, j);
      lp += -0.5 * s.noise(i, j) * s.noise(i, j) - s.log_std(i, j) - kHalfLog2Pi -
            std::log(1.0 - act * act + kSquashEps);
    }
    s.log_prob[j] = lp;
  }
  return s;
}

Vec Policy::act(const Matrix& obs_col, const Vec& cond, bool deterministic, core::Rng& rng) const {
  Matrix c = cond;
  return sample(obs_col, c, deterministic, rng, false).actions.col(0);
}

void Policy::backward(const Sample& s, const Matrix& d_actions, const Vector& d_log_prob, Vector* grad) const {
  const Eigen::Index a = action_dim_;
  const Eigen::Index b = s.actions.cols();
  Matrix dy(2 * a, b);
  const double half_range = 0.5 * (kLogStdMax - kLogStdMin);
  for (Eigen::Index j = 0; j < b; ++j) {
    for (Eigen::Index i = 0; i < a; ++i) {
      const double act = s.actions(i, j);
      const double one_minus = 1.0 - act * act;  // d tanh(u) / du
      // log pi depends on u through the squash correction and on log_std directly.
      const double du = d_actions(i, j) * one_minus + d_log_prob[j] * 2.0 * act * one_minus / (one_minus + kSquashEps);
      const double std_ = std::exp(s.log_std(i, j));
      const double dls = -d_log_prob[j] + du * std_ * s.noise(i, j);
      const double t = std::tanh(s.raw_log_std(i, j));
      dy(i, j) = du;
      dy(a + i, j) = dls * half_range * (1.0 - t * t);
    }
  }
  net_.backward(s.tape, dy, grad);
}

std::uint64_t Policy::param_hash() const {
  const auto& p = net_.params();
  return core::fnv1a(p.data(), sizeof(double) * static_cast<std::size_t>(p.size()));
}

// ---------------------------------------------------------------------------
// CriticPair

CriticPair::CriticPair(const SacConfig& cfg, core::Rng& rng) {
  for (int i = 0; i < 2; ++i) {
    q_[i] = nn::Network(head_spec(cfg, cfg.cond_dim + cfg.action_dim, 1), rng);
    target_[i] = q_[i];
  }
}

Vector CriticPair::value(int i, const Matrix& obs, const Matrix& cond, const Matrix& actions,
                         nn::NetworkTape* tape) const {
  return q_[i].forward(obs, stack(cond, actions), tape).row(0).transpose();
}

Vector CriticPair::target_value(int i, const Matrix& obs, const Matrix& cond, const Matrix& actions) const {
  return target_[i].forward(obs, stack(cond, actions)).row(0).transpose();
}

void CriticPair::update_targets(double decay) {
  for (int i = 0; i < 2; ++i) nn::soft_update(target_[i].params(), q_[i].params(), decay);
}

// ---------------------------------------------------------------------------
// SacAgent

SacAgent::SacAgent(SacConfig cfg, core::Rng& rng) : cfg_(std::move(cfg)) {
  if (!(cfg_.init_alpha > 0.0)) throw InvalidArgument("initial temperature must be positive");
  policy_ = Policy(cfg_, rng);
  critics_ = CriticPair(cfg_, rng);
  policy_opt_ = nn::Adam(policy_.net().num_params(), cfg_.lr);
  for (int i = 0; i < 2; ++i) q_opt_[i] = nn::Adam(critics_.q(i).num_params(), cfg_.lr);
  alpha_opt_ = nn::Adam(1, cfg_.alpha_lr);
  log_alpha_ = std::log(cfg_.init_alpha);
  target_entropy_ = std::isnan(cfg_.target_entropy) ? -static_cast<double>(cfg_.action_dim) : cfg_.target_entropy;
}

double SacAgent::update_critics(const SacBatch& batch, core::Rng& rng) {
  const Eigen::Index b = batch.rewards.size();
  if (b == 0) throw InvalidArgument("SAC update needs a non-empty batch");
  const double alpha = this->alpha();

  const Policy::Sample next = policy_.sample(batch.next_obs, batch.next_cond, false, rng, false);
  const Vector tq = critics_.target_value(0, batch.next_obs, batch.next_cond, next.actions)
                        .cwiseMin(critics_.target_value(1, batch.next_obs, batch.next_cond, next.actions));
  const Vector y = batch.rewards.array() +
                   cfg_.discount * (1.0 - batch.terminal.array()) * (tq.array() - alpha * next.log_prob.array());

  double loss = 0.0;
  for (int i = 0; i < 2; ++i) {
    nn::NetworkTape tape;
    const Vector q = critics_.value(i, batch.obs, batch.cond, batch.actions, &tape);
    const Vector err = q - y;
    loss += err.squaredNorm() / static_cast<double>(b);
    Vector grad = Vector::Zero(static_cast<Eigen::Index>(critics_.q(i).num_params()));
    critics_.q(i).backward(tape, (2.0 / static_cast<double>(b)) * err.transpose(), &grad);
    q_opt_[i].step(critics_.q(i).params(), grad);
  }
  check_finite(loss, "critic loss");
  return 0.5 * loss;
}

SacStats SacAgent::update(const SacBatch& batch, core::Rng& rng) {
  SacStats st;
  st.critic_loss = update_critics(batch, rng);

  const Eigen::Index b = batch.rewards.size();
  const double inv_b = 1.0 / static_cast<double>(b);
  const double alpha = this->alpha();

  // Actor: minimise mean(alpha * log pi - min_i Q_i(s, a)), a reparameterised.
  Policy::Sample smp = policy_.sample(batch.obs, batch.cond, false, rng, true);
  nn::NetworkTape t0, t1;
  const Vector q0 = critics_.value(0, batch.obs, batch.cond, smp.actions, &t0);
  const Vector q1 = critics_.value(1, batch.obs, batch.cond, smp.actions, &t1);
  Matrix dq0 = Matrix::Zero(1, b), dq1 = Matrix::Zero(1, b);
  double actor_loss = 0.0, q_mean = 0.0;
  for (Eigen::Index j = 0; j < b; ++j) {
    const bool first = q0[j] <= q1[j];
    const double qmin = first ? q0[j] : q1[j];
    (first ? dq0 : dq1)(0, j) = -inv_b;
    actor_loss += alpha * smp.log_prob[j] - qmin;
    q_mean += qmin;
  }
  actor_loss *= inv_b;
  check_finite(actor_loss, "actor loss");
  const Eigen::Index a = cfg_.action_dim;
  const Matrix d_act = critics_.q(0).backward(t0, dq0, nullptr).bottomRows(a) +
                       critics_.q(1).backward(t1, dq1, nullptr).bottomRows(a);
  const Vector d_logp = Vector::Constant(b, alpha * inv_b);
  Vector pgrad = Vector::Zero(static_cast<Eigen::Index>(policy_.net().num_params()));
  policy_.backward(smp, d_act, d_logp, &pgrad);
  policy_opt_.step(policy_.net().params(), pgrad);

  // Temperature: minimise -log_alpha * mean(log pi + target_entropy).
  const double mean_logp = smp.log_prob.mean();
  Vector ag(1), la(1);
  ag[0] = -(mean_logp + target_entropy_);
  la[0] = log_alpha_;
  alpha_opt_.step(la, ag);
  log_alpha_ = la[0];

  critics_.update_targets(cfg_.target_decay);
  ++updates_;

  st.actor_loss = actor_loss;
  st.alpha = this->alpha();
  st.entropy = -mean_logp;
  st.q_mean = q_mean * inv_b;
  return st;
}

void SacAgent::save(core::ByteWriter& out) const {
  out.put_vector(policy_.net().params());
  policy_opt_.save(out);
  for (int i = 0; i < 2; ++i) {
    out.put_vector(critics_.q(i).params());
    out.put_vector(critics_.target(i).params());
    q_opt_[i].save(out);
  }
  out.put<double>(log_alpha_);
  alpha_opt_.save(out);
  out.put<std::int64_t>(updates_);
}

void SacAgent::load(core::ByteReader& in) {
  auto read_into = [&](Vector& dst, const char* what) {
    Vector v = in.get_vector();
    if (v.size() != dst.size()) throw IoError(std::string(what) + " parameter count mismatch in checkpoint");
    dst = std::move(v);
  };
  read_into(policy_.net().params(), "policy");
  policy_opt_.load(in);
  for (int i = 0; i < 2; ++i) {
    read_into(critics_.q(i).params(), "critic");
    read_into(critics_.target(i).params(), "target critic");
    q_opt_[i].load(in);
  }
  log_alpha_ = in.get<double>();
  alpha_opt_.load(in);
  updates_ = in.get<std::int64_t>();
}

}  // namespace fog::agent
