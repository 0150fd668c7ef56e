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

#include "fog/dsd/dsd.hpp"

#include <cmath>

#include "fog/core/errors.hpp"

namespace fog::dsd {

namespace {

constexpr double kNormFloor = 1e-12;

// Columns 0..B-1 hold phi(s), columns B..2B-1 hold phi(s').
Matrix forward_pairs(const PhiNet& phi, const Batch& batch, nn::NetworkTape* tape) {
  std::vector<const core::State*> states;
  states.reserve(2 * batch.size());
  for (const auto* t : batch) states.push_back(&t->s);
  for (const auto* t : batch) states.push_back(&t->s_next);
  return phi.forward(states, tape);
}

}  // namespace

Batch as_batch(const std::vector<core::Transition>& transitions) {
  Batch b;
  b.reserve(transitions.size());
  for (const auto& t : transitions) b.push_back(&t);
  return b;
}

// ---------------------------------------------------------------------------
// PhiNet

PhiNet::PhiNet(nn::NetworkSpec spec, core::Rng& rng, double lr) : net_(std::move(spec), rng) {
  opt_ = nn::Adam(net_.num_params(), lr);
}

PhiNet PhiNet::make(bool image_obs, int state_dim, const Vec& obs_scale, int skill_dim, int width,
                    core::Rng& rng, double lr) {
  if (skill_dim < 1) throw InvalidArgument("skill dimension must be >= 1");
  nn::NetworkSpec spec;
  spec.encoder = image_obs ? nn::EncoderKind::kConv : nn::EncoderKind::kVector;
  spec.obs_dim = image_obs ? 0 : state_dim;
  if (!image_obs) spec.obs_scale = obs_scale;
  spec.hidden = {width, width};
  spec.out_dim = skill_dim;
  spec.activation = nn::Activation::kSilu;
  return PhiNet(spec, rng, lr);
}

void PhiNet::check_state(const core::State& s) const {
  const bool conv = net_.spec().encoder == nn::EncoderKind::kConv;
  if (conv != s.is_image()) throw InvalidArgument("phi: state kind does not match the network input");
  if (!conv && s.vec().size() != net_.spec().obs_dim) throw InvalidArgument("phi: state has the wrong length");
}

Vec PhiNet::forward(const core::State& s) const {
  check_state(s);
  return net_.forward(nn::Network::states_to_matrix({&s}), Matrix()).col(0);
}

Matrix PhiNet::forward(const std::vector<const core::State*>& states, nn::NetworkTape* tape) const {
  if (states.empty()) return Matrix(dim(), 0);
  check_state(*states.front());
  return net_.forward(nn::Network::states_to_matrix(states), Matrix(), tape);
}

void PhiNet::save(core::ByteWriter& out) const {
  out.put_vector(net_.params());
  opt_.save(out);
}

void PhiNet::load(core::ByteReader& in) {
  Vector p = in.get_vector();
  if (p.size() != net_.params().size()) throw IoError("phi parameter count mismatch in checkpoint");
  net_.params() = std::move(p);
  opt_.load(in);
}

// ---------------------------------------------------------------------------
// DualState

DualState DualState::make(double init_lambda, double epsilon, double lr) {
  if (!(init_lambda > 0.0)) throw InvalidArgument("initial lambda must be positive");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  DualState d;
  d.log_lambda = std::log(init_lambda);
  d.epsilon = epsilon;
  d.opt = nn::Adam(1, lr);
  return d;
}

void DualState::save(core::ByteWriter& out) const {
  out.put<double>(log_lambda);
  out.put<double>(epsilon);
  opt.save(out);
}

void DualState::load(core::ByteReader& in) {
  log_lambda = in.get<double>();
  epsilon = in.get<double>();
  opt.load(in);
}

// ---------------------------------------------------------------------------
// Metrics

std::string to_string(MetricKind k) {
  switch (k) {
    case MetricKind::kEuclidean: return "euclidean";
    case MetricKind::kTemporal: return "temporal";
    case MetricKind::kScore: return "score";
  }
  return "?";
}

MetricKind metric_kind_from_string(const std::string& s) {
  if (s == "euclidean") return MetricKind::kEuclidean;
  if (s == "temporal") return MetricKind::kTemporal;
  if (s == "score") return MetricKind::kScore;
  throw InvalidArgument("unknown metric kind '" + s + "'");
}

void MetricSpec::validate() const {
  if (kind == MetricKind::kScore && score_fn == nullptr) {
    throw InvalidArgument("score metric needs a bound score function");
  }
}

double metric_distance(const MetricSpec& spec, const core::State& s, const core::State& s_next) {
  spec.validate();
  switch (spec.kind) {
    case MetricKind::kEuclidean:
      if (!s.is_vector() || !s_next.is_vector()) {
        throw UnsupportedMetricError("euclidean metric is undefined on image states");
      }
      if (s.vec().size() != s_next.vec().size()) throw InvalidArgument("states differ in length");
      return (s_next.vec() - s.vec()).norm();
    case MetricKind::kTemporal: return 1.0;
    case MetricKind::kScore: {
      if (s_next.is_image()) {
        const Vec none;
        return (*spec.score_fn)(score::ScoreQuery(none, s_next.img()));
      }
      return (*spec.score_fn)(score::ScoreQuery(s_next.vec()));
    }
  }
  return 1.0;
}

double transition_distance(MetricKind kind, const core::Transition& t) {
  switch (kind) {
    case MetricKind::kEuclidean:
      if (!t.s.is_vector() || !t.s_next.is_vector()) {
        throw UnsupportedMetricError("euclidean metric is undefined on image states");
      }
      return (t.s_next.vec() - t.s.vec()).norm();
    case MetricKind::kTemporal: return 1.0;
    case MetricKind::kScore: return t.score;
  }
  return 1.0;
}

double skill_reward(const PhiNet& phi, const core::State& s, const core::State& s_next, const core::Skill& z) {
  if (z.dim() != phi.dim()) throw InvalidArgument("skill dimension does not match phi output");
  return (phi.forward(s_next) - phi.forward(s)).dot(z.z());
}

double weighted_reward(double score, double r_skill) { return score * r_skill; }

std::string to_string(SlackForm f) { return f == SlackForm::kSquared ? "squared" : "norm"; }

SlackForm slack_form_from_string(const std::string& s) {
  if (s == "squared") return SlackForm::kSquared;
  if (s == "norm") return SlackForm::kNorm;
  throw InvalidArgument("unknown slack form '" + s + "' (expected squared or norm)");
}

double slack_value(SlackForm form, double distance, const Vector& delta) {
  return form == SlackForm::kSquared ? distance * distance - delta.squaredNorm() : distance - delta.norm();
}

double constraint_slack(const PhiNet& phi, const MetricSpec& spec, const core::State& s, const core::State& s_next,
                        SlackForm form) {
  return slack_value(form, metric_distance(spec, s, s_next), phi.forward(s_next) - phi.forward(s));
}

// ---------------------------------------------------------------------------
// Primal / dual updates

PhiStats phi_objective(const PhiNet& phi, double lambda, double epsilon, const Batch& batch, MetricKind kind,
                       Vector* grad, SlackForm form) {
  if (batch.empty()) throw InvalidArgument("phi update needs a non-empty batch");
  const auto b = static_cast<Eigen::Index>(batch.size());
  const double inv_b = 1.0 / static_cast<double>(b);
  nn::NetworkTape tape;
  const Matrix out = forward_pairs(phi, batch, grad ? &tape : nullptr);
  const int d = phi.dim();

  PhiStats st;
  Matrix dy = Matrix::Zero(d, 2 * b);  // dJ/dphi
  std::size_t satisfied = 0;
  for (Eigen::Index i = 0; i < b; ++i) {
    const core::Transition& t = *batch[static_cast<std::size_t>(i)];
    if (t.z.dim() != d) throw InvalidArgument("skill dimension does not match phi output");
    const Vector delta = out.col(b + i) - out.col(i);
    const double slack = slack_value(form, transition_distance(kind, t), delta);
    const double min_term = std::min(epsilon, slack);
    st.alignment += delta.dot(t.z.z());
    st.mean_min_slack += min_term;
    if (slack >= 0.0) ++satisfied;

    Vector g = t.z.z();
    if (slack < epsilon) {
      if (form == SlackForm::kSquared) {
        g -= 2.0 * lambda * delta;
      } else if (const double norm = delta.norm(); norm > kNormFloor) {
        g -= lambda * delta / norm;
      }
    }
    dy.col(b + i) += inv_b * g;
    dy.col(i) -= inv_b * g;
  }
  st.alignment *= inv_b;
  st.mean_min_slack *= inv_b;
  st.penalty = lambda * st.mean_min_slack;
  st.objective = st.alignment + st.penalty;
  st.satisfied = static_cast<double>(satisfied) * inv_b;

  if (grad) {
    if (grad->size() != static_cast<Eigen::Index>(phi.net().num_params())) {
      throw InvalidArgument("phi gradient buffer has the wrong size");
    }
    phi.net().backward(tape, dy, grad);
  }
  return st;
}

PhiStats update_phi(PhiNet& phi, const DualState& dual, const Batch& batch, MetricKind kind, SlackForm form) {
  Vector grad = Vector::Zero(static_cast<Eigen::Index>(phi.net().num_params()));
  const PhiStats st = phi_objective(phi, dual.lambda(), dual.epsilon, batch, kind, &grad, form);
  if (!std::isfinite(st.objective)) throw TrainingDivergenceError("phi objective is not finite");
  grad = -grad;  // ascent on J
  phi.optimizer().step(phi.net().params(), grad);
  return st;
}

double mean_min_slack(const PhiNet& phi, double epsilon, const Batch& batch, MetricKind kind, SlackForm form) {
  if (batch.empty()) throw InvalidArgument("lambda update needs a non-empty batch");
  const Matrix out = forward_pairs(phi, batch, nullptr);
  const auto b = static_cast<Eigen::Index>(batch.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < b; ++i) {
    const double slack =
        slack_value(form, transition_distance(kind, *batch[static_cast<std::size_t>(i)]), out.col(b + i) - out.col(i));
    acc += std::min(epsilon, slack);
  }
  return acc / static_cast<double>(b);
}

void update_lambda_from_slack(DualState& dual, double mean_min) {
  if (!std::isfinite(mean_min)) throw TrainingDivergenceError("constraint slack is not finite");
  // d(lambda * m) / d(log_lambda) = lambda * m
  Vector grad(1), p(1);
  grad[0] = dual.lambda() * mean_min;
  p[0] = dual.log_lambda;
  dual.opt.step(p, grad);
  dual.log_lambda = p[0];
}

double update_lambda(DualState& dual, const Batch& batch, const PhiNet& phi, MetricKind kind, SlackForm form) {
  const double m = mean_min_slack(phi, dual.epsilon, batch, kind, form);
  update_lambda_from_slack(dual, m);
  return m;
}

Vector batch_skill_rewards(const PhiNet& phi, const Batch& batch) {
  const Matrix out = forward_pairs(phi, batch, nullptr);
  const auto b = static_cast<Eigen::Index>(batch.size());
  Vector r(b);
  for (Eigen::Index i = 0; i < b; ++i) {
    r[i] = (out.col(b + i) - out.col(i)).dot(batch[static_cast<std::size_t>(i)]->z.z());
  }
  return r;
}

PairTerms evaluate_pairs(const PhiNet& phi, double epsilon, const Batch& batch, MetricKind kind, SlackForm form) {
  if (batch.empty()) throw InvalidArgument("evaluate_pairs needs a non-empty batch");
  const Matrix out = forward_pairs(phi, batch, nullptr);
  const auto b = static_cast<Eigen::Index>(batch.size());
  PairTerms pt;
  pt.skill_rewards.resize(b);
  std::size_t satisfied = 0;
  for (Eigen::Index i = 0; i < b; ++i) {
    const core::Transition& t = *batch[static_cast<std::size_t>(i)];
    const Vector delta = out.col(b + i) - out.col(i);
    const double slack = slack_value(form, transition_distance(kind, t), delta);
    pt.mean_min_slack += std::min(epsilon, slack);
    if (slack >= 0.0) ++satisfied;
    pt.skill_rewards[i] = delta.dot(t.z.z());
  }
  pt.mean_min_slack /= static_cast<double>(b);
  pt.satisfied = static_cast<double>(satisfied) / static_cast<double>(b);
  return pt;
}

// ---------------------------------------------------------------------------

ScaledPhiReport scaled_phi_check(double f_const, const Matrix& phi_s, const Matrix& phi_s_next, const Matrix& z) {
  if (!(f_const > 0.0)) throw InvalidArgument("f_const must be positive");
  if (phi_s.rows() != phi_s_next.rows() || phi_s.cols() != phi_s_next.cols() || z.rows() != phi_s.rows() ||
      z.cols() != phi_s.cols()) {
    throw InvalidArgument("scaled_phi_check: shape mismatch");
  }
  ScaledPhiReport r;
  r.pairs = static_cast<std::size_t>(phi_s.cols());
  for (Eigen::Index i = 0; i < phi_s.cols(); ++i) {
    const Vector d = phi_s_next.col(i) - phi_s.col(i);
    const Vector d_scaled = f_const * phi_s_next.col(i) - f_const * phi_s.col(i);
    const bool original = d.norm() <= 1.0;
    const bool scaled = d_scaled.norm() <= f_const;
    if (original != scaled) ++r.biconditional_failures;
    r.max_norm_deviation = std::max(r.max_norm_deviation, std::abs(d_scaled.norm() - f_const * d.norm()));
    r.max_reward_deviation =
        std::max(r.max_reward_deviation, std::abs(d_scaled.dot(z.col(i)) - f_const * d.dot(z.col(i))));
  }
  return r;
}

ScaledPhiReport scaled_phi_check(const PhiNet& phi, double f_const, const std::vector<core::Transition>& pairs) {
  const Batch batch = as_batch(pairs);
  const Matrix out = forward_pairs(phi, batch, nullptr);
  const auto b = static_cast<Eigen::Index>(batch.size());
  Matrix z(phi.dim(), b);
  for (Eigen::Index i = 0; i < b; ++i) z.col(i) = batch[static_cast<std::size_t>(i)]->z.z();
  return scaled_phi_check(f_const, out.leftCols(b), out.rightCols(b), z);
}

}  // namespace fog::dsd
