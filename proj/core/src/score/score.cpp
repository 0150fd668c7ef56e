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

#include "fog/score/score.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fog/core/errors.hpp"

namespace fog::score {

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
}

std::pair<embed::Embedding, embed::Embedding> embed_pair(embed::Embedder& e, const IntentionPair& p) {
  p.validate();
  auto v = e.embed_texts({p.desirable, p.undesirable});
  return {std::move(v[0]), std::move(v[1])};
}

}  // namespace

void IntentionPair::validate() const {
  if (desirable.empty() || undesirable.empty()) throw InvalidArgument("intention texts must be non-empty");
  if (desirable == undesirable) throw InvalidArgument("desirable and undesirable intentions must differ");
}

void ScoreConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1)");
  if (alpha == 1.0 && mode != ScoreMode::kConstant) {
    throw InvalidArgument("alpha = 1 is only accepted with the constant score mode");
  }
  if (skip_n < 1) throw InvalidArgument("skip_n must be >= 1");
  if (!(noise_b >= 0.0 && noise_b <= 1.0)) throw InvalidArgument("noise_b must lie in [0, 1]");
  switch (mode) {
    case ScoreMode::kBinary:
    case ScoreMode::kSoftmax:
      if (intentions.size() != 1) throw InvalidArgument(to_string(mode) + " score needs exactly one intention pair");
      break;
    case ScoreMode::kMulti:
      if (intentions.size() < 2) throw InvalidArgument("multi score needs at least two intention pairs");
      break;
    case ScoreMode::kPredicate:
      if (predicate.empty()) throw InvalidArgument("predicate score needs a predicate expression");
      PredicateExpr::parse(predicate);
      break;
    case ScoreMode::kConstant: break;
  }
  for (const auto& p : intentions) p.validate();
  if (noise_b > 0.0 && (mode == ScoreMode::kSoftmax || mode == ScoreMode::kConstant)) {
    throw ScoreSpecError("score noise needs a binary-valued score mode");
  }
}

std::string to_string(ScoreMode m) {
  switch (m) {
    case ScoreMode::kBinary: return "binary";
    case ScoreMode::kSoftmax: return "softmax";
    case ScoreMode::kMulti: return "multi";
    case ScoreMode::kPredicate: return "predicate";
    case ScoreMode::kConstant: return "constant";
  }
  return "?";
}

std::string to_string(Polarity p) {
  return p == Polarity::kCheckerFlagsUndesirable ? "checker_flags_undesirable" : "checker_flags_desirable";
}

ScoreMode score_mode_from_string(const std::string& s) {
  for (auto m : {ScoreMode::kBinary, ScoreMode::kSoftmax, ScoreMode::kMulti, ScoreMode::kPredicate,
                 ScoreMode::kConstant}) {
    if (to_string(m) == s) return m;
  }
  throw InvalidArgument("unknown score mode '" + s + "'");
}

Polarity polarity_from_string(const std::string& s) {
  if (s == "checker_flags_undesirable") return Polarity::kCheckerFlagsUndesirable;
  if (s == "checker_flags_desirable") return Polarity::kCheckerFlagsDesirable;
  throw InvalidArgument("unknown polarity '" + s + "'");
}

void to_json(nlohmann::json& j, const IntentionPair& p) {
  j = nlohmann::json{{"desirable", p.desirable}, {"undesirable", p.undesirable}};
}

void from_json(const nlohmann::json& j, IntentionPair& p) {
  p.desirable = j.at("desirable").get<std::string>();
  p.undesirable = j.at("undesirable").get<std::string>();
}

void to_json(nlohmann::json& j, const ScoreConfig& c) {
  j = nlohmann::json{{"mode", to_string(c.mode)},     {"alpha", c.alpha},
                     {"intentions", c.intentions},    {"predicate", c.predicate},
                     {"polarity", to_string(c.polarity)}, {"skip_n", c.skip_n},
                     {"noise_b", c.noise_b}};
}

void from_json(const nlohmann::json& j, ScoreConfig& c) {
  ScoreConfig d;
  c.mode = j.contains("mode") ? score_mode_from_string(j.at("mode").get<std::string>()) : d.mode;
  c.alpha = j.value("alpha", d.alpha);
  c.intentions = j.value("intentions", d.intentions);
  c.predicate = j.value("predicate", d.predicate);
  c.polarity = j.contains("polarity") ? polarity_from_string(j.at("polarity").get<std::string>()) : d.polarity;
  c.skip_n = j.value("skip_n", d.skip_n);
  c.noise_b = j.value("noise_b", d.noise_b);
}

const core::Image& ScoreQuery::frame() const {
  if (!frame_) {
    if (!render_) throw InvalidArgument("this score function needs frames but none were provided");
    frame_ = render_();
  }
  return *frame_;
}

// ---------------------------------------------------------------------------

double binary_from_cosines(double c_desirable, double c_undesirable, double alpha) {
  return c_desirable > c_undesirable ? 1.0 : alpha;
}

double softmax_from_cosines(double c_desirable, double c_undesirable) {
  return 1.0 / (1.0 + std::exp(c_undesirable - c_desirable));
}

double binary_score(const core::Image& img, const IntentionPair& pair, double alpha, embed::Embedder& embedder) {
  check_alpha(alpha);
  const auto [pos, neg] = embed_pair(embedder, pair);
  const auto e = embedder.embed_image(img);
  return binary_from_cosines(embed::cosine(e, pos), embed::cosine(e, neg), alpha);
}

double softmax_score(const core::Image& img, const IntentionPair& pair, embed::Embedder& embedder) {
  const auto [pos, neg] = embed_pair(embedder, pair);
  const auto e = embedder.embed_image(img);
  return softmax_from_cosines(embed::cosine(e, pos), embed::cosine(e, neg));
}

double multi_score(const core::Image& img, const std::vector<IntentionPair>& pairs, double alpha,
                   embed::Embedder& embedder) {
  check_alpha(alpha);
  if (pairs.size() < 2) throw InvalidArgument("multi_score needs at least two pairs; use binary_score");
  const auto e = embedder.embed_image(img);
  for (const auto& p : pairs) {
    const auto [pos, neg] = embed_pair(embedder, p);
    if (binary_from_cosines(embed::cosine(e, pos), embed::cosine(e, neg), 0.0) != 1.0) return alpha;
  }
  return 1.0;
}

double predicate_score(const core::Vec& s, const PredicateExpr& expr, Polarity polarity, double alpha) {
  check_alpha(alpha);
  const bool flagged = expr.evaluate(s);
  const bool desirable = polarity == Polarity::kCheckerFlagsUndesirable ? !flagged : flagged;
  return desirable ? 1.0 : alpha;
}

// ---------------------------------------------------------------------------

ConstantScore::ConstantScore(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) throw InvalidArgument("constant score must lie in [0, 1]");
}

BinaryScore::BinaryScore(std::shared_ptr<embed::Embedder> embedder, IntentionPair pair, double alpha)
    : embedder_(std::move(embedder)), alpha_(alpha) {
  check_alpha(alpha);
  std::tie(pos_, neg_) = embed_pair(*embedder_, pair);
}

double BinaryScore::operator()(const ScoreQuery& q) {
  const auto e = embedder_->embed_image(q.frame());
  return binary_from_cosines(embed::cosine(e, pos_), embed::cosine(e, neg_), alpha_);
}

SoftmaxScore::SoftmaxScore(std::shared_ptr<embed::Embedder> embedder, IntentionPair pair)
    : embedder_(std::move(embedder)) {
  std::tie(pos_, neg_) = embed_pair(*embedder_, pair);
}

double SoftmaxScore::operator()(const ScoreQuery& q) {
  const auto e = embedder_->embed_image(q.frame());
  return softmax_from_cosines(embed::cosine(e, pos_), embed::cosine(e, neg_));
}

MultiScore::MultiScore(std::shared_ptr<embed::Embedder> embedder, const std::vector<IntentionPair>& pairs,
                       double alpha)
    : embedder_(std::move(embedder)), alpha_(alpha) {
  check_alpha(alpha);
  if (pairs.size() < 2) throw InvalidArgument("multi score needs at least two pairs; use the binary score");
  for (const auto& p : pairs) pairs_.push_back(embed_pair(*embedder_, p));
}

double MultiScore::operator()(const ScoreQuery& q) {
  const auto e = embedder_->embed_image(q.frame());
  for (const auto& [pos, neg] : pairs_) {
    if (!(embed::cosine(e, pos) > embed::cosine(e, neg))) return alpha_;
  }
  return 1.0;
}

PredicateScore::PredicateScore(PredicateExpr expr, Polarity polarity, double alpha, int state_dim)
    : expr_(std::move(expr)), polarity_(polarity), alpha_(alpha) {
  check_alpha(alpha);
  if (expr_.empty()) throw ScoreSpecError("predicate score needs a non-empty expression");
  if (state_dim >= 0) expr_.check_dim(state_dim);
}

double PredicateScore::operator()(const ScoreQuery& q) {
  return predicate_score(q.state(), expr_, polarity_, alpha_);
}

NoiseScore::NoiseScore(ScoreFnPtr base, double b, core::Rng rng) : base_(std::move(base)), b_(b), rng_(rng) {
  if (!base_) throw InvalidArgument("noise wrapper needs a base score");
  if (!base_->binary_valued()) throw ScoreSpecError("noise wrapper needs a binary-valued base score");
  if (!(b >= 0.0 && b <= 1.0)) throw InvalidArgument("noise probability must lie in [0, 1]");
}

double NoiseScore::operator()(const ScoreQuery& q) {
  const double v = (*base_)(q);
  if (rng_.uniform() >= b_) return v;
  ++flips_;
  return v == 1.0 ? base_->alpha() : 1.0;
}

void NoiseScore::save_state(core::ByteWriter& out) const {
  out.put_string(rng_.serialize());
  out.put<std::uint64_t>(flips_);
  base_->save_state(out);
}

void NoiseScore::load_state(core::ByteReader& in) {
  rng_.deserialize(in.get_string());
  flips_ = in.get<std::uint64_t>();
  base_->load_state(in);
}

SkipScore::SkipScore(ScoreFnPtr base, int n) : base_(std::move(base)), n_(n) {
  if (!base_) throw InvalidArgument("skip wrapper needs a base score");
  if (n < 1) throw InvalidArgument("skip interval must be >= 1");
}

double SkipScore::operator()(const ScoreQuery& q) {
  if (step_ % n_ == 0) {
    held_ = (*base_)(q);
    ++fresh_calls_;
  }
  ++step_;
  return held_;
}

void SkipScore::reset() {
  step_ = 0;
  held_ = 1.0;
  base_->reset();
}

void SkipScore::save_state(core::ByteWriter& out) const {
  out.put<std::int64_t>(step_);
  out.put<double>(held_);
  out.put<std::uint64_t>(fresh_calls_);
  base_->save_state(out);
}

void SkipScore::load_state(core::ByteReader& in) {
  step_ = in.get<std::int64_t>();
  held_ = in.get<double>();
  fresh_calls_ = in.get<std::uint64_t>();
  base_->load_state(in);
}

ScoreFnPtr with_noise(ScoreFnPtr base, double b, core::Rng rng) {
  return std::make_unique<NoiseScore>(std::move(base), b, rng);
}

ScoreFnPtr with_skip(ScoreFnPtr base, int n) { return std::make_unique<SkipScore>(std::move(base), n); }

ScoreFnPtr make_base_scorer(const ScoreConfig& config, std::shared_ptr<embed::Embedder> embedder, int state_dim) {
  config.validate();
  const bool needs_embedder = config.mode == ScoreMode::kBinary || config.mode == ScoreMode::kSoftmax ||
                              config.mode == ScoreMode::kMulti;
  if (needs_embedder && !embedder) throw InvalidArgument(to_string(config.mode) + " score needs an embedder");
  switch (config.mode) {
    case ScoreMode::kBinary:
      return std::make_unique<BinaryScore>(std::move(embedder), config.intentions.front(), config.alpha);
    case ScoreMode::kSoftmax:
      return std::make_unique<SoftmaxScore>(std::move(embedder), config.intentions.front());
    case ScoreMode::kMulti:
      return std::make_unique<MultiScore>(std::move(embedder), config.intentions, config.alpha);
    case ScoreMode::kPredicate:
      return std::make_unique<PredicateScore>(PredicateExpr::parse(config.predicate), config.polarity, config.alpha,
                                              state_dim);
    case ScoreMode::kConstant: return std::make_unique<ConstantScore>(1.0);
  }
  throw InvalidArgument("unhandled score mode");
}

ScoreFnPtr make_scorer(const ScoreConfig& config, std::shared_ptr<embed::Embedder> embedder, int state_dim,
                       core::Rng noise_rng) {
  ScoreFnPtr f = make_base_scorer(config, std::move(embedder), state_dim);
  if (config.noise_b > 0.0) f = with_noise(std::move(f), config.noise_b, noise_rng);
  if (config.skip_n > 1) f = with_skip(std::move(f), config.skip_n);
  return f;
}

std::string build_prompt(const std::string& env_description, const std::string& state_space_doc,
                         const std::string& requirement) {
  if (env_description.empty() || state_space_doc.empty() || requirement.empty()) {
    throw InvalidArgument("prompt parts must be non-empty");
  }
  std::ostringstream os;
  os << "Environment:\n" << env_description << "\n\n"
     << "State and action layout:\n" << state_space_doc << "\n\n"
     << "Write a Python function check(s) that receives one state vector s laid out as above and "
     << "decides whether the following holds: " << requirement << "\n"
     << "Use only comparisons of entries of s (or their absolute values) against constants. "
     << "If yes, output 1 otherwise 0.\n";
  return os.str();
}

}  // namespace fog::score
