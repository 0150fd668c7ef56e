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
#include <functional>
#include <memory>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "fog/core/binary_io.hpp"
#include "fog/core/rng.hpp"
#include "fog/core/types.hpp"
#include "fog/embed/embedder.hpp"
#include "fog/score/predicate.hpp"

namespace fog::score {

struct IntentionPair {
  std::string desirable;
  std::string undesirable;

  /// Both non-empty and distinct, else InvalidArgument.
  void validate() const;
};

enum class ScoreMode { kBinary, kSoftmax, kMulti, kPredicate, kConstant };

/// Which answer of the checker marks the state as unwanted.
enum class Polarity { kCheckerFlagsUndesirable, kCheckerFlagsDesirable };

struct ScoreConfig {
  ScoreMode mode = ScoreMode::kConstant;
  double alpha = 0.0;
  std::vector<IntentionPair> intentions;
  std::string predicate;
  Polarity polarity = Polarity::kCheckerFlagsUndesirable;
  int skip_n = 1;
  double noise_b = 0.0;

  /// alpha in [0, 1) (1 only with constant mode), skip_n >= 1, b in [0, 1],
  /// intentions/predicate present as the mode requires.
  void validate() const;
};

std::string to_string(ScoreMode m);
std::string to_string(Polarity p);
ScoreMode score_mode_from_string(const std::string& s);
Polarity polarity_from_string(const std::string& s);

void to_json(nlohmann::json& j, const IntentionPair& p);
void from_json(const nlohmann::json& j, IntentionPair& p);
void to_json(nlohmann::json& j, const ScoreConfig& c);
void from_json(const nlohmann::json& j, ScoreConfig& c);

/// What a scorer sees: the environment's vector state and, on demand, its frame.
class ScoreQuery {
 public:
  explicit ScoreQuery(const core::Vec& state, std::function<core::Image()> render = {})
      : state_(state), render_(std::move(render)) {}
  ScoreQuery(const core::Vec& state, const core::Image& frame) : state_(state), frame_(frame) {}

  const core::Vec& state() const noexcept { return state_; }
  /// Renders lazily. Throws InvalidArgument when no frame source is attached.
  const core::Image& frame() const;
  bool has_frame() const noexcept { return frame_.has_value() || static_cast<bool>(render_); }

 private:
  const core::Vec& state_;
  std::function<core::Image()> render_;
  mutable std::optional<core::Image> frame_;
};

/// f: S -> [0, 1].
class ScoreFn {
 public:
  virtual ~ScoreFn() = default;

  virtual double operator()(const ScoreQuery& q) = 0;
  /// Start of a new trajectory.
  virtual void reset() {}
  /// True when every output lies in {alpha(), 1}.
  virtual bool binary_valued() const = 0;
  virtual double alpha() const { return 0.0; }
  virtual bool needs_frames() const = 0;

  /// Mutable internal state (noise generators, hold counters) for checkpoints.
  virtual void save_state(core::ByteWriter&) const {}
  virtual void load_state(core::ByteReader&) {}
};

using ScoreFnPtr = std::unique_ptr<ScoreFn>;

// --- plain score computations ---------------------------------------------

/// 1 if cos(E_s, E_desirable) > cos(E_s, E_undesirable), else alpha (ties give alpha).
double binary_score(const core::Image& img, const IntentionPair& pair, double alpha, embed::Embedder& embedder);
/// exp(c1) / (exp(c1) + exp(c2)) over the two cosines.
double softmax_score(const core::Image& img, const IntentionPair& pair, embed::Embedder& embedder);
/// 1 only when every pair favours its desirable text; needs at least two pairs.
double multi_score(const core::Image& img, const std::vector<IntentionPair>& pairs, double alpha,
                   embed::Embedder& embedder);
double predicate_score(const core::Vec& s, const PredicateExpr& expr, Polarity polarity, double alpha);

/// Decision rules on precomputed cosines, shared by the scorers and the functions above.
double binary_from_cosines(double c_desirable, double c_undesirable, double alpha);
double softmax_from_cosines(double c_desirable, double c_undesirable);

// --- scorer objects ----------------------------------------------------------

class ConstantScore final : public ScoreFn {
 public:
  explicit ConstantScore(double value = 1.0);
  double operator()(const ScoreQuery&) override { return value_; }
  bool binary_valued() const override { return false; }
  bool needs_frames() const override { return false; }

 private:
  double value_;
};

/// Text embeddings are computed once at construction.
class BinaryScore final : public ScoreFn {
 public:
  BinaryScore(std::shared_ptr<embed::Embedder> embedder, IntentionPair pair, double alpha);
  double operator()(const ScoreQuery& q) override;
  bool binary_valued() const override { return true; }
  double alpha() const override { return alpha_; }
  bool needs_frames() const override { return true; }

 private:
  std::shared_ptr<embed::Embedder> embedder_;
  embed::Embedding pos_, neg_;
  double alpha_;
};

class SoftmaxScore final : public ScoreFn {
 public:
  SoftmaxScore(std::shared_ptr<embed::Embedder> embedder, IntentionPair pair);
  double operator()(const ScoreQuery& q) override;
  bool binary_valued() const override { return false; }
  bool needs_frames() const override { return true; }

 private:
  std::shared_ptr<embed::Embedder> embedder_;
  embed::Embedding pos_, neg_;
};

class MultiScore final : public ScoreFn {
 public:
  MultiScore(std::shared_ptr<embed::Embedder> embedder, const std::vector<IntentionPair>& pairs, double alpha);
  double operator()(const ScoreQuery& q) override;
  bool binary_valued() const override { return true; }
  double alpha() const override { return alpha_; }
  bool needs_frames() const override { return true; }

 private:
  std::shared_ptr<embed::Embedder> embedder_;
  std::vector<std::pair<embed::Embedding, embed::Embedding>> pairs_;
  double alpha_;
};

class PredicateScore final : public ScoreFn {
 public:
  /// state_dim < 0 skips the index check.
  PredicateScore(PredicateExpr expr, Polarity polarity, double alpha, int state_dim = -1);
  double operator()(const ScoreQuery& q) override;
  bool binary_valued() const override { return true; }
  double alpha() const override { return alpha_; }
  bool needs_frames() const override { return false; }

 private:
  PredicateExpr expr_;
  Polarity polarity_;
  double alpha_;
};

/// Swaps 1 <-> alpha with probability b on every call.
class NoiseScore final : public ScoreFn {
 public:
  NoiseScore(ScoreFnPtr base, double b, core::Rng rng);
  double operator()(const ScoreQuery& q) override;
  void reset() override { base_->reset(); }
  bool binary_valued() const override { return true; }
  double alpha() const override { return base_->alpha(); }
  bool needs_frames() const override { return base_->needs_frames(); }
  void save_state(core::ByteWriter& out) const override;
  void load_state(core::ByteReader& in) override;

  std::uint64_t flips() const noexcept { return flips_; }

 private:
  ScoreFnPtr base_;
  double b_;
  core::Rng rng_;
  std::uint64_t flips_ = 0;
};

/// Queries the base at steps 0, N, 2N, ... of a trajectory and repeats the last
/// value in between. reset() starts a new trajectory.
class SkipScore final : public ScoreFn {
 public:
  SkipScore(ScoreFnPtr base, int n);
  double operator()(const ScoreQuery& q) override;
  void reset() override;
  bool binary_valued() const override { return base_->binary_valued(); }
  double alpha() const override { return base_->alpha(); }
  bool needs_frames() const override { return base_->needs_frames(); }
  void save_state(core::ByteWriter& out) const override;
  void load_state(core::ByteReader& in) override;

  std::uint64_t fresh_calls() const noexcept { return fresh_calls_; }

 private:
  ScoreFnPtr base_;
  int n_;
  std::int64_t step_ = 0;
  double held_ = 1.0;
  std::uint64_t fresh_calls_ = 0;
};

/// Throws ScoreSpecError unless the base is binary-valued; b must lie in [0, 1].
ScoreFnPtr with_noise(ScoreFnPtr base, double b, core::Rng rng);
/// n >= 1.
ScoreFnPtr with_skip(ScoreFnPtr base, int n);

/// Noiseless, unskipped scorer for config.mode. `state_dim` validates predicate indices.
ScoreFnPtr make_base_scorer(const ScoreConfig& config, std::shared_ptr<embed::Embedder> embedder, int state_dim);
/// Training scorer: skip(noise(base)). Noise is only attached when b > 0.
ScoreFnPtr make_scorer(const ScoreConfig& config, std::shared_ptr<embed::Embedder> embedder, int state_dim,
                       core::Rng noise_rng);

/// Prompt asking a language model to write a state checker for `requirement`.
/// Throws InvalidArgument if any part is empty.
std::string build_prompt(const std::string& env_description, const std::string& state_space_doc,
                         const std::string& requirement);

}  // namespace fog::score
