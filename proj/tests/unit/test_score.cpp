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
#include <nlohmann/json.hpp>

#include "fog/core/errors.hpp"
#include "fog/envs/toy_envs.hpp"
#include "fog/score/score.hpp"

using namespace fog;
using core::Vec;

namespace {

Vec v(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

const score::IntentionPair kColour{"ground is blue", "ground is orange"};

// Counts calls and returns 1 on even calls, 0.2 on odd ones.
class Alternating final : public score::ScoreFn {
 public:
  double operator()(const score::ScoreQuery&) override { return calls++ % 2 == 0 ? 1.0 : 0.2; }
  bool binary_valued() const override { return true; }
  double alpha() const override { return 0.2; }
  bool needs_frames() const override { return false; }
  int calls = 0;
};

}  // namespace

TEST(DecisionRules, BinaryAndSoftmaxOracles) {
  EXPECT_EQ(score::binary_from_cosines(0.5, 0.1, 0.3), 1.0);
  EXPECT_EQ(score::binary_from_cosines(0.1, 0.5, 0.3), 0.3);
  EXPECT_EQ(score::binary_from_cosines(0.4, 0.4, 0.3), 0.3);
  EXPECT_NEAR(score::softmax_from_cosines(0.0, 0.0), 0.5, 1e-15);
  EXPECT_NEAR(score::softmax_from_cosines(1.0, 0.0), std::exp(1.0) / (std::exp(1.0) + 1.0), 1e-15);
}

TEST(BinaryScore, BlueFloorIsDesirable) {
  auto emb = std::make_shared<embed::MockEmbedder>();
  const auto left = envs::PointRoom::render({-10, 0}), right = envs::PointRoom::render({10, 0});
  EXPECT_EQ(score::binary_score(left, kColour, 0.0, *emb), 1.0);
  EXPECT_EQ(score::binary_score(right, kColour, 0.25, *emb), 0.25);
}

TEST(BinaryScore, OutputsLieInAlphaOrOneProperty) {
  auto emb = std::make_shared<embed::MockEmbedder>();
  score::BinaryScore f(emb, kColour, 0.4);
  core::Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    const Vec s = v({rng.uniform(-15, 15), rng.uniform(-15, 15)});
    const double y = f(score::ScoreQuery(s, [&] { return envs::PointRoom::render({s[0], s[1]}); }));
    ASSERT_TRUE(y == 1.0 || y == 0.4) << y;
  }
}

TEST(SoftmaxScore, InUnitIntervalAndOrdered) {
  auto emb = std::make_shared<embed::MockEmbedder>();
  score::SoftmaxScore f(emb, kColour);
  const Vec a = v({-12, 0}), b = v({12, 0});
  const double sa = f(score::ScoreQuery(a, envs::PointRoom::render({-12, 0})));
  const double sb = f(score::ScoreQuery(b, envs::PointRoom::render({12, 0})));
  EXPECT_GT(sa, 0.5);
  EXPECT_LT(sb, 0.5);
  EXPECT_GT(sb, 0.0);
}

TEST(MultiScore, NeedsEveryPair) {
  auto emb = std::make_shared<embed::MockEmbedder>();
  const score::IntentionPair upright{"agent stands normally", "agent flips over"};
  const auto img = envs::PointRoom::render({-12, 0});
  EXPECT_EQ(score::multi_score(img, {kColour, kColour}, 0.0, *emb), 1.0);
  // The blue-left floor carries more red than green, so the posture pair fails.
  EXPECT_EQ(score::multi_score(img, {kColour, upright}, 0.1, *emb), 0.1);
  EXPECT_THROW(score::multi_score(img, {kColour}, 0.0, *emb), InvalidArgument);
}

TEST(PredicateScore, PolarityOracle) {
  const auto expr = score::PredicateExpr::parse("s[0] > 0");
  EXPECT_EQ(score::predicate_score(v({1, 0}), expr, score::Polarity::kCheckerFlagsUndesirable, 0.3), 0.3);
  EXPECT_EQ(score::predicate_score(v({-1, 0}), expr, score::Polarity::kCheckerFlagsUndesirable, 0.3), 1.0);
  EXPECT_EQ(score::predicate_score(v({1, 0}), expr, score::Polarity::kCheckerFlagsDesirable, 0.3), 1.0);
}

TEST(Predicate, GrammarCoverage) {
  const auto e = score::PredicateExpr::parse("NOT (abs(s[1]) <= 1.57) or s[0] >= 2 AND s[3] < -0.5");
  EXPECT_EQ(e.max_index(), 3);
  EXPECT_TRUE(e.evaluate(v({0, 2.0, 0, 0})));
  EXPECT_FALSE(e.evaluate(v({0, 1.0, 0, 0})));
  EXPECT_TRUE(e.evaluate(v({2, 1.0, 0, -1})));
  EXPECT_FALSE(e.evaluate(v({2, 1.0, 0, 0})));
  EXPECT_THROW(e.evaluate(v({0, 0})), InvalidArgument);
  EXPECT_THROW(e.check_dim(3), InvalidArgument);
  EXPECT_NO_THROW(e.check_dim(4));
}

TEST(Predicate, MalformedTextIsRejected) {
  for (const char* bad : {"", "s[0] >", "s[0] == 1", "x > 1", "s[0] > 1 and", "(s[0] > 1", "abs(s[0] > 1"}) {
    EXPECT_THROW(score::PredicateExpr::parse(bad), ScoreSpecError) << bad;
  }
}

TEST(NoiseScore, ZeroNoiseIsIdentityAndFullNoiseAlwaysFlips) {
  auto base = std::make_unique<Alternating>();
  auto* raw = base.get();
  auto same = score::with_noise(std::move(base), 0.0, core::Rng(1));
  const Vec s = v({0, 0});
  for (int i = 0; i < 10; ++i) EXPECT_EQ((*same)(score::ScoreQuery(s)), i % 2 == 0 ? 1.0 : 0.2);
  EXPECT_EQ(raw->calls, 10);
  auto flip = score::with_noise(std::make_unique<Alternating>(), 1.0, core::Rng(1));
  for (int i = 0; i < 10; ++i) EXPECT_EQ((*flip)(score::ScoreQuery(s)), i % 2 == 0 ? 0.2 : 1.0);
}

TEST(NoiseScore, FlipRateMatchesB) {
  score::NoiseScore f(std::make_unique<Alternating>(), 0.3, core::Rng(77));
  const Vec s = v({0, 0});
  const int n = 20000;
  for (int i = 0; i < n; ++i) f(score::ScoreQuery(s));
  // Binomial standard deviation is sqrt(0.21 / n) ~ 0.0032; allow five of them.
  EXPECT_NEAR(static_cast<double>(f.flips()) / n, 0.3, 0.016);
}

TEST(NoiseScore, RejectsNonBinaryBase) {
  EXPECT_THROW(score::with_noise(std::make_unique<score::ConstantScore>(1.0), 0.1, core::Rng(0)), ScoreSpecError);
  EXPECT_THROW(score::with_noise(std::make_unique<Alternating>(), 1.5, core::Rng(0)), InvalidArgument);
}

TEST(SkipScore, HoldsValueBetweenQueries) {
  auto base = std::make_unique<Alternating>();
  auto* raw = base.get();
  score::SkipScore f(std::move(base), 3);
  const Vec s = v({0, 0});
  std::vector<double> out;
  for (int i = 0; i < 7; ++i) out.push_back(f(score::ScoreQuery(s)));
  EXPECT_EQ(out, (std::vector<double>{1, 1, 1, 0.2, 0.2, 0.2, 1}));
  EXPECT_EQ(raw->calls, 3);
  f.reset();
  f(score::ScoreQuery(s));
  EXPECT_EQ(raw->calls, 4);
}

TEST(SkipScore, QueriesCeilTOverN) {
  for (int n : {1, 2, 5, 7}) {
    score::SkipScore f(std::make_unique<Alternating>(), n);
    const Vec s = v({0, 0});
    for (int t = 0; t < 200; ++t) f(score::ScoreQuery(s));
    EXPECT_EQ(f.fresh_calls(), static_cast<std::uint64_t>((200 + n - 1) / n));
  }
}

TEST(ScoreConfig, ValidationAndJsonRoundTrip) {
  score::ScoreConfig c;
  c.mode = score::ScoreMode::kBinary;
  c.alpha = 0.5;
  c.intentions = {kColour};
  c.skip_n = 4;
  c.noise_b = 0.25;
  EXPECT_NO_THROW(c.validate());
  const auto back = nlohmann::json(c).get<score::ScoreConfig>();
  EXPECT_EQ(back.mode, c.mode);
  EXPECT_EQ(back.alpha, 0.5);
  EXPECT_EQ(back.intentions.at(0).undesirable, "ground is orange");
  EXPECT_EQ(back.skip_n, 4);
  EXPECT_EQ(back.noise_b, 0.25);

  auto bad = c;
  bad.alpha = 1.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = c;
  bad.intentions.clear();
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = c;
  bad.skip_n = 0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = c;
  bad.mode = score::ScoreMode::kSoftmax;
  EXPECT_THROW(bad.validate(), ScoreSpecError);
}

TEST(ScoreQuery, FrameIsRenderedLazilyOnce) {
  int renders = 0;
  const Vec s = v({1, 2});
  score::ScoreQuery q(s, [&] {
    ++renders;
    return core::Image::filled(1, 1, 1);
  });
  EXPECT_EQ(renders, 0);
  q.frame();
  q.frame();
  EXPECT_EQ(renders, 1);
  EXPECT_THROW(score::ScoreQuery(s).frame(), InvalidArgument);
}

TEST(MakeScorer, PredicateNeedsNoEmbedder) {
  score::ScoreConfig c;
  c.mode = score::ScoreMode::kPredicate;
  c.predicate = "s[0] > 0";
  c.alpha = 0.1;
  auto f = score::make_scorer(c, nullptr, 2, core::Rng(0));
  EXPECT_EQ((*f)(score::ScoreQuery(v({1, 0}))), 0.1);
  c.predicate = "s[5] > 0";
  EXPECT_THROW(score::make_scorer(c, nullptr, 2, core::Rng(0)), InvalidArgument);
  c.mode = score::ScoreMode::kBinary;
  c.intentions = {kColour};
  EXPECT_THROW(score::make_scorer(c, nullptr, 2, core::Rng(0)), InvalidArgument);
}

TEST(BuildPrompt, ContainsAllPartsAndRejectsEmpty) {
  const auto p = score::build_prompt("ENV", "DOC", "REQ");
  EXPECT_NE(p.find("ENV"), std::string::npos);
  EXPECT_NE(p.find("DOC"), std::string::npos);
  EXPECT_NE(p.find("REQ"), std::string::npos);
  EXPECT_THROW(score::build_prompt("ENV", "", "REQ"), InvalidArgument);
}
