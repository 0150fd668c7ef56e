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

#include "fog/agent/config.hpp"

#include <fstream>

#include "fog/core/binary_io.hpp"
#include "fog/core/errors.hpp"
#include "fog/envs/env.hpp"

namespace fog::agent {

std::string to_string(Method m) {
  switch (m) {
    case Method::kFog: return "fog";
    case Method::kMetra: return "metra";
    case Method::kLsd: return "lsd";
    case Method::kMetraPlus: return "metra_plus";
    case Method::kFrSac: return "fr_sac";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  for (auto m : {Method::kFog, Method::kMetra, Method::kLsd, Method::kMetraPlus, Method::kFrSac}) {
    if (to_string(m) == s) return m;
  }
  throw InvalidArgument("unknown method '" + s + "' (expected fog, metra, lsd, metra_plus or fr_sac)");
}

dsd::MetricKind default_metric(Method m) {
  switch (m) {
    case Method::kFog:
    case Method::kMetraPlus: return dsd::MetricKind::kScore;
    case Method::kLsd: return dsd::MetricKind::kEuclidean;
    case Method::kMetra:
    case Method::kFrSac: return dsd::MetricKind::kTemporal;
  }
  return dsd::MetricKind::kTemporal;
}

TrainConfig TrainConfig::for_method(Method m) {
  TrainConfig c;
  c.method = m;
  c.metric = default_metric(m);
  return c;
}

void TrainConfig::validate() const {
  envs::env_spec(env);  // throws on unknown names
  if (skill_dim < 1) throw InvalidArgument("skill_dim must be >= 1");
  if (epochs < 0) throw InvalidArgument("epochs must be >= 0");
  if (episodes_per_epoch < 1) throw InvalidArgument("episodes_per_epoch must be >= 1");
  if (gradient_steps_per_epoch < 0) throw InvalidArgument("gradient_steps_per_epoch must be >= 0");
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (!(discount >= 0.0 && discount < 1.0)) throw InvalidArgument("discount must lie in [0, 1)");
  if (hidden_width < 1) throw InvalidArgument("hidden_width must be >= 1");
  if (buffer_capacity < 1) throw InvalidArgument("buffer_capacity must be >= 1");
  if (!(phi_lr > 0 && dual_lr > 0 && sac_lr > 0 && alpha_lr > 0)) throw InvalidArgument("learning rates must be positive");
  if (!(epsilon > 0)) throw InvalidArgument("epsilon must be positive");
  if (!(init_lambda > 0 && init_alpha > 0)) throw InvalidArgument("initial lambda and alpha must be positive");
  if (checkpoint_every < 0) throw InvalidArgument("checkpoint_every must be >= 0");
  score.validate();

  if (method != Method::kFrSac && metric != default_metric(method)) {
    throw InvalidArgument("method " + to_string(method) + " requires the " + dsd::to_string(default_metric(method)) +
                          " metric, got " + dsd::to_string(metric));
  }
  if (method == Method::kMetraPlus && score.mode != score::ScoreMode::kPredicate) {
    throw InvalidArgument("metra_plus needs a predicate score");
  }
  if (method == Method::kLsd && obs_mode == ObsMode::kPixels) {
    throw UnsupportedMetricError("the euclidean metric is undefined on pixel observations");
  }
  if (score.mode != score::ScoreMode::kConstant && score.mode != score::ScoreMode::kPredicate) embedder.validate();
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json emb{{"kind", embedder.kind == embed::EmbedderKind::kRemote ? "remote" : "mock"},
                     {"endpoint", embedder.endpoint},
                     {"batch_size", embedder.batch_size},
                     {"timeout_s", embedder.timeout_s},
                     {"cache_capacity", embedder.cache_capacity}};
  return nlohmann::json{{"method", agent::to_string(method)},
                        {"env", env},
                        {"skill_dim", skill_dim},
                        {"epochs", epochs},
                        {"episodes_per_epoch", episodes_per_epoch},
                        {"gradient_steps_per_epoch", gradient_steps_per_epoch},
                        {"batch_size", batch_size},
                        {"seed", seed},
                        {"discount", discount},
                        {"score", score},
                        {"metric", {{"kind", dsd::to_string(metric)}}},
                        {"obs_mode", obs_mode == ObsMode::kPixels ? "pixels" : "state"},
                        {"hidden_width", hidden_width},
                        {"buffer_capacity", buffer_capacity},
                        {"phi_lr", phi_lr},
                        {"dual_lr", dual_lr},
                        {"sac_lr", sac_lr},
                        {"alpha_lr", alpha_lr},
                        {"epsilon", epsilon},
                        {"slack_form", dsd::to_string(slack_form)},
                        {"init_lambda", init_lambda},
                        {"init_alpha", init_alpha},
                        {"checkpoint_every", checkpoint_every},
                        {"embedder", emb}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  try {
    TrainConfig c;
    if (j.contains("method")) c.method = method_from_string(j.at("method").get<std::string>());
    c.metric = default_metric(c.method);
    c.env = j.value("env", c.env);
    c.skill_dim = j.value("skill_dim", c.skill_dim);
    c.epochs = j.value("epochs", c.epochs);
    c.episodes_per_epoch = j.value("episodes_per_epoch", c.episodes_per_epoch);
    c.gradient_steps_per_epoch = j.value("gradient_steps_per_epoch", c.gradient_steps_per_epoch);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.seed = j.value("seed", c.seed);
    c.discount = j.value("discount", c.discount);
    if (j.contains("score")) c.score = j.at("score").get<score::ScoreConfig>();
    if (j.contains("metric")) {
      const auto& m = j.at("metric");
      c.metric = dsd::metric_kind_from_string(m.is_string() ? m.get<std::string>() : m.at("kind").get<std::string>());
    }
    if (j.contains("obs_mode")) {
      const auto mode = j.at("obs_mode").get<std::string>();
      if (mode != "state" && mode != "pixels") throw InvalidArgument("obs_mode must be state or pixels");
      c.obs_mode = mode == "pixels" ? ObsMode::kPixels : ObsMode::kState;
    }
    c.hidden_width = j.value("hidden_width", c.hidden_width);
    c.buffer_capacity = j.value("buffer_capacity", c.buffer_capacity);
    c.phi_lr = j.value("phi_lr", c.phi_lr);
    c.dual_lr = j.value("dual_lr", c.dual_lr);
    c.sac_lr = j.value("sac_lr", c.sac_lr);
    c.alpha_lr = j.value("alpha_lr", c.alpha_lr);
    c.epsilon = j.value("epsilon", c.epsilon);
    if (j.contains("slack_form")) c.slack_form = dsd::slack_form_from_string(j.at("slack_form").get<std::string>());
    c.init_lambda = j.value("init_lambda", c.init_lambda);
    c.init_alpha = j.value("init_alpha", c.init_alpha);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    if (j.contains("embedder")) {
      const auto& e = j.at("embedder");
      const auto kind = e.value("kind", std::string("mock"));
      if (kind != "mock" && kind != "remote") throw InvalidArgument("embedder.kind must be mock or remote");
      c.embedder.kind = kind == "remote" ? embed::EmbedderKind::kRemote : embed::EmbedderKind::kMock;
      c.embedder.endpoint = e.value("endpoint", c.embedder.endpoint);
      c.embedder.batch_size = e.value("batch_size", c.embedder.batch_size);
      c.embedder.timeout_s = e.value("timeout_s", c.embedder.timeout_s);
      c.embedder.cache_capacity = e.value("cache_capacity", c.embedder.cache_capacity);
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed training config: ") + e.what());
  }
}

TrainConfig TrainConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("config " + path.string() + " is not valid JSON: " + e.what());
  }
}

void TrainConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config " + path.string());
  out << to_json().dump(2) << '\n';
}

std::uint64_t TrainConfig::hash() const { return core::fnv1a(to_json().dump()); }

}  // namespace fog::agent
