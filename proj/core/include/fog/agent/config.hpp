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
#include <nlohmann/json.hpp>
#include <string>

#include "fog/dsd/dsd.hpp"
#include "fog/embed/embedder.hpp"
#include "fog/score/score.hpp"

namespace fog::agent {

enum class Method { kFog, kMetra, kLsd, kMetraPlus, kFrSac };

std::string to_string(Method m);
Method method_from_string(const std::string& s);
/// Metric implied by a method (fr_sac reports temporal but never uses it).
dsd::MetricKind default_metric(Method m);

enum class ObsMode { kState, kPixels };

/// Training run description. JSON keys mirror the field names.
struct TrainConfig {
  Method method = Method::kFog;
  std::string env = "pointroom";
  int skill_dim = 2;
  int epochs = 300;
  int episodes_per_epoch = 8;
  int gradient_steps_per_epoch = 50;
  int batch_size = 256;
  std::uint64_t seed = 0;
  double discount = 0.99;
  score::ScoreConfig score;
  dsd::MetricKind metric = dsd::MetricKind::kScore;

  ObsMode obs_mode = ObsMode::kState;
  int hidden_width = 256;
  std::size_t buffer_capacity = 100'000;
  double phi_lr = 1e-4;
  double dual_lr = 1e-4;
  double sac_lr = 3e-4;
  double alpha_lr = 1e-3;
  double epsilon = 1e-3;
  dsd::SlackForm slack_form = dsd::SlackForm::kSquared;
  double init_lambda = 30.0;
  double init_alpha = 1.0;
  int checkpoint_every = 50;
  embed::EmbedderConfig embedder;

  /// Field ranges plus method/metric consistency. Throws InvalidArgument.
  void validate() const;
  /// Default config for a method: metric follows the method.
  static TrainConfig for_method(Method m);

  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; a missing "metric" follows "method".
  static TrainConfig from_json(const nlohmann::json& j);
  static TrainConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// FNV-1a of the canonical JSON dump.
  std::uint64_t hash() const;
};

}  // namespace fog::agent
