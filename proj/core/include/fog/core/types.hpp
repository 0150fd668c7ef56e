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

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "fog/core/rng.hpp"

namespace fog::core {

using Vec = Eigen::VectorXd;

/// 64x64 RGB frame, row-major, interleaved channels.
class Image {
 public:
  static constexpr int kHeight = 64;
  static constexpr int kWidth = 64;
  static constexpr int kChannels = 3;
  static constexpr std::size_t kBytes = std::size_t{kHeight} * kWidth * kChannels;

  Image() : pixels_(kBytes, 0) {}
  /// Throws InvalidArgument unless bytes.size() == kBytes.
  explicit Image(std::vector<std::uint8_t> bytes);

  static Image filled(std::uint8_t r, std::uint8_t g, std::uint8_t b);

  std::uint8_t& at(int row, int col, int ch) {
    return pixels_[(static_cast<std::size_t>(row) * kWidth + col) * kChannels + ch];
  }
  std::uint8_t at(int row, int col, int ch) const {
    return pixels_[(static_cast<std::size_t>(row) * kWidth + col) * kChannels + ch];
  }
  void set(int row, int col, std::array<std::uint8_t, 3> rgb);

  const std::vector<std::uint8_t>& bytes() const noexcept { return pixels_; }

  bool operator==(const Image&) const = default;

 private:
  std::vector<std::uint8_t> pixels_;
};

enum class StateKind : std::uint8_t { kVector = 0, kImage = 1 };

/// Environment observation: a low-dimensional feature vector or a rendered frame.
class State {
 public:
  State() = default;
  /// Throws InvalidArgument on non-finite entries.
  static State vector(Vec v);
  static State image(Image img);

  StateKind kind() const noexcept { return kind_; }
  bool is_vector() const noexcept { return kind_ == StateKind::kVector; }
  bool is_image() const noexcept { return kind_ == StateKind::kImage; }

  /// Throws InvalidArgument if the state is not of the requested kind.
  const Vec& vec() const;
  const Image& img() const;

  bool operator==(const State& other) const;

 private:
  StateKind kind_ = StateKind::kVector;
  Vec vec_;
  std::optional<Image> img_;
};

/// Unit-norm skill latent.
class Skill {
 public:
  static constexpr double kNormTolerance = 1e-6;

  Skill() = default;
  /// Validates ||z|| = 1 within kNormTolerance.
  explicit Skill(Vec z);
  /// Normalizes z; throws InvalidArgument for a zero or non-finite vector.
  static Skill normalized(const Vec& z);

  const Vec& z() const noexcept { return z_; }
  int dim() const noexcept { return static_cast<int>(z_.size()); }

  bool operator==(const Skill& other) const { return z_ == other.z_; }

 private:
  Vec z_;
};

struct Transition {
  State s;
  Vec action;
  State s_next;
  Skill z;
  double score = 1.0;
  bool done = false;

  /// Throws InvalidArgument unless score in [0,1], actions in [-1,1], all finite.
  void validate() const;
};

struct Trajectory {
  std::vector<State> states;  // T + 1 entries
  std::vector<Vec> actions;   // T entries
  std::vector<double> scores; // score of states[t + 1], T entries
  Skill z;

  std::size_t length() const noexcept { return actions.size(); }
};

/// Standard-normal draw of dimension `dim`, normalized to unit length.
Skill sample_skill(int dim, Rng& rng);

}  // namespace fog::core
