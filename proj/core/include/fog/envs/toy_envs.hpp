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

#include <array>
#include <string>
#include <vector>

#include "fog/envs/env.hpp"

namespace fog::envs {

inline constexpr double kWorldBound = 15.0;
inline constexpr double kFlipThreshold = 1.57;

/// Point mass on the plane [-15, 15]^2. State (x, y); action is a velocity command.
class PointRoom final : public Env {
 public:
  static constexpr double kStepSize = 0.1;

  PointRoom();

  const EnvSpec& spec() const noexcept override { return spec_; }
  core::State reset(std::uint64_t seed = 0) override;
  StepResult step(const Vec& action) override;
  core::State state() const override;
  core::Image render() const override { return render(pos_); }
  Eigen::Vector2d position() const override { return pos_; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<PointRoom>(*this); }
  Vec observation_scale() const override;
  std::string task_description() const override;
  std::string state_space_doc() const override;

  /// Floor tint follows the agent: blue at x = -15, orange at x = +15, y shifts green.
  static core::Image render(const Eigen::Vector2d& pos);
  /// Background tint used by render() for a given position.
  static std::array<std::uint8_t, 3> floor_color(double x, double y);

 private:
  EnvSpec spec_;
  Eigen::Vector2d pos_ = Eigen::Vector2d::Zero();
};

/// Cart with a free-spinning tip. State (x, theta, omega, v); action (cart accel, tip torque).
class TipCart final : public Env {
 public:
  static constexpr double kCartAccel = 0.05;
  static constexpr double kTipAccel = 0.2;
  static constexpr double kDt = 0.1;

  struct Physics {
    double x = 0.0, theta = 0.0, omega = 0.0, v = 0.0;
  };

  TipCart();

  const EnvSpec& spec() const noexcept override { return spec_; }
  core::State reset(std::uint64_t seed = 0) override;
  StepResult step(const Vec& action) override;
  core::State state() const override;
  core::Image render() const override { return render(phys_); }
  Eigen::Vector2d position() const override { return {phys_.x, 0.0}; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<TipCart>(*this); }
  Vec observation_scale() const override;
  std::string task_description() const override;
  std::string state_space_doc() const override;

  const Physics& physics() const noexcept { return phys_; }
  /// Pure transition function used by step().
  static Physics advance(const Physics& p, double cart_cmd, double tip_cmd);
  static Physics from_state(const Vec& s);

  /// Ground tinted by x like PointRoom; a 10 px bar rotated by theta marks the tip.
  static core::Image render(const Physics& p);

 private:
  EnvSpec spec_;
  Physics phys_;
};

/// Wraps an angle into [-pi, pi).
double wrap_angle(double a);

/// True iff |theta| > 1.57 for a TipCart state vector.
bool is_flipped(const Vec& tipcart_state);

/// Conjunction of axis-aligned half-planes over the names x and y,
/// e.g. "x>0", "x<0 and y<0". The text "none" (or empty) is the empty region.
class Region {
 public:
  Region() = default;
  /// Throws InvalidArgument on malformed text.
  static Region parse(const std::string& text);

  bool contains(double x, double y) const;
  bool contains(const Eigen::Vector2d& p) const { return contains(p.x(), p.y()); }
  bool empty() const noexcept { return terms_.empty(); }
  const std::string& text() const noexcept { return text_; }

 private:
  struct Term {
    int axis;  // 0 = x, 1 = y
    char op;   // '<', '>', 'l' (<=), 'g' (>=)
    double value;
  };
  std::vector<Term> terms_;
  std::string text_ = "none";
};

/// Region test on a PointRoom state vector (x, y).
bool is_hazardous(const Vec& pointroom_state, const Region& region);

}  // namespace fog::envs
