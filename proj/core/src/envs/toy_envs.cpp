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

#include "fog/envs/toy_envs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fog/core/errors.hpp"

namespace fog::envs {

namespace {

constexpr int kGroundRow = 44;
constexpr std::array<std::uint8_t, 3> kSky{70, 150, 70};
constexpr std::array<std::uint8_t, 3> kWhite{255, 255, 255};
constexpr std::array<std::uint8_t, 3> kFlippedBar{230, 40, 40};

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

Vec clip_action(const Vec& action, int dim) {
  if (action.size() != dim) {
    throw InvalidArgument("action has dimension " + std::to_string(action.size()) + ", expected " +
                          std::to_string(dim));
  }
  if (!action.allFinite()) throw InvalidArgument("action has non-finite entries");
  return action.cwiseMax(-1.0).cwiseMin(1.0);
}

int world_to_pixel(double w) {
  return static_cast<int>(std::lround((w + kWorldBound) / (2.0 * kWorldBound) * (core::Image::kWidth - 4)));
}

}  // namespace

double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  return a - kTwoPi * std::floor((a + std::numbers::pi) / kTwoPi);
}

// ---------------------------------------------------------------------------
// PointRoom

PointRoom::PointRoom() : spec_{"pointroom", 2, 2, 200, true} {}

core::State PointRoom::reset(std::uint64_t) {
  pos_.setZero();
  t_ = 0;
  return state();
}

StepResult PointRoom::step(const Vec& action) {
  if (finished()) throw EpisodeFinishedError();
  const Vec a = clip_action(action, spec_.action_dim);
  pos_ = (pos_ + kStepSize * a).cwiseMax(-kWorldBound).cwiseMin(kWorldBound);
  ++t_;
  return {state(), finished()};
}

core::State PointRoom::state() const { return core::State::vector(Vec(pos_)); }

Vec PointRoom::observation_scale() const { return Vec::Constant(2, 1.0 / kWorldBound); }

std::string PointRoom::task_description() const {
  return "A point agent moves on a flat square floor spanning [-15, 15] in both x and y. "
         "Each step the agent chooses a 2-D velocity command in [-1, 1]^2 and moves by 0.1 times "
         "that command; positions are clipped at the walls. Episodes last 200 steps and always "
         "start at [0, 0]. The floor is tinted blue on the left (west) and orange on the right (east).";
}

std::string PointRoom::state_space_doc() const {
  return "State s is a length-2 vector: s[0] is the x-coordinate (east is positive), "
         "s[1] is the y-coordinate (north is positive). Action a is a length-2 vector "
         "of velocity commands along x and y.";
}

std::array<std::uint8_t, 3> PointRoom::floor_color(double x, double y) {
  const double t = std::clamp((x + kWorldBound) / (2.0 * kWorldBound), 0.0, 1.0);
  const double green = 128.0 * t + 20.0 * std::clamp(y / kWorldBound, -1.0, 1.0);
  return {to_byte(255.0 * t), to_byte(green), to_byte(255.0 * (1.0 - t))};
}

core::Image PointRoom::render(const Eigen::Vector2d& pos) {
  const auto bg = floor_color(pos.x(), pos.y());
  core::Image img = core::Image::filled(bg[0], bg[1], bg[2]);
  const int col = world_to_pixel(pos.x());
  const int row = world_to_pixel(-pos.y());
  for (int r = row; r < row + 4; ++r) {
    for (int c = col; c < col + 4; ++c) img.set(r, c, kWhite);
  }
  return img;
}

// ---------------------------------------------------------------------------
// TipCart

TipCart::TipCart() : spec_{"tipcart", 4, 2, 200, true} {}

core::State TipCart::reset(std::uint64_t) {
  phys_ = Physics{};
  t_ = 0;
  return state();
}

TipCart::Physics TipCart::advance(const Physics& p, double cart_cmd, double tip_cmd) {
  Physics n;
  n.v = std::clamp(p.v + kCartAccel * cart_cmd, -1.0, 1.0);
  n.x = std::clamp(p.x + kDt * n.v, -kWorldBound, kWorldBound);
  n.omega = std::clamp(p.omega + kTipAccel * tip_cmd, -1.0, 1.0);
  n.theta = wrap_angle(p.theta + kDt * n.omega);
  return n;
}

TipCart::Physics TipCart::from_state(const Vec& s) {
  if (s.size() != 4) throw InvalidArgument("tipcart state must have 4 entries");
  return Physics{s[0], s[1], s[2], s[3]};
}

StepResult TipCart::step(const Vec& action) {
  if (finished()) throw EpisodeFinishedError();
  const Vec a = clip_action(action, spec_.action_dim);
  phys_ = advance(phys_, a[0], a[1]);
  ++t_;
  return {state(), finished()};
}

core::State TipCart::state() const {
  Vec s(4);
  s << phys_.x, phys_.theta, phys_.omega, phys_.v;
  return core::State::vector(std::move(s));
}

Vec TipCart::observation_scale() const {
  Vec s(4);
  s << 1.0 / kWorldBound, 1.0 / std::numbers::pi, 1.0, 1.0;
  return s;
}

std::string TipCart::task_description() const {
  return "A cart slides along a rail spanning x in [-15, 15] and carries a rigid tip that can spin "
         "freely around its base. Each step the agent chooses a 2-D command in [-1, 1]^2: the first "
         "entry accelerates the cart, the second applies torque to the tip. The tip angle starts at 0 "
         "(pointing straight up) and is wrapped to [-pi, pi]. Episodes last 200 steps.";
}

std::string TipCart::state_space_doc() const {
  return "State s is a length-4 vector: s[0] is the cart x-position, s[1] is the tip angle in "
         "radians (0 is upright, +-pi is upside down), s[2] is the tip angular velocity, s[3] is "
         "the cart velocity. Action a is a length-2 vector: a[0] cart acceleration command, a[1] "
         "tip torque command.";
}

core::Image TipCart::render(const Physics& p) {
  core::Image img = core::Image::filled(kSky[0], kSky[1], kSky[2]);
  const auto ground = PointRoom::floor_color(p.x, 0.0);
  for (int r = kGroundRow; r < core::Image::kHeight; ++r) {
    for (int c = 0; c < core::Image::kWidth; ++c) img.set(r, c, ground);
  }
  const bool flipped = std::abs(p.theta) > std::numbers::pi / 2.0;
  const auto color = flipped ? kFlippedBar : kWhite;
  const double dr = -std::cos(p.theta);
  const double dc = std::sin(p.theta);
  for (int i = 0; i < 10; ++i) {
    for (int w = -1; w <= 1; ++w) {
      const double r = kGroundRow + i * dr + w * dc;
      const double c = 32.0 + i * dc - w * dr;
      img.set(static_cast<int>(std::lround(r)), static_cast<int>(std::lround(c)), color);
    }
  }
  return img;
}

bool is_flipped(const Vec& tipcart_state) {
  if (tipcart_state.size() < 2) throw InvalidArgument("tipcart state must have at least 2 entries");
  return std::abs(tipcart_state[1]) > kFlipThreshold;
}

// ---------------------------------------------------------------------------
// Regions

Region Region::parse(const std::string& text) {
  Region region;
  std::string lowered;
  for (char ch : text) lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  // Normalize "&&" to " and ".
  for (std::size_t p; (p = lowered.find("&&")) != std::string::npos;) lowered.replace(p, 2, " and ");

  std::string trimmed = lowered;
  trimmed.erase(std::remove_if(trimmed.begin(), trimmed.end(), ::isspace), trimmed.end());
  if (trimmed.empty() || trimmed == "none") return region;

  std::vector<std::string> clauses;
  {
    std::size_t start = 0;
    while (true) {
      const std::size_t p = lowered.find(" and ", start);
      clauses.push_back(lowered.substr(start, p == std::string::npos ? std::string::npos : p - start));
      if (p == std::string::npos) break;
      start = p + 5;
    }
  }
  for (std::string clause : clauses) {
    clause.erase(std::remove_if(clause.begin(), clause.end(), ::isspace), clause.end());
    if (clause.size() < 3 || (clause[0] != 'x' && clause[0] != 'y')) {
      throw InvalidArgument("malformed region clause '" + clause + "' in '" + text + "'");
    }
    Term term{};
    term.axis = clause[0] == 'x' ? 0 : 1;
    std::size_t pos = 1;
    if (clause.compare(pos, 2, "<=") == 0) {
      term.op = 'l';
      pos += 2;
    } else if (clause.compare(pos, 2, ">=") == 0) {
      term.op = 'g';
      pos += 2;
    } else if (clause[pos] == '<' || clause[pos] == '>') {
      term.op = clause[pos];
      pos += 1;
    } else {
      throw InvalidArgument("region clause '" + clause + "' lacks a comparison operator");
    }
    const std::string number = clause.substr(pos);
    std::istringstream is(number);
    if (!(is >> term.value) || !is.eof()) {
      throw InvalidArgument("region clause '" + clause + "' has a malformed constant");
    }
    region.terms_.push_back(term);
  }
  region.text_ = text;
  return region;
}

bool Region::contains(double x, double y) const {
  if (terms_.empty()) return false;
  for (const Term& t : terms_) {
    const double v = t.axis == 0 ? x : y;
    bool ok = false;
    switch (t.op) {
      case '<': ok = v < t.value; break;
      case '>': ok = v > t.value; break;
      case 'l': ok = v <= t.value; break;
      case 'g': ok = v >= t.value; break;
    }
    if (!ok) return false;
  }
  return true;
}

bool is_hazardous(const Vec& pointroom_state, const Region& region) {
  if (pointroom_state.size() != 2) throw InvalidArgument("pointroom state must have 2 entries");
  return region.contains(pointroom_state[0], pointroom_state[1]);
}

// ---------------------------------------------------------------------------
// Registry

std::unique_ptr<Env> make_env(const std::string& name) {
  if (name == "pointroom") return std::make_unique<PointRoom>();
  if (name == "tipcart") return std::make_unique<TipCart>();
  throw InvalidArgument("unknown environment '" + name + "' (expected pointroom or tipcart)");
}

EnvSpec env_spec(const std::string& name) { return make_env(name)->spec(); }

core::Image render_state(const std::string& env_name, const Vec& state) {
  if (env_name == "pointroom") {
    if (state.size() != 2) throw InvalidArgument("pointroom state must have 2 entries");
    return PointRoom::render(Eigen::Vector2d(state[0], state[1]));
  }
  if (env_name == "tipcart") return TipCart::render(TipCart::from_state(state));
  throw InvalidArgument("unknown environment '" + env_name + "'");
}

Eigen::Vector2d position_of(const std::string& env_name, const Vec& state) {
  if (env_name == "pointroom") return {state[0], state[1]};
  if (env_name == "tipcart") return {state[0], 0.0};
  throw InvalidArgument("unknown environment '" + env_name + "'");
}

}  // namespace fog::envs
