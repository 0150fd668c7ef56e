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

#include "fog/core/types.hpp"

#include <cmath>
#include <string>

#include "fog/core/errors.hpp"

namespace fog::core {

Image::Image(std::vector<std::uint8_t> bytes) : pixels_(std::move(bytes)) {
  if (pixels_.size() != kBytes) {
    throw InvalidArgument("image must be 64x64x3 (" + std::to_string(kBytes) + " bytes), got " +
                          std::to_string(pixels_.size()));
  }
}

Image Image::filled(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Image img;
  for (std::size_t i = 0; i < kBytes; i += 3) {
    img.pixels_[i] = r;
    img.pixels_[i + 1] = g;
    img.pixels_[i + 2] = b;
  }
  return img;
}

void Image::set(int row, int col, std::array<std::uint8_t, 3> rgb) {
  if (row < 0 || row >= kHeight || col < 0 || col >= kWidth) return;
  for (int c = 0; c < 3; ++c) at(row, col, c) = rgb[c];
}

State State::vector(Vec v) {
  if (!v.allFinite()) throw InvalidArgument("state vector has non-finite entries");
  State s;
  s.kind_ = StateKind::kVector;
  s.vec_ = std::move(v);
  return s;
}

State State::image(Image img) {
  State s;
  s.kind_ = StateKind::kImage;
  s.img_ = std::move(img);
  return s;
}

const Vec& State::vec() const {
  if (kind_ != StateKind::kVector) throw InvalidArgument("state is an image, not a vector");
  return vec_;
}

const Image& State::img() const {
  if (kind_ != StateKind::kImage) throw InvalidArgument("state is a vector, not an image");
  return *img_;
}

bool State::operator==(const State& other) const {
  if (kind_ != other.kind_) return false;
  return kind_ == StateKind::kVector ? vec_ == other.vec_ : *img_ == *other.img_;
}

Skill::Skill(Vec z) : z_(std::move(z)) {
  if (z_.size() == 0 || !z_.allFinite() || std::abs(z_.norm() - 1.0) > kNormTolerance) {
    throw InvalidArgument("skill must be a finite unit-norm vector");
  }
}

Skill Skill::normalized(const Vec& z) {
  const double n = z.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("cannot normalize a zero/non-finite skill");
  return Skill(z / n);
}

void Transition::validate() const {
  if (!(score >= 0.0 && score <= 1.0)) throw InvalidArgument("transition score must lie in [0,1]");
  if (action.size() == 0 || !action.allFinite() || action.cwiseAbs().maxCoeff() > 1.0) {
    throw InvalidArgument("transition action must be finite and inside [-1,1]");
  }
  if (z.dim() == 0) throw InvalidArgument("transition has no skill");
  if (s.kind() != s_next.kind()) throw InvalidArgument("transition mixes state kinds");
}

Skill sample_skill(int dim, Rng& rng) {
  if (dim < 1) throw InvalidArgument("skill dimension must be >= 1");
  Vec z(dim);
  // A draw of all zeros has probability zero but would be fatal; redraw.
  do {
    for (int i = 0; i < dim; ++i) z[i] = rng.normal();
  } while (z.norm() == 0.0);
  return Skill(z / z.norm());
}

}  // namespace fog::core
