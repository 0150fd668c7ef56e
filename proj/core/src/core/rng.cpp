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

#include "fog/core/rng.hpp"

#include <sstream>

#include "fog/core/errors.hpp"

namespace fog::core {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

double Rng::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double Rng::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Rng::normal() { return normal_(engine_); }

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw InvalidArgument("Rng::index requires n > 0");
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

std::uint64_t Rng::next_u64() { return engine_(); }

Rng Rng::fork(std::uint64_t stream) const {
  return Rng(mix_seed(seed_ ^ mix_seed(stream + 0x5851f42d4c957f2dULL)));
}

std::string Rng::serialize() const {
  std::ostringstream os;
  os << seed_ << ' ' << engine_ << ' ' << normal_;
  return os.str();
}

void Rng::deserialize(const std::string& text) {
  std::istringstream is(text);
  is >> seed_ >> engine_ >> normal_;
  if (!is) throw InvalidArgument("Rng::deserialize: malformed state");
}

bool Rng::operator==(const Rng& other) const {
  return seed_ == other.seed_ && engine_ == other.engine_ && normal_ == other.normal_;
}

}  // namespace fog::core
