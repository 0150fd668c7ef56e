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

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

namespace fog::core {

/// Seeded random source. Every stochastic component in the library takes one of
/// these explicitly; there is no global generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  /// Uniform integer in [0, n). Requires n > 0.
  std::size_t index(std::size_t n);
  std::uint64_t next_u64();

  /// Independent generator for a named sub-stream; does not advance *this.
  Rng fork(std::uint64_t stream) const;

  std::uint64_t seed() const noexcept { return seed_; }

  /// Full generator state (engine + cached normal), textual.
  std::string serialize() const;
  void deserialize(const std::string& text);

  bool operator==(const Rng& other) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// SplitMix64 finalizer, used to derive sub-stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace fog::core
