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
#include <vector>

#include "fog/core/binary_io.hpp"
#include "fog/core/rng.hpp"
#include "fog/core/types.hpp"

namespace fog::core {

/// Fixed-capacity FIFO ring of transitions with uniform sampling.
///
/// Single writer. Concurrent sample() calls are safe as long as no push() runs,
/// and each caller brings its own Rng.
class ReplayBuffer {
 public:
  static constexpr std::size_t kDefaultCapacity = 100'000;

  explicit ReplayBuffer(std::size_t capacity = kDefaultCapacity);

  /// Validates `t`, then appends it, evicting the oldest entry when full.
  void push(Transition t);

  /// `n` draws uniformly with replacement. Throws EmptyBufferError when empty.
  std::vector<Transition> sample(std::size_t n, Rng& rng) const;
  /// Index form of sample(); indices refer to at().
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;

  /// i-th oldest stored transition.
  const Transition& at(std::size_t i) const;

  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return capacity_; }
  bool empty() const noexcept { return size_ == 0; }
  void clear();

  void save(ByteWriter& out) const;
  static ReplayBuffer load(ByteReader& in);

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // slot of the oldest entry once full
  std::size_t size_ = 0;
  std::vector<Transition> ring_;
};

void write_state(ByteWriter& out, const State& s);
State read_state(ByteReader& in);

}  // namespace fog::core
