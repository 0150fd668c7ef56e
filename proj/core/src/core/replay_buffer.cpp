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

#include "fog/core/replay_buffer.hpp"

#include <algorithm>

#include "fog/core/errors.hpp"

namespace fog::core {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw InvalidArgument("replay buffer capacity must be positive");
  ring_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayBuffer::push(Transition t) {
  t.validate();
  if (size_ < capacity_) {
    ring_.push_back(std::move(t));
    ++size_;
    return;
  }
  ring_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
  if (size_ == 0) throw EmptyBufferError();
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = rng.index(size_);
  return idx;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i : sample_indices(n, rng)) out.push_back(at(i));
  return out;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw InvalidArgument("replay buffer index out of range");
  return ring_[(head_ + i) % size_];
}

void ReplayBuffer::clear() {
  ring_.clear();
  head_ = 0;
  size_ = 0;
}

void write_state(ByteWriter& out, const State& s) {
  out.put<std::uint8_t>(static_cast<std::uint8_t>(s.kind()));
  if (s.is_vector()) {
    out.put_vector(s.vec());
  } else {
    out.put_bytes(s.img().bytes().data(), Image::kBytes);
  }
}

State read_state(ByteReader& in) {
  const auto kind = static_cast<StateKind>(in.get<std::uint8_t>());
  if (kind == StateKind::kVector) return State::vector(in.get_vector());
  std::vector<std::uint8_t> px(Image::kBytes);
  in.get_bytes(px.data(), px.size());
  return State::image(Image(std::move(px)));
}

void ReplayBuffer::save(ByteWriter& out) const {
  out.put<std::uint64_t>(capacity_);
  out.put<std::uint64_t>(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    const Transition& t = at(i);
    write_state(out, t.s);
    out.put_vector(t.action);
    write_state(out, t.s_next);
    out.put_vector(t.z.z());
    out.put<double>(t.score);
    out.put<std::uint8_t>(t.done ? 1 : 0);
  }
}

ReplayBuffer ReplayBuffer::load(ByteReader& in) {
  ReplayBuffer buf(in.get<std::uint64_t>());
  const auto n = in.get<std::uint64_t>();
  for (std::uint64_t i = 0; i < n; ++i) {
    Transition t;
    t.s = read_state(in);
    t.action = in.get_vector();
    t.s_next = read_state(in);
    t.z = Skill(in.get_vector());
    t.score = in.get<double>();
    t.done = in.get<std::uint8_t>() != 0;
    buf.push(std::move(t));
  }
  return buf;
}

}  // namespace fog::core
