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

#include <stdexcept>
#include <string>

namespace fog {

/// Contract violation by the caller (bad shape, out-of-range value, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyBufferError : public std::runtime_error {
 public:
  EmptyBufferError() : std::runtime_error("replay buffer is empty") {}
};

class EpisodeFinishedError : public std::logic_error {
 public:
  EpisodeFinishedError() : std::logic_error("step() called after the episode finished; call reset()") {}
};

/// Failure talking to a remote embedding service.
class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, bool retriable)
      : std::runtime_error(what), retriable_(retriable) {}
  bool retriable() const noexcept { return retriable_; }

 private:
  bool retriable_;
};

/// Malformed score-function setup (bad predicate text, invalid wrapper use).
class ScoreSpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedMetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a loss or gradient becomes non-finite.
class TrainingDivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fog
