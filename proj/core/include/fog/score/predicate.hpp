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

#include <memory>
#include <string>

#include "fog/core/types.hpp"

namespace fog::score {

/// Boolean checker over a state vector.
///
///   expr := term (OR term)*
///   term := factor (AND factor)*
///   factor := NOT factor | '(' expr ')' | cmp
///   cmp := fn '(' s '[' i ']' ')' op number | s '[' i ']' op number
///   fn := id | abs        op := < | > | <= | >=
///
/// Keywords are case-insensitive.
class PredicateExpr {
 public:
  struct Node;

  PredicateExpr() = default;
  /// Throws ScoreSpecError with the offending position on malformed text.
  static PredicateExpr parse(const std::string& text);

  /// Throws InvalidArgument when the expression reads past the end of `s`.
  bool evaluate(const core::Vec& s) const;

  /// Largest state index referenced, or -1 for an empty expression.
  int max_index() const noexcept { return max_index_; }
  /// Throws InvalidArgument when max_index() >= state_dim.
  void check_dim(int state_dim) const;

  const std::string& text() const noexcept { return text_; }
  bool empty() const noexcept { return root_ == nullptr; }

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  int max_index_ = -1;
};

}  // namespace fog::score
