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

#include "fog/score/predicate.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "fog/core/errors.hpp"

namespace fog::score {

struct PredicateExpr::Node {
  enum class Kind { kCmp, kAnd, kOr, kNot } kind;
  // kCmp
  bool use_abs = false;
  int index = 0;
  char op = '<';  // '<', '>', 'l' (<=), 'g' (>=)
  double value = 0.0;
  // composites
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = PredicateExpr::Node;
using NodePtr = std::shared_ptr<const Node>;

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr parse() {
    NodePtr root = parse_or();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return root;
  }

  int max_index = -1;

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ScoreSpecError("predicate parse error at column " + std::to_string(pos_ + 1) + ": " + msg + " in '" +
                         text_ + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek_char(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek_char(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  // Case-insensitive keyword match that must end at a non-identifier character.
  bool accept_keyword(const char* kw) {
    skip_ws();
    std::size_t n = 0;
    while (kw[n]) {
      if (pos_ + n >= text_.size() ||
          std::tolower(static_cast<unsigned char>(text_[pos_ + n])) != kw[n]) {
        return false;
      }
      ++n;
    }
    if (pos_ + n < text_.size()) {
      const char next = text_[pos_ + n];
      if (std::isalnum(static_cast<unsigned char>(next)) || next == '_') return false;
    }
    pos_ += n;
    return true;
  }

  NodePtr parse_or() {
    NodePtr lhs = parse_and();
    while (accept_keyword("or")) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::kOr;
      n->lhs = lhs;
      n->rhs = parse_and();
      lhs = n;
    }
    return lhs;
  }

  NodePtr parse_and() {
    NodePtr lhs = parse_factor();
    while (accept_keyword("and")) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::kAnd;
      n->lhs = lhs;
      n->rhs = parse_factor();
      lhs = n;
    }
    return lhs;
  }

  NodePtr parse_factor() {
    if (accept_keyword("not")) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::kNot;
      n->lhs = parse_factor();
      return n;
    }
    if (peek_char('(')) {
      ++pos_;
      NodePtr inner = parse_or();
      expect(')');
      return inner;
    }
    return parse_cmp();
  }

  NodePtr parse_cmp() {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::kCmp;
    bool wrapped = false;
    if (accept_keyword("abs")) {
      n->use_abs = true;
      wrapped = true;
    } else if (accept_keyword("id")) {
      wrapped = true;
    }
    if (wrapped) expect('(');
    if (!accept_keyword("s")) fail("expected s[i]");
    expect('[');
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a non-negative integer index");
    n->index = std::stoi(text_.substr(start, pos_ - start));
    max_index = std::max(max_index, n->index);
    expect(']');
    if (wrapped) expect(')');

    skip_ws();
    if (pos_ >= text_.size()) fail("expected a comparison operator");
    const char c = text_[pos_];
    if (c != '<' && c != '>') fail("expected one of <, >, <=, >=");
    ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '=') {
      n->op = c == '<' ? 'l' : 'g';
      ++pos_;
    } else {
      n->op = c;
    }

    skip_ws();
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    n->value = std::strtod(begin, &end);
    if (end == begin) fail("expected a numeric constant");
    if (!std::isfinite(n->value)) fail("constant must be finite");
    pos_ += static_cast<std::size_t>(end - begin);
    return n;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

bool eval_node(const Node& n, const core::Vec& s) {
  switch (n.kind) {
    case Node::Kind::kAnd: return eval_node(*n.lhs, s) && eval_node(*n.rhs, s);
    case Node::Kind::kOr: return eval_node(*n.lhs, s) || eval_node(*n.rhs, s);
    case Node::Kind::kNot: return !eval_node(*n.lhs, s);
    case Node::Kind::kCmp: break;
  }
  const double v = n.use_abs ? std::abs(s[n.index]) : s[n.index];
  switch (n.op) {
    case '<': return v < n.value;
    case '>': return v > n.value;
    case 'l': return v <= n.value;
    default: return v >= n.value;
  }
}

}  // namespace

PredicateExpr PredicateExpr::parse(const std::string& text) {
  Parser p(text);
  PredicateExpr e;
  e.root_ = p.parse();
  e.text_ = text;
  e.max_index_ = p.max_index;
  return e;
}

bool PredicateExpr::evaluate(const core::Vec& s) const {
  if (!root_) throw ScoreSpecError("evaluating an empty predicate");
  if (max_index_ >= s.size()) {
    throw InvalidArgument("predicate reads s[" + std::to_string(max_index_) + "] but the state has " +
                          std::to_string(s.size()) + " entries");
  }
  return eval_node(*root_, s);
}

void PredicateExpr::check_dim(int state_dim) const {
  if (max_index_ >= state_dim) {
    throw InvalidArgument("predicate '" + text_ + "' reads s[" + std::to_string(max_index_) +
                          "] but the state has " + std::to_string(state_dim) + " entries");
  }
}

}  // namespace fog::score
