// Copyright 2026 The eqsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eqsched/pattern.h"

#include <algorithm>
#include <cctype>

#include "eqsched/ir.h"

namespace eqsched {

namespace {

class PatternParser {
 public:
  explicit PatternParser(std::string_view text) : text_(text) {}

  Pattern parse() {
    Pattern p = term();
    skip_space();
    if (pos_ != text_.size()) fail("trailing input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw Error("pattern '" + std::string(text_) + "' at offset " + std::to_string(pos_) +
                ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string atom() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')')
      ++pos_;
    if (start == pos_) fail("expected symbol");
    return std::string(text_.substr(start, pos_ - start));
  }

  Pattern term() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end");
    if (text_[pos_] != '(') {
      Pattern leaf{atom(), {}};
      if (!leaf.is_var()) fail("bare symbol '" + leaf.symbol + "' must be parenthesized");
      if (leaf.symbol.size() < 2) fail("empty variable name");
      return leaf;
    }
    ++pos_;
    Pattern p{atom(), {}};
    if (p.is_var()) fail("variable in operator position");
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) fail("missing ')'");
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      p.children.push_back(term());
    }
    return p;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void collect_vars(const Pattern& p, std::vector<std::string>& out) {
  if (p.is_var()) {
    if (std::find(out.begin(), out.end(), p.var_name()) == out.end()) out.push_back(p.var_name());
    return;
  }
  for (const auto& c : p.children) collect_vars(c, out);
}

}  // namespace

std::string Pattern::str() const {
  if (is_var()) return symbol;
  std::string s = "(" + symbol;
  for (const auto& c : children) s += " " + c.str();
  return s + ")";
}

std::vector<std::string> Pattern::vars() const {
  std::vector<std::string> out;
  collect_vars(*this, out);
  return out;
}

std::size_t Pattern::op_count() const {
  if (is_var()) return 0;
  std::size_t n = 1;
  for (const auto& c : children) n += c.op_count();
  return n;
}

Pattern parse_pattern(std::string_view text) { return PatternParser(text).parse(); }

}  // namespace eqsched
