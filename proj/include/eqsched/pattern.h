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

#ifndef EQSCHED_PATTERN_H_
#define EQSCHED_PATTERN_H_

#include <string>
#include <string_view>
#include <vector>

namespace eqsched {

// Prefix-notation term pattern: `(mul (neg ?a) ?b)`. Variables start with '?'.
struct Pattern {
  std::string symbol;
  std::vector<Pattern> children;

  bool is_var() const { return !symbol.empty() && symbol[0] == '?'; }
  // Variable name without the leading '?'.
  std::string var_name() const { return symbol.substr(1); }

  std::string str() const;
  // Variables in first-occurrence (left-to-right) order, without duplicates.
  std::vector<std::string> vars() const;
  // Number of non-variable nodes.
  std::size_t op_count() const;

  bool operator==(const Pattern&) const = default;
};

Pattern parse_pattern(std::string_view text);

}  // namespace eqsched

#endif  // EQSCHED_PATTERN_H_
