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

#ifndef EQSCHED_REWRITE_H_
#define EQSCHED_REWRITE_H_

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eqsched/egraph.h"
#include "eqsched/pattern.h"

namespace eqsched {

enum class RuleKind { kAlgebraic, kImplementation };

using RuleCondition = std::function<bool(const EGraph&, const Match&)>;

struct RewriteRule {
  std::string name;
  RuleKind kind = RuleKind::kAlgebraic;
  Pattern matcher;
  // Algebraic: replacement term. Implementation: `(<identifier>#<config> ?p1 ?p2 ...)`.
  Pattern applier;
  RuleCondition condition;  // empty means always
  std::optional<ImplRef> impl;
  // Implementation rules only: operand order is irrelevant, args are sorted.
  bool unordered_args = false;
};

// True when rewriting the matched term cannot change its value at the root
// class width: every inner operator node is a ring operator whose class is
// either at least as wide as the root (with only ring operators above it)
// or provably free of overflow given its operand types. Float matches are
// not checked.
bool width_safe(const EGraph& g, const Pattern& matcher, const Match& m);

// Integer-only algebraic rule guarded by width_safe. A bare-variable applier
// additionally requires the variable's class to have the root's type.
RewriteRule make_algebraic_rule(std::string name, std::string_view lhs, std::string_view rhs);

// Commutativity of add/mul, -a*b => -(a*b), a*-b => -(a*b), -(-a) => a,
// a-b => a+(-b).
std::vector<RewriteRule> default_algebraic_rules();

struct SaturationLimits {
  int max_iterations = 30;
  std::size_t max_classes = 10'000;
  std::size_t max_nodes = 100'000;
  std::chrono::milliseconds timeout{60'000};
};

enum class StopReason { kSaturated, kIterationLimit, kClassLimit, kNodeLimit, kTimeout };
std::string_view stop_reason_name(StopReason r);

struct SaturationReport {
  int iterations = 0;
  std::map<std::string, std::size_t> applications;
  StopReason stop = StopReason::kSaturated;

  std::size_t total_applications() const;
};

SaturationReport saturate(EGraph& g, std::span<const RewriteRule> rules,
                          const SaturationLimits& limits = {});

}  // namespace eqsched

#endif  // EQSCHED_REWRITE_H_
