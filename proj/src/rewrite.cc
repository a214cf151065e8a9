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

#include "eqsched/rewrite.h"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

namespace eqsched {

namespace {

using i128 = __int128;

struct Range {
  i128 lo, hi;
};

Range range_of(DataType t) { return {t.min_value(), t.max_value()}; }

// Range of the exact (unwrapped) result, or nullopt when it cannot be bounded.
std::optional<Range> exact_range(Op op, std::span<const DataType> args) {
  for (const auto& t : args)
    if (!t.is_int()) return std::nullopt;
  switch (op) {
    case Op::kAdd: {
      Range a = range_of(args[0]), b = range_of(args[1]);
      return Range{a.lo + b.lo, a.hi + b.hi};
    }
    case Op::kSub: {
      Range a = range_of(args[0]), b = range_of(args[1]);
      return Range{a.lo - b.hi, a.hi - b.lo};
    }
    case Op::kNeg: {
      Range a = range_of(args[0]);
      return Range{-a.hi, -a.lo};
    }
    case Op::kMul: {
      if (args[0].bits + args[1].bits > 120) return std::nullopt;
      Range a = range_of(args[0]), b = range_of(args[1]);
      i128 c[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
      return Range{*std::min_element(std::begin(c), std::end(c)),
                   *std::max_element(std::begin(c), std::end(c))};
    }
    default:
      return std::nullopt;
  }
}

class WidthWalk {
 public:
  WidthWalk(const EGraph& g, const Match& m, DataType root) : g_(g), m_(m), root_(root) {}

  ClassId walk(const Pattern& p, bool ancestors_ring) {
    if (p.is_var()) return m_.at(p.var_name());
    const std::size_t idx = next_++;
    const ClassId cls = m_.internal.at(idx);
    const auto op = op_from_name(p.symbol);
    const bool ring_here = ancestors_ring && op && op_is_ring(*op);
    std::vector<DataType> child_types;
    for (const auto& c : p.children) child_types.push_back(g_.eclass(walk(c, ring_here)).dtype);
    if (idx == 0) return cls;
    const DataType d = g_.eclass(cls).dtype;
    if (!d.is_int() || !root_.is_int()) return cls;
    if (!op || !op_is_ring(*op)) {
      ok_ = false;
    } else if (!(ancestors_ring && d.bits >= root_.bits)) {
      auto r = exact_range(*op, child_types);
      const DataType i64{TypeKind::kSigned, 64};
      if (!r || r->lo < d.min_value() || r->hi > d.max_value() || r->lo < i64.min_value() ||
          r->hi > i64.max_value())
        ok_ = false;
    }
    return cls;
  }

  bool ok() const { return ok_; }

 private:
  const EGraph& g_;
  const Match& m_;
  DataType root_;
  std::size_t next_ = 0;
  bool ok_ = true;
};

bool all_int(const EGraph& g, const Match& m) {
  for (const auto& [_, c] : m.binding)
    if (!g.eclass(c).dtype.is_int()) return false;
  for (ClassId c : m.internal)
    if (!g.eclass(c).dtype.is_int()) return false;
  return true;
}

ClassId instantiate(EGraph& g, const Pattern& p, const Match& m, DataType dtype) {
  if (p.is_var()) return m.at(p.var_name());
  ENode n;
  n.symbol = p.symbol;
  n.dtype = dtype;
  for (const auto& c : p.children) n.args.push_back(instantiate(g, c, m, dtype));
  return g.add(std::move(n));
}

}  // namespace

bool width_safe(const EGraph& g, const Pattern& matcher, const Match& m) {
  const DataType root = g.eclass(m.cls).dtype;
  WidthWalk w(g, m, root);
  w.walk(matcher, true);
  return w.ok();
}

RewriteRule make_algebraic_rule(std::string name, std::string_view lhs, std::string_view rhs) {
  RewriteRule r;
  r.name = std::move(name);
  r.kind = RuleKind::kAlgebraic;
  r.matcher = parse_pattern(lhs);
  r.applier = parse_pattern(rhs);
  r.condition = [matcher = r.matcher, applier = r.applier](const EGraph& g, const Match& m) {
    if (!all_int(g, m)) return false;
    if (applier.is_var() &&
        g.eclass(m.at(applier.var_name())).dtype != g.eclass(m.cls).dtype)
      return false;
    return width_safe(g, matcher, m);
  };
  return r;
}

std::vector<RewriteRule> default_algebraic_rules() {
  std::vector<RewriteRule> rules;
  rules.push_back(make_algebraic_rule("comm-add", "(add ?a ?b)", "(add ?b ?a)"));
  rules.push_back(make_algebraic_rule("comm-mul", "(mul ?a ?b)", "(mul ?b ?a)"));
  rules.push_back(make_algebraic_rule("neg-mul-left", "(mul (neg ?a) ?b)", "(neg (mul ?a ?b))"));
  rules.push_back(make_algebraic_rule("neg-mul-right", "(mul ?a (neg ?b))", "(neg (mul ?a ?b))"));
  rules.push_back(make_algebraic_rule("neg-neg", "(neg (neg ?a))", "?a"));
  rules.push_back(make_algebraic_rule("sub-to-add-neg", "(sub ?a ?b)", "(add ?a (neg ?b))"));
  return rules;
}

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::kSaturated: return "saturated";
    case StopReason::kIterationLimit: return "iteration-limit";
    case StopReason::kClassLimit: return "class-limit";
    case StopReason::kNodeLimit: return "node-limit";
    case StopReason::kTimeout: return "timeout";
  }
  return "?";
}

std::size_t SaturationReport::total_applications() const {
  std::size_t n = 0;
  for (const auto& [_, c] : applications) n += c;
  return n;
}

SaturationReport saturate(EGraph& g, std::span<const RewriteRule> rules,
                          const SaturationLimits& limits) {
  for (const auto& r : rules) {
    const auto have = r.matcher.vars();
    for (const auto& v : r.applier.vars())
      if (std::find(have.begin(), have.end(), v) == have.end())
        throw Error(fmt::format("rule '{}': applier variable ?{} is not bound by the matcher",
                                r.name, v));
    if (r.kind == RuleKind::kImplementation && !r.impl)
      throw Error(fmt::format("rule '{}': implementation rule without library reference", r.name));
  }
  const auto start = std::chrono::steady_clock::now();
  auto timed_out = [&] { return std::chrono::steady_clock::now() - start > limits.timeout; };

  SaturationReport report;
  for (const auto& r : rules) report.applications[r.name] = 0;
  if (g.dirty()) g.rebuild();

  for (int iter = 0; iter < limits.max_iterations; ++iter) {
    std::vector<std::pair<std::size_t, Match>> matches;
    for (std::size_t ri = 0; ri < rules.size(); ++ri) {
      for (auto& m : g.ematch(rules[ri].matcher))
        if (!rules[ri].condition || rules[ri].condition(g, m)) matches.emplace_back(ri, std::move(m));
      if (timed_out()) {
        report.iterations = iter;
        report.stop = StopReason::kTimeout;
        return report;
      }
    }

    bool changed = false;
    std::optional<StopReason> limit;
    for (const auto& [ri, m] : matches) {
      const RewriteRule& rule = rules[ri];
      bool applied = false;
      if (rule.kind == RuleKind::kImplementation) {
        ENode n;
        n.symbol = rule.applier.symbol;
        n.dtype = g.eclass(m.cls).dtype;
        n.impl = rule.impl;
        for (const auto& c : rule.applier.children) n.args.push_back(m.at(c.var_name()));
        if (rule.unordered_args) std::sort(n.args.begin(), n.args.end());
        applied = g.add_to_class(m.cls, std::move(n));
      } else {
        const std::size_t before = g.node_capacity();
        const ClassId made = instantiate(g, rule.applier, m, g.eclass(m.cls).dtype);
        const bool distinct = g.find(made) != g.find(m.cls);
        g.merge(made, m.cls);
        applied = distinct || g.node_capacity() != before;
      }
      if (applied) {
        ++report.applications[rule.name];
        changed = true;
      }
      if (g.num_nodes() > limits.max_nodes) limit = StopReason::kNodeLimit;
      else if (g.num_classes() > limits.max_classes) limit = StopReason::kClassLimit;
      if (limit) break;
    }
    g.rebuild();
    report.iterations = iter + 1;
    if (limit) {
      report.stop = *limit;
      return report;
    }
    if (!changed) {
      report.stop = StopReason::kSaturated;
      return report;
    }
    if (timed_out()) {
      report.stop = StopReason::kTimeout;
      return report;
    }
  }
  report.stop = StopReason::kIterationLimit;
  return report;
}

}  // namespace eqsched
