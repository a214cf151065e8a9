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

#include <gtest/gtest.h>

#include <algorithm>

#include "eqsched/egraph.h"
#include "eqsched/rewrite.h"
#include "test_util.h"

namespace eqsched {
namespace {

using testing::kFig1Source;

const DataType kI16{TypeKind::kSigned, 16};

ENode op_node(const std::string& sym, std::vector<ClassId> args, DataType t = kI16) {
  return ENode{sym, std::move(args), t, "", std::nullopt};
}
ENode input(const std::string& name, DataType t = kI16) {
  return ENode{"input", {}, t, name, std::nullopt};
}

// Class of the unique live node with this symbol.
ClassId class_with(const EGraph& g, const std::string& sym) {
  std::optional<ClassId> found;
  for (ClassId c : g.class_ids())
    for (NodeId n : g.eclass(c).nodes)
      if (g.node(n).symbol == sym) {
        EXPECT_FALSE(found.has_value()) << "several " << sym;
        found = c;
      }
  EXPECT_TRUE(found.has_value()) << "no " << sym;
  return found.value_or(0);
}

bool class_has(const EGraph& g, ClassId c, const std::string& sym, std::vector<ClassId> args) {
  for (NodeId n : g.eclass(c).nodes) {
    const ENode& e = g.node(n);
    if (e.symbol != sym || e.args.size() != args.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < args.size(); ++i)
      if (g.find(e.args[i]) != g.find(args[i])) same = false;
    if (same) return true;
  }
  return false;
}

TEST(EGraphFromProgram, KernelClasses) {
  const EGraph g = egraph_from_program(parse_program(kFig1Source));
  EXPECT_EQ(g.num_classes(), 6u);
  EXPECT_EQ(g.num_nodes(), 6u);
  ASSERT_EQ(g.roots.size(), 1u);
  const ClassId mul = class_with(g, "mul");
  EXPECT_EQ(g.find(g.roots[0]), mul);
  const ClassId add = class_with(g, "add");
  const ClassId neg = class_with(g, "neg");
  EXPECT_TRUE(class_has(g, neg, "neg", {add}));
  EXPECT_EQ(g.eclass(mul).dtype, (DataType{TypeKind::kSigned, 32}));
}

TEST(EGraphFromProgram, SharedSubterm) {
  const EGraph g = egraph_from_program(parse_program(
      "x = input i16\ny = input i16\np = add i17 x y\nq = add i17 x y\nr = mul i34 p q\nreturn r\n"));
  EXPECT_EQ(g.num_classes(), 4u);
}

TEST(EGraphFromProgram, IdentityProgram) {
  const EGraph g = egraph_from_program(parse_program("x = input i8\nreturn x\n"));
  EXPECT_EQ(g.num_classes(), 1u);
  ASSERT_EQ(g.roots.size(), 1u);
  EXPECT_TRUE(g.is_leaf_class(g.roots[0]));
}

TEST(EGraph, AddIsIdempotent) {
  EGraph g;
  const ClassId x = g.add(input("x"));
  const ClassId a = g.add(op_node("neg", {x}));
  EXPECT_EQ(g.add(op_node("neg", {x})), a);
  EXPECT_EQ(g.num_nodes(), 2u);
}

TEST(EGraph, CongruenceAfterRebuild) {
  EGraph g;
  const ClassId c1 = g.add(input("x"));
  const ClassId c2 = g.add(input("y"));
  const ClassId n1 = g.add(op_node("neg", {c1}));
  const ClassId n2 = g.add(op_node("neg", {c2}));
  EXPECT_NE(g.find(n1), g.find(n2));
  g.merge(c1, c2);
  g.rebuild();
  EXPECT_EQ(g.find(n1), g.find(n2));
  EXPECT_EQ(g.find(g.add(op_node("neg", {c2}))), g.find(n1));
}

TEST(EGraph, MergeRefusesDifferentTypes) {
  EGraph g;
  const ClassId a = g.add(input("x", kI16));
  const ClassId b = g.add(input("y", DataType{TypeKind::kSigned, 8}));
  EXPECT_THROW(g.merge(a, b), Error);
}

TEST(EGraph, ImplementationNodeGrowsClass) {
  EGraph g = egraph_from_program(parse_program(kFig1Source));
  const ClassId root = g.find(g.roots[0]);
  const std::size_t before = g.eclass(root).nodes.size();
  const ENode& sum = g.node(g.eclass(class_with(g, "add")).nodes[0]);
  const ClassId c = g.node(g.eclass(root).nodes[0]).args[1];
  ENode impl{"DSP#x", {sum.args[0], sum.args[1], c}, g.eclass(root).dtype, "", ImplRef{0, 0}};
  EXPECT_TRUE(g.add_to_class(root, impl));
  EXPECT_EQ(g.eclass(root).nodes.size(), before + 1);
  EXPECT_FALSE(g.add_to_class(root, impl));
}

TEST(EMatch, NegatedOperandPattern) {
  const EGraph g = egraph_from_program(parse_program(kFig1Source));
  const auto ms = g.ematch(parse_pattern("(mul (neg ?a) ?b)"));
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].at("a"), class_with(g, "add"));
  // ?b is the input c: the third declared input.
  EXPECT_TRUE(g.is_leaf_class(ms[0].at("b")));
  EXPECT_EQ(g.node(g.eclass(ms[0].at("b")).nodes[0]).payload, "c");
  EXPECT_EQ(ms[0].internal.size(), 2u);
  EXPECT_EQ(ms[0].internal[0], ms[0].cls);
}

TEST(EMatch, VariableMatchesEveryClass) {
  const EGraph g = egraph_from_program(parse_program(kFig1Source));
  EXPECT_EQ(g.ematch(parse_pattern("?x")).size(), g.num_classes());
}

TEST(EMatch, AbsentConstructor) {
  const EGraph g = egraph_from_program(parse_program(kFig1Source));
  EXPECT_TRUE(g.ematch(parse_pattern("(div ?a ?b)")).empty());
}

TEST(EMatch, RepeatedVariableNeedsSameClass) {
  EGraph g;
  const ClassId x = g.add(input("x"));
  const ClassId y = g.add(input("y"));
  g.add(op_node("add", {x, y}));
  g.add(op_node("add", {x, x}));
  EXPECT_EQ(g.ematch(parse_pattern("(add ?a ?a)")).size(), 1u);
}

TEST(Saturate, NegHoistRewritesRoot) {
  EGraph g = egraph_from_program(parse_program(kFig1Source));
  const ClassId add = class_with(g, "add");
  std::vector<RewriteRule> rules{
      make_algebraic_rule("neg-mul-left", "(mul (neg ?a) ?b)", "(neg (mul ?a ?b))")};
  const SaturationReport rep = saturate(g, rules);
  EXPECT_EQ(rep.stop, StopReason::kSaturated);
  EXPECT_EQ(rep.applications.at("neg-mul-left"), 1u);
  const ClassId root = g.find(g.roots[0]);
  bool found = false;
  for (NodeId n : g.eclass(root).nodes) {
    const ENode& e = g.node(n);
    if (e.symbol != "neg") continue;
    const ClassId inner = g.find(e.args[0]);
    for (NodeId m : g.eclass(inner).nodes) {
      const ENode& f = g.node(m);
      if (f.symbol == "mul" && g.find(f.args[0]) == g.find(add) && g.is_leaf_class(f.args[1]))
        found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Saturate, NoRulesIsFixpoint) {
  EGraph g = egraph_from_program(parse_program(kFig1Source));
  const std::string before = g.to_json();
  const SaturationReport rep = saturate(g, {});
  EXPECT_EQ(rep.total_applications(), 0u);
  EXPECT_EQ(rep.stop, StopReason::kSaturated);
  EXPECT_EQ(g.to_json(), before);
}

TEST(Saturate, CommutativityAddsOneNode) {
  EGraph g = egraph_from_program(
      parse_program("a = input i16\nb = input i16\ns = add i17 a b\nreturn s\n"));
  const std::size_t classes = g.num_classes();
  std::vector<RewriteRule> rules{make_algebraic_rule("comm-add", "(add ?a ?b)", "(add ?b ?a)")};
  const SaturationReport rep = saturate(g, rules);
  EXPECT_EQ(rep.stop, StopReason::kSaturated);
  EXPECT_LE(rep.iterations, 2);
  EXPECT_EQ(g.num_classes(), classes);
  EXPECT_EQ(g.eclass(g.roots[0]).nodes.size(), 2u);
}

TEST(Saturate, IterationLimit) {
  EGraph g = egraph_from_program(parse_program(kFig1Source));
  SaturationLimits lim;
  lim.max_iterations = 1;
  std::vector<RewriteRule> rules{make_algebraic_rule("grow", "(neg ?a)", "(neg (and ?a ?a))")};
  const SaturationReport rep = saturate(g, rules, lim);
  EXPECT_EQ(rep.stop, StopReason::kIterationLimit);
  EXPECT_EQ(rep.iterations, 1);
}

TEST(Saturate, NodeLimit) {
  EGraph g = egraph_from_program(parse_program(kFig1Source));
  SaturationLimits lim;
  lim.max_nodes = 8;
  std::vector<RewriteRule> rules{make_algebraic_rule("grow", "(neg ?a)", "(neg (and ?a ?a))")};
  const SaturationReport rep = saturate(g, rules, lim);
  EXPECT_EQ(rep.stop, StopReason::kNodeLimit);
}

TEST(WidthSafe, NarrowInnerSumBlocksRewrite) {
  // (a+b) truncated to 8 bits, then widened by the multiply: moving the
  // negation would change the wrap point.
  EGraph g = egraph_from_program(parse_program(
      "a = input i8\nb = input i8\nc = input i8\ns = add i8 a b\nn = neg i9 s\nm = mul i17 n c\n"
      "return m\n"));
  const auto rule = make_algebraic_rule("x", "(mul (neg ?a) ?b)", "(neg (mul ?a ?b))");
  const auto ms = g.ematch(rule.matcher);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_TRUE(width_safe(g, rule.matcher, ms[0]));
  const auto ms2 = g.ematch(parse_pattern("(neg (add ?a ?b))"));
  ASSERT_EQ(ms2.size(), 1u);
  EXPECT_FALSE(width_safe(g, parse_pattern("(neg (add ?a ?b))"), ms2[0]));
}

TEST(EGraphDot, ClustersPerClass) {
  const EGraph g = egraph_from_program(parse_program(kFig1Source));
  const std::string dot = g.to_dot();
  std::size_t clusters = 0;
  for (std::size_t at = 0; (at = dot.find("subgraph cluster", at)) != std::string::npos; ++at)
    ++clusters;
  EXPECT_EQ(clusters, g.num_classes());
}

TEST(EGraphJson, Deterministic) {
  EXPECT_EQ(egraph_from_program(parse_program(kFig1Source)).to_json(),
            egraph_from_program(parse_program(kFig1Source)).to_json());
}

}  // namespace
}  // namespace eqsched
