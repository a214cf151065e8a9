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

#include "eqsched/exact.h"
#include "eqsched/model.h"
#include "test_util.h"

namespace eqsched {
namespace {

using testing::build;
using testing::entry;
using testing::kFig1Source;
using testing::make_library;
using testing::node_of;
using testing::options_at;
using testing::sample_library;

std::size_t count_kind(const JointModel& m, RowKind k) {
  return static_cast<std::size_t>(
      std::count_if(m.rows.begin(), m.rows.end(), [&](const Row& r) { return r.kind == k; }));
}

TEST(BuildModel, KernelVariablesFollowTheEGraph) {
  const PipelineResult r = prepare(parse_program(kFig1Source), sample_library(),
                                   options_at(1000.0 / 450.0, SolverChoice::kExportLp));
  const JointModel m = pipeline_model(r);
  const EGraph& eg = *r.egraph;

  // Implementation e-nodes counted straight from the e-graph.
  std::size_t impl = 0;
  for (ClassId c : eg.class_ids())
    for (NodeId n : eg.eclass(c).nodes)
      if (eg.node(n).is_impl()) ++impl;
  std::size_t binaries = 0;
  for (const Var& v : m.vars)
    if (v.name.rfind("b_n", 0) == 0) ++binaries;
  EXPECT_EQ(binaries, impl);
  EXPECT_GE(impl, 4u);
  for (ClassId c : eg.class_ids()) {
    EXPECT_TRUE(m.has_var(class_var('b', c)));
    EXPECT_TRUE(m.has_var(class_var('f', c)));
  }
  EXPECT_FALSE(m.has_var("F"));
  EXPECT_EQ(count_kind(m, RowKind::kRoot), 1u);
  EXPECT_EQ(count_kind(m, RowKind::kLatency), impl);
  EXPECT_EQ(count_kind(m, RowKind::kChaining), r.constraints.path_count());
  EXPECT_DOUBLE_EQ(m.alpha, 1.0 / (2.0 * (impl + 1.0)));

  // Every chaining path walks consumer edges through combinational nodes.
  for (const auto& [key, paths] : r.constraints.pairs)
    for (const auto& p : paths) {
      for (std::size_t i = 0; i < p.edges.size(); ++i) {
        const auto& e = p.edges[i];
        const ENode& dst = eg.node(e.dst);
        const auto& ports = r.library->entry(*dst.impl).ports;
        const auto at = std::find(ports.begin(), ports.end(), e.port) - ports.begin();
        ASSERT_LT(static_cast<std::size_t>(at), dst.args.size());
        EXPECT_EQ(eg.find(dst.args[at]), eg.class_of(e.src));
        if (i > 0) {
          EXPECT_EQ(r.library->profile(*eg.node(e.src).impl).latency, 0);
        }
      }
    }
}

TEST(BuildModel, SingleCombinationalNode) {
  auto b = build("x = input i16\nn = neg i17 x\nreturn n\n",
                 make_library({entry("N", "(neg ?a)", {{"a", 0.5}})}), 10.0);
  const auto cs = enumerate_top_k_paths(*b->g);
  const JointModel m = build_model(*b->g, cs);
  EXPECT_EQ(m.vars.size(), 3u + 4u);
  const Solution s = solve_exact(*b->g, cs);
  EXPECT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_EQ(s.latency, 0);
  ASSERT_EQ(s.selected.size(), 1u);
  EXPECT_EQ(s.selected[0].start, 0);
  EXPECT_EQ(s.selected[0].finish, 0);
  EXPECT_DOUBLE_EQ(s.objective(m.alpha), m.alpha);
  const auto x = solution_assignment(s, m, *b->g);
  EXPECT_EQ(x[m.var(node_var('b', s.selected[0].node))], 1.0);
  EXPECT_TRUE(check_assignment(m, x).ok());

  // b = 0 breaks the root and class-complete rows.
  auto y = x;
  y[m.var(node_var('b', s.selected[0].node))] = 0.0;
  const auto rep = check_assignment(m, y);
  ASSERT_FALSE(rep.ok());
  EXPECT_EQ(rep.violations[0].kind, RowKind::kClassComplete);
}

TEST(BuildModel, SeveralOutputsUseMakespan) {
  auto b = build("x = input i16\ny = input i16\nn = neg i17 x\nm = neg i17 y\nreturn n m\n",
                 make_library({entry("N", "(neg ?a)", {{"a", 0.5}}, 2, 0.3, 1.0)}), 10.0);
  const auto cs = enumerate_top_k_paths(*b->g);
  const JointModel m = build_model(*b->g, cs);
  ASSERT_TRUE(m.has_var("F"));
  EXPECT_EQ(count_kind(m, RowKind::kMakespan), 2u);
  EXPECT_EQ(m.objective.front().first, m.var("F"));
  const Solution s = solve_exact(*b->g, cs);
  EXPECT_EQ(s.latency, 2);
  EXPECT_TRUE(check_solution(s, m, *b->g).ok());
}

TEST(BuildModel, NeedsClock) {
  auto b = build("x = input i16\nn = neg i17 x\nreturn n\n",
                 make_library({entry("N", "(neg ?a)", {{"a", 0.5}})}));
  EXPECT_THROW(build_model(*b->g, enumerate_top_k_paths(*b->g)), Error);
}

TEST(CheckSolution, MissingChildClass) {
  const PipelineResult r =
      run_pipeline(parse_program(kFig1Source), sample_library().per_operation_only(),
                   options_at(1000.0 / 450.0));
  ASSERT_TRUE(r.solution);
  ASSERT_EQ(r.solution->selected.size(), 3u);
  const JointModel m = pipeline_model(r);
  EXPECT_TRUE(check_solution(*r.solution, m, *r.graph).ok());
  EXPECT_TRUE(check_solution(*r.solution, *r.graph, r.constraints).ok());

  // Keep only the root implementation.
  Solution broken = *r.solution;
  const ClassId root = r.egraph->find(r.egraph->roots[0]);
  std::erase_if(broken.selected,
                [&](const Placement& p) { return r.graph->node(p.node).cls != root; });
  std::erase_if(broken.class_finish, [&](const auto& kv) {
    return kv.first == root ? false : !r.graph->is_leaf(kv.first);
  });
  const auto rep = check_solution(broken, m, *r.graph);
  EXPECT_TRUE(std::any_of(rep.violations.begin(), rep.violations.end(),
                          [](const Violation& v) { return v.kind == RowKind::kNodeComplete; }));
  const auto streamed = check_solution(broken, *r.graph, r.constraints);
  EXPECT_EQ(streamed.size(), rep.size());
}

TEST(CheckSolution, EarlyStartViolatesDependency) {
  const PipelineResult r =
      run_pipeline(parse_program(kFig1Source), sample_library().per_operation_only(),
                   options_at(1000.0 / 450.0));
  Solution early = *r.solution;
  for (auto& p : early.selected) {
    p.finish -= p.start;
    p.start = 0;
  }
  const auto rep = check_solution(early, pipeline_model(r), *r.graph);
  EXPECT_FALSE(rep.ok());
}

TEST(ExportLp, Sections) {
  const PipelineResult r = prepare(parse_program(kFig1Source), sample_library(),
                                   options_at(1000.0 / 450.0, SolverChoice::kExportLp));
  const std::string lp = export_lp(pipeline_model(r));
  std::size_t at = 0;
  for (const char* s : {"Minimize", "Subject To", "Bounds", "Generals", "Binaries", "End"}) {
    const std::size_t next = lp.find(s, at);
    ASSERT_NE(next, std::string::npos) << s;
    at = next;
  }
  EXPECT_EQ(lp, export_lp(pipeline_model(r)));
}

}  // namespace
}  // namespace eqsched
