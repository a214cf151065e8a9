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

#include "eqsched/asap.h"
#include "eqsched/exact.h"
#include "test_util.h"

namespace eqsched {
namespace {

using testing::kFig1Source;
using testing::options_at;
using testing::sample_library;

TEST(Exact, KernelSingleDsp) {
  const PipelineResult r = run_pipeline(parse_program(kFig1Source), sample_library(),
                                        options_at(1000.0 / 450.0, SolverChoice::kExact));
  ASSERT_TRUE(r.solution);
  EXPECT_EQ(r.solution->status, SolveStatus::kOptimal);
  EXPECT_EQ(r.solution->latency, 2);
  ASSERT_EQ(r.solution->impl_count(), 1u);
  EXPECT_EQ(r.graph->node(r.solution->selected[0].node).entry->identifier,
            "DSP48E2_PREADD_MULNEG");
}

TEST(Exact, PerOperationIsThreeCycles) {
  PipelineOptions o = options_at(1000.0 / 450.0, SolverChoice::kExact);
  o.per_operation_only = true;
  const PipelineResult r = run_pipeline(parse_program(kFig1Source), sample_library(), o);
  ASSERT_TRUE(r.solution);
  EXPECT_EQ(r.solution->status, SolveStatus::kOptimal);
  EXPECT_EQ(r.solution->latency, 3);
  EXPECT_TRUE(r.violations.ok());
}

TEST(Exact, NeverWorseThanAsap) {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const Program p = generate_synthetic(4 + static_cast<int>(seed % 10), DtypeClass::kInt, seed);
    for (double clk : {10.0, 3.0}) {
      const PipelineResult r = prepare(p, sample_library(), options_at(clk));
      const Solution a = asap_schedule(*r.graph, r.constraints);
      const Solution e = solve_exact(*r.graph, r.constraints);
      ASSERT_EQ(e.status, SolveStatus::kOptimal) << p.name;
      EXPECT_LE(e.latency, a.latency) << p.name << ' ' << clk;
      const JointModel m = pipeline_model(r);
      EXPECT_TRUE(check_solution(e, m, *r.graph).ok()) << p.name;
      EXPECT_LE(e.objective(m.alpha), a.objective(m.alpha) + 1e-9);
    }
  }
}

TEST(Exact, StepBudgetGivesTimeoutWithIncumbent) {
  const Program p = generate_synthetic(20, DtypeClass::kInt, 3);
  const PipelineResult r = prepare(p, sample_library(), options_at(5.0));
  ExactOptions o;
  o.max_steps = 2;
  ExactStats stats;
  const Solution s = solve_exact(*r.graph, r.constraints, o, &stats);
  EXPECT_EQ(s.status, SolveStatus::kTimeout);
  EXPECT_FALSE(s.selected.empty());
  EXPECT_LE(stats.steps, 3u);
}

TEST(Exact, Deterministic) {
  const Program p = generate_synthetic(10, DtypeClass::kInt, 11);
  const PipelineResult r = prepare(p, sample_library(), options_at(4.0));
  const Solution a = solve_exact(*r.graph, r.constraints);
  const Solution b = solve_exact(*r.graph, r.constraints);
  EXPECT_EQ(solution_to_json(a, *r.graph), solution_to_json(b, *r.graph));
}

}  // namespace
}  // namespace eqsched
