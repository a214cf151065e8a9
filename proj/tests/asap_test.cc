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

using testing::build;
using testing::entry;
using testing::kFig1Source;
using testing::make_library;
using testing::node_of;
using testing::options_at;
using testing::sample_library;

TEST(TieBreak, LatencyFirst) {
  std::vector<TieCandidate> c{{4, 2, "A", "x"}, {9, 0, "Z", "x"}};
  EXPECT_EQ(tie_break(c), 9u);
}

TEST(TieBreak, IdentifierThenConfigThenId) {
  std::vector<TieCandidate> c{{1, 1, "LUT_add", "comb"}, {2, 1, "DSP48E2#x", "comb"}};
  EXPECT_EQ(tie_break(c), 2u);
  std::vector<TieCandidate> d{{5, 1, "X", "b"}, {6, 1, "X", "a"}};
  EXPECT_EQ(tie_break(d), 6u);
  std::vector<TieCandidate> e{{8, 1, "X", "a"}, {7, 1, "X", "a"}};
  EXPECT_EQ(tie_break(e), 7u);
}

TEST(TieBreak, Single) {
  std::vector<TieCandidate> c{{3, 5, "Q", "q"}};
  EXPECT_EQ(tie_break(c), 3u);
}

TEST(Asap, KernelAtFourFiftyMegahertz) {
  const PipelineResult r =
      run_pipeline(parse_program(kFig1Source), sample_library(), options_at(1000.0 / 450.0));
  ASSERT_TRUE(r.solution);
  EXPECT_EQ(r.solution->latency, 2);
  ASSERT_EQ(r.solution->selected.size(), 1u);
  EXPECT_EQ(r.graph->node(r.solution->selected[0].node).entry->kind, ImplKind::kHardwarePrimitive);
  EXPECT_TRUE(r.violations.ok());
}

TEST(Asap, ChainNeedsOneCut) {
  // overhead 2 ns, clock 4 ns: A->C is 1+1+1+1+1 = 5 ns, pairs are 3 ns.
  ImplLibrary lib = make_library({entry("A", "(neg ?p)", {{"p", 1.0}}),
                                  entry("B", "(and ?p ?q)", {{"p", 1.0}, {"q", 1.0}}),
                                  entry("C", "(or ?p ?q)", {{"p", 1.0}, {"q", 1.0}})},
                                 1.0, 0.5, 0.5);
  auto b = build("x = input i16\ny = input i16\nz = input i16\n"
                 "a = neg i17 x\nb = and i17 a y\nc = or i17 b z\nreturn c\n",
                 std::move(lib), 4.0);
  const auto cs = enumerate_top_k_paths(*b->g);
  const Solution s = asap_schedule(*b->g, cs);
  EXPECT_EQ(s.find(node_of(*b->g, "A"))->start, 0);
  EXPECT_EQ(s.find(node_of(*b->g, "B"))->start, 0);
  EXPECT_EQ(s.find(node_of(*b->g, "C"))->start, 1);
  EXPECT_EQ(s.latency, 1);
  EXPECT_TRUE(check_solution(s, build_model(*b->g, cs), *b->g).ok());
}

TEST(Asap, PicksFasterImplementation) {
  ImplLibrary lib = make_library({entry("SLOW", "(neg ?a)", {{"a", 0.5}}, 3, 0.3, 1.0),
                                  entry("FAST", "(neg ?a)", {{"a", 0.5}}, 1, 0.3, 1.0)});
  auto b = build("x = input i16\nn = neg i17 x\nreturn n\n", std::move(lib), 10.0);
  const auto cs = enumerate_top_k_paths(*b->g);
  const Solution s = asap_schedule(*b->g, cs);
  ASSERT_EQ(s.selected.size(), 1u);
  EXPECT_EQ(s.selected[0].node, node_of(*b->g, "FAST"));
  EXPECT_EQ(s.latency, 1);
  EXPECT_EQ(solve_exact(*b->g, cs).latency, 1);
}

TEST(Asap, NoUsableImplementation) {
  ImplLibrary lib = make_library({entry("N", "(neg ?a)", {{"a", 5.0}})});
  auto b = build("x = input i16\nn = neg i17 x\nreturn n\n", std::move(lib), 2.0);
  EXPECT_THROW(asap_schedule(*b->g, enumerate_top_k_paths(*b->g)), UnschedulableError);
}

TEST(Asap, OnlyReachableTermReturned) {
  const PipelineResult r = run_pipeline(parse_program(kFig1Source), sample_library(),
                                        options_at(10.0));
  ASSERT_TRUE(r.solution);
  std::set<ClassId> classes;
  for (const auto& p : r.solution->selected) classes.insert(r.graph->node(p.node).cls);
  EXPECT_EQ(classes.size(), r.solution->selected.size());
  EXPECT_TRUE(r.violations.ok());
}

TEST(Asap, RandomProgramsPassCheck) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (DtypeClass d : {DtypeClass::kInt, DtypeClass::kFloat}) {
      const Program p = generate_synthetic(5 + static_cast<int>(seed % 15), d, seed);
      for (double clk : {10.0, 5.0, 2.5}) {
        const PipelineResult r = prepare(p, sample_library(), options_at(clk));
        const Solution s = asap_schedule(*r.graph, r.constraints);
        EXPECT_TRUE(check_solution(s, pipeline_model(r), *r.graph).ok()) << p.name << ' ' << clk;
      }
    }
  }
}

}  // namespace
}  // namespace eqsched
