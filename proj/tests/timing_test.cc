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

#include <random>

#include "eqsched/timing.h"
#include "test_util.h"

namespace eqsched {
namespace {

using testing::entry;
using testing::make_library;
using testing::build;
using testing::node_of;

// Smallest q with t + q * ovh <= (q + 1) * T, found by counting up.
int cuts_oracle(double t, double clk, double ovh) {
  for (int q = 0; q < 100000; ++q)
    if (t + q * ovh <= (q + 1) * clk + 1e-9) return q;
  return -1;
}

const char* kChain =
    "x = input i16\ny = input i16\nz = input i16\n"
    "a = neg i17 x\nb = and i17 a y\nc = or i17 b z\nreturn c\n";

ImplLibrary chain_library(double t_net, double t_su = 0.1, double t_clkq = 0.15,
                          double ta = 1.0, double tb = 0.5, double tc = 2.0) {
  return make_library({entry("A", "(neg ?p)", {{"p", ta}}),
                       entry("B", "(and ?p ?q)", {{"p", tb}, {"q", tb}}),
                       entry("C", "(or ?p ?q)", {{"p", tc}, {"q", tc}})},
                      t_net, t_su, t_clkq);
}

TEST(EdgeDelay, SequentialSource) {
  TimingProfile src{1, {{"A", 0.2}}, 0.5, 1.0};
  TimingProfile dst{0, {{"A", 0.8}}, 0.0, 0.0};
  TimingConstants k{1.0, 0.1, 0.15};
  EXPECT_DOUBLE_EQ(edge_delay(src, dst, "A", k), 2.3);
}

TEST(EdgeDelay, CombinationalSource) {
  TimingProfile src{0, {{"A", 0.2}}, 0.0, 0.0};
  TimingProfile dst{0, {{"B", 0.7}}, 0.0, 0.0};
  TimingConstants k{0.6, 0.1, 0.15};
  EXPECT_DOUBLE_EQ(edge_delay(src, dst, "B", k), 0.6 + 0.7);
}

TEST(EdgeDelay, MissingPort) {
  TimingProfile p{0, {{"A", 0.2}}, 0.0, 0.0};
  EXPECT_THROW(edge_delay(p, p, "Z", TimingConstants{}), Error);
}

TEST(PathDelay, ThreeStageChain) {
  auto b = build(kChain, chain_library(1.0));
  const ImplGraph& g = *b->g;
  const NodeId a = node_of(g, "A"), bb = node_of(g, "B"), c = node_of(g, "C");
  TimedPath p;
  p.edges = {{a, bb, g.node(bb).port(0)}, {bb, c, g.node(c).port(0)}};
  p.src_combinational = true;
  // t_in(A) + t_net + t_in(B) + t_net + t_in(C)
  EXPECT_DOUBLE_EQ(path_delay(p, g), 1.0 + 1.0 + 0.5 + 1.0 + 2.0);
}

TEST(PathDelay, SequentialSourceIsEdgeDelay) {
  ImplLibrary lib = make_library({entry("A", "(neg ?p)", {{"p", 1.0}}, 2, 0.4, 1.5),
                                  entry("B", "(and ?p ?q)", {{"p", 0.5}, {"q", 0.5}}),
                                  entry("C", "(or ?p ?q)", {{"p", 2.0}, {"q", 2.0}})},
                                 1.0);
  auto b = build(kChain, std::move(lib));
  const ImplGraph& g = *b->g;
  const NodeId a = node_of(g, "A"), bb = node_of(g, "B");
  TimedPath p;
  p.edges = {{a, bb, g.node(bb).port(0)}};
  p.src_combinational = false;
  EXPECT_DOUBLE_EQ(path_delay(p, g), edge_delay(p.edges[0], g));
  EXPECT_DOUBLE_EQ(path_delay(p, g), 0.4 + 1.0 + 0.5);
}

TEST(Cuts, HandExamples) {
  const TimingConstants k{1.0, 0.5, 0.5};  // overhead 2.0
  EXPECT_EQ(cuts(9.0, 10.0, k), 0);
  EXPECT_EQ(cuts(12.0, 10.0, k), 1);
  EXPECT_EQ(cuts(30.0, 10.0, k), 3);
  EXPECT_EQ(cuts(10.0, 10.0, k), 0);
}

TEST(Cuts, RegisterOverheadTooLarge) {
  const TimingConstants k{1.0, 0.5, 0.5};
  EXPECT_THROW(cuts(5.0, 2.0, k), InfeasibleClockError);
  EXPECT_EQ(cuts(1.5, 2.0, k), 0);
}

TEST(Cuts, MatchesCountingOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> clk(1.0, 12.0), frac(0.05, 0.9), path(0.0, 80.0);
  for (int i = 0; i < 300; ++i) {
    const double T = clk(rng);
    const double ovh = frac(rng) * T;
    const TimingConstants k{ovh * 0.5, ovh * 0.25, ovh * 0.25};
    const double t = path(rng);
    EXPECT_EQ(cuts(t, T, k), cuts_oracle(t, T, k.register_overhead())) << t << ' ' << T;
  }
}

TEST(TopK, LinearChainHasOnePathPerPair) {
  auto b = build(kChain, chain_library(1.0), 100.0);
  const auto set = enumerate_top_k_paths(*b->g, 3);
  // A->B, A->C, B->C.
  EXPECT_EQ(set.pairs.size(), 3u);
  for (const auto& [key, paths] : set.pairs) EXPECT_EQ(paths.size(), 1u);
  const NodeId a = node_of(*b->g, "A"), c = node_of(*b->g, "C");
  const auto& ac = set.pairs.at({a, c});
  EXPECT_DOUBLE_EQ(ac[0].delay, 5.5);
  EXPECT_EQ(ac[0].cuts, 0);
  EXPECT_EQ(ac[0].nodes().size(), 3u);
}

const char* kDiamond =
    "x = input i16\ny = input i16\n"
    "p = neg i17 x\nb = or i17 p y\nc = xor i17 p y\nd = and i17 b c\nreturn d\n";

ImplLibrary diamond_library() {
  return make_library({entry("P", "(neg ?u)", {{"u", 0.3}}),
                       entry("OR", "(or ?u ?v)", {{"u", 0.5}, {"v", 0.5}}),
                       entry("XOR", "(xor ?u ?v)", {{"u", 1.5}, {"v", 1.5}}),
                       entry("AND", "(and ?u ?v)", {{"u", 0.2}, {"v", 0.9}})},
                      0.6);
}

TEST(TopK, DiamondKeepsLongerRoute) {
  auto b = build(kDiamond, diamond_library(), 100.0);
  const ImplGraph& g = *b->g;
  const NodeId p = node_of(g, "P"), orn = node_of(g, "OR"), xorn = node_of(g, "XOR"),
               andn = node_of(g, "AND");
  // Both routes by hand: via OR enters port u, via XOR enters port v.
  const double via_or = 0.3 + 0.6 + 0.5 + 0.6 + 0.2;
  const double via_xor = 0.3 + 0.6 + 1.5 + 0.6 + 0.9;
  ASSERT_GT(via_xor, via_or);

  const auto k1 = enumerate_top_k_paths(g, 1);
  const auto& one = k1.pairs.at({p, andn});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_DOUBLE_EQ(one[0].delay, via_xor);
  EXPECT_EQ(one[0].edges[0].dst, xorn);

  const auto k3 = enumerate_top_k_paths(g, 3);
  const auto& both = k3.pairs.at({p, andn});
  ASSERT_EQ(both.size(), 2u);
  EXPECT_DOUBLE_EQ(both[1].delay, via_or);
  EXPECT_EQ(both[1].edges[0].dst, orn);
  EXPECT_DOUBLE_EQ(*chain_delay(p, andn, g), via_xor);
}

TEST(TopK, SequentialNodesEndPaths) {
  ImplLibrary lib = make_library({entry("A", "(neg ?p)", {{"p", 1.0}}),
                                  entry("B", "(and ?p ?q)", {{"p", 0.5}, {"q", 0.5}}, 1, 0.4, 1.0),
                                  entry("C", "(or ?p ?q)", {{"p", 2.0}, {"q", 2.0}})},
                                 1.0);
  auto b = build(kChain, std::move(lib), 100.0);
  const auto set = enumerate_top_k_paths(*b->g, 3);
  const NodeId a = node_of(*b->g, "A"), c = node_of(*b->g, "C");
  EXPECT_EQ(set.pairs.count({a, c}), 0u);
  EXPECT_EQ(set.pairs.size(), 2u);
}

TEST(TopK, DepthLimitRecorded) {
  auto b = build(kChain, chain_library(1.0), 100.0);
  const auto set = enumerate_top_k_paths(*b->g, 3, 1);
  const NodeId a = node_of(*b->g, "A"), c = node_of(*b->g, "C");
  EXPECT_EQ(set.pairs.count({a, c}), 0u);
  EXPECT_EQ(set.depth_limited.count({a, c}), 1u);
}

TEST(TopK, CutsFilledWithClock) {
  // overhead 2.0: A->C is 5.5 ns, one cut at 4 ns.
  auto b = build(kChain, chain_library(1.0, 0.5, 0.5), 4.0);
  const auto set = enumerate_top_k_paths(*b->g, 3);
  const NodeId a = node_of(*b->g, "A"), c = node_of(*b->g, "C");
  EXPECT_EQ(set.pairs.at({a, c})[0].cuts, 1);
  EXPECT_EQ(set.by_destination(true).size(), 1u);
  EXPECT_EQ(set.path_count(), 3u);
}

TEST(ImplGraph, UnusableAtFastClock) {
  ImplLibrary lib = make_library({entry("A", "(neg ?p)", {{"p", 3.0}}),
                                  entry("B", "(and ?p ?q)", {{"p", 0.5}, {"q", 0.5}}),
                                  entry("C", "(or ?p ?q)", {{"p", 0.5}, {"q", 0.5}})});
  auto b = build(kChain, std::move(lib), 2.0);
  EXPECT_FALSE(b->g->node(node_of(*b->g, "A")).usable);
  EXPECT_TRUE(b->g->node(node_of(*b->g, "B")).usable);
}

}  // namespace
}  // namespace eqsched
