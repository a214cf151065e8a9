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

#include "eqsched/pipeline.h"

#include <algorithm>

#include "eqsched/asap.h"

namespace eqsched {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Turns an over-long netlist path into a chaining constraint. Returns false
// when the path is already constrained.
bool add_path(ChainingConstraintSet& cs, const ImplGraph& g, const TimingViolationPath& v) {
  if (v.nodes.size() < 2) return false;
  TimedPath p;
  for (std::size_t i = 0; i + 1 < v.nodes.size(); ++i) {
    const auto& ports = g.node(v.nodes[i + 1]).entry->ports;
    auto it = std::find(ports.begin(), ports.end(), v.ports[i]);
    if (it == ports.end()) throw Error("netlist path enters unknown port " + v.ports[i]);
    p.edges.push_back({v.nodes[i], v.nodes[i + 1], *it});
  }
  p.src_combinational = g.node(p.src()).profile->combinational();
  p.delay = path_delay(p, g);
  p.cuts = cuts(p.delay, *g.clock_ns(), g.constants());
  auto& list = cs.pairs[{p.src(), p.dst()}];
  for (const auto& q : list)
    if (q.edges == p.edges) return false;
  list.push_back(std::move(p));
  std::stable_sort(list.begin(), list.end(),
                   [](const TimedPath& a, const TimedPath& b) { return a.delay > b.delay; });
  return true;
}

}  // namespace

std::optional<SolverChoice> solver_from_name(std::string_view name) {
  if (name == "asap") return SolverChoice::kAsap;
  if (name == "exact") return SolverChoice::kExact;
  if (name == "export-lp") return SolverChoice::kExportLp;
  return std::nullopt;
}

bool PipelineResult::saturation_truncated() const {
  return saturation.stop == StopReason::kClassLimit || saturation.stop == StopReason::kNodeLimit ||
         saturation.stop == StopReason::kTimeout;
}

PipelineResult prepare(const Program& p, const ImplLibrary& lib, const PipelineOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  PipelineResult r;
  r.program = p;
  r.library = std::make_unique<ImplLibrary>(opts.per_operation_only ? lib.per_operation_only() : lib);
  r.egraph = std::make_unique<EGraph>(egraph_from_program(p));
  auto rules = library_algebraic_rules(*r.library);
  for (auto& rule : enumerate_impl_rules(*r.library)) rules.push_back(std::move(rule));
  r.saturation = saturate(*r.egraph, rules, opts.limits);
  r.times.saturate_s = seconds_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  r.graph = std::make_unique<ImplGraph>(*r.egraph, *r.library, opts.clock_ns);
  r.constraints = enumerate_top_k_paths(*r.graph, opts.top_k, opts.depth_limit);
  r.times.paths_s = seconds_since(t1);
  r.times.total_s = seconds_since(t0);
  return r;
}

JointModel pipeline_model(const PipelineResult& r) { return build_model(*r.graph, r.constraints); }

PipelineResult run_pipeline(const Program& p, const ImplLibrary& lib, const PipelineOptions& opts) {
  PipelineResult r = prepare(p, lib, opts);
  if (opts.solver != SolverChoice::kExportLp) schedule_prepared(r, opts);
  return r;
}

void schedule_prepared(PipelineResult& r, const PipelineOptions& opts) {
  const auto t1 = std::chrono::steady_clock::now();
  auto solve = [&]() {
    if (opts.solver == SolverChoice::kExact)
      return solve_exact(*r.graph, r.constraints, opts.exact, &r.exact_stats);
    return asap_schedule(*r.graph, r.constraints);
  };
  while (true) {
    Solution s = solve();
    if (s.status == SolveStatus::kInfeasible)
      throw UnschedulableError("no acyclic selection implements every output");
    if (s.selected.empty() && s.status == SolveStatus::kTimeout) {
      r.solution = std::move(s);
      break;
    }
    Netlist n = build_netlist(s, *r.graph, r.program);
    NetlistTimingReport t = check_netlist_timing(n, *r.library, opts.clock_ns);
    bool added = false;
    if (r.closure_rounds < opts.closure_rounds)
      for (const auto& v : t.violations)
        if (add_path(r.constraints, *r.graph, v)) {
          added = true;
          ++r.added_paths;
        }
    if (!added) {
      r.solution = std::move(s);
      r.netlist = std::move(n);
      r.timing = std::move(t);
      break;
    }
    ++r.closure_rounds;
  }
  r.times.schedule_s = seconds_since(t1);
  if (r.netlist) r.violations = check_solution(*r.solution, *r.graph, r.constraints);
  r.times.total_s += seconds_since(t1);
}

}  // namespace eqsched
