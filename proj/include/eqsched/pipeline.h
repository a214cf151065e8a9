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

#ifndef EQSCHED_PIPELINE_H_
#define EQSCHED_PIPELINE_H_

#include <chrono>
#include <memory>
#include <optional>
#include <string>

#include "eqsched/exact.h"
#include "eqsched/netlist.h"
#include "eqsched/rewrite.h"

namespace eqsched {

enum class SolverChoice { kAsap, kExact, kExportLp };
std::optional<SolverChoice> solver_from_name(std::string_view name);

struct PipelineOptions {
  double clock_ns = 10.0;
  SolverChoice solver = SolverChoice::kAsap;
  int top_k = 3;
  int depth_limit = 20;
  SaturationLimits limits;
  ExactOptions exact;
  bool per_operation_only = false;
  // Rounds of adding over-chained netlist paths to the constraint set.
  int closure_rounds = 16;
};

struct StageTimes {
  double saturate_s = 0.0;
  double paths_s = 0.0;
  double schedule_s = 0.0;
  double total_s = 0.0;
};

// Everything one run produces. The e-graph and library live on the heap so
// the implementation graph can point into them.
struct PipelineResult {
  Program program;
  std::unique_ptr<ImplLibrary> library;
  std::unique_ptr<EGraph> egraph;
  SaturationReport saturation;
  std::unique_ptr<ImplGraph> graph;
  ChainingConstraintSet constraints;
  std::optional<Solution> solution;
  ExactStats exact_stats;
  ViolationReport violations;
  std::optional<Netlist> netlist;
  NetlistTimingReport timing;
  int closure_rounds = 0;  // re-solves caused by netlist timing
  std::size_t added_paths = 0;
  StageTimes times;

  bool saturation_truncated() const;
};

// Parse errors surface as ParseError; library problems as LibraryError.
PipelineResult prepare(const Program& p, const ImplLibrary& lib, const PipelineOptions& opts);

// Saturates, enumerates paths and, unless exporting, schedules, validates
// and builds the netlist.
PipelineResult run_pipeline(const Program& p, const ImplLibrary& lib, const PipelineOptions& opts);

// Schedules a prepared result: solve, build the netlist, add over-long
// netlist paths to the constraints and re-solve while any appear, then
// validate against the full model.
void schedule_prepared(PipelineResult& r, const PipelineOptions& opts);

// Joint model of a prepared result.
JointModel pipeline_model(const PipelineResult& r);

}  // namespace eqsched

#endif  // EQSCHED_PIPELINE_H_
