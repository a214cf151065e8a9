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

#ifndef EQSCHED_BENCH_H_
#define EQSCHED_BENCH_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "eqsched/pipeline.h"

namespace eqsched {

enum class DtypeClass { kInt, kFloat };
std::string_view dtype_class_name(DtypeClass d);

// Random DAG of `size` operations. Operands come mostly from values nobody
// reads yet; one pick in ten reuses an already consumed value so paths
// reconverge. Integer results keep their natural width up to 32 bits.
// Every value without a reader is an output.
Program generate_synthetic(int size, DtypeClass dtype, std::uint64_t seed);

struct SuiteCase {
  std::string name;
  Program program;
  std::uint64_t seed = 0;  // 0 for hand-written programs
};

struct SuiteConfig {
  std::vector<SuiteCase> cases;
  std::vector<SolverChoice> solvers{SolverChoice::kAsap};
  std::vector<double> clocks_ns{10.0};
  PipelineOptions options;  // clock and solver are overridden per row
  int jobs = 1;
};

struct SuiteRow {
  std::string benchmark;
  std::uint64_t seed = 0;
  double clock_ns = 0.0;
  std::string solver;
  std::string status;  // solve status, or the error class when a stage failed
  int latency = -1;
  std::size_t impl_count = 0;
  std::size_t violations = 0;
  std::size_t timing_violations = 0;
  double saturate_s = 0.0;
  double schedule_s = 0.0;
  double total_s = 0.0;
};

// One row per (case, clock, solver); rows sorted by those keys.
std::vector<SuiteRow> run_suite(const SuiteConfig& cfg, const ImplLibrary& lib);
std::string suite_csv(const std::vector<SuiteRow>& rows);

// Parses every *.ir file of a directory, sorted by file name.
std::vector<SuiteCase> load_benchmark_dir(const std::filesystem::path& dir);

}  // namespace eqsched

#endif  // EQSCHED_BENCH_H_
