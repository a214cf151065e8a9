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

// Command-line driver: parse, saturate, schedule, validate, emit.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "eqsched/bench.h"
#include "eqsched/pipeline.h"

#ifndef EQSCHED_DATA_DIR
#define EQSCHED_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace eqsched;

namespace {

enum Exit {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kSaturation = 3,
  kInfeasibleClock = 4,
  kUnschedulable = 5,
  kTimeout = 6,
  kLibrary = 7,
  kTiming = 8,
};

struct ExitError {
  int code;
  std::string message;
};

bool quiet = false;

void log(std::string_view level, const std::string& msg) {
  if (quiet && level == "INFO") return;
  std::cerr << level << ": " << msg << '\n';
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ExitError{kUsage, "cannot read " + p.string()};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << text)) throw ExitError{kUsage, "cannot write " + p.string()};
}

struct Args {
  std::string program;
  std::string lib = std::string(EQSCHED_DATA_DIR) + "/kintex_sample.json";
  double clock_mhz = 0.0;
  double clock_ns = 0.0;
  std::string solver = "asap";
  int top_k = 3;
  int depth_limit = 20;
  int max_iters = 30;
  std::size_t node_limit = 100'000;
  std::size_t class_limit = 10'000;
  double timeout_s = 3600.0;
  double saturation_timeout_s = 60.0;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  int jobs = 1;
  bool stamp = false;
  bool per_op = false;
  bool allow_partial = false;
  bool saturated = true;
  // bench
  std::vector<int> sizes{100, 200, 300, 400, 500, 600};
  std::string dtype = "int";
  int seeds = 3;
  std::vector<std::string> solvers{"asap"};
  std::vector<double> clocks_mhz;
  std::string bench_dir;
};

double clock_of(const Args& a) {
  if (a.clock_ns > 0) return a.clock_ns;
  if (a.clock_mhz > 0) return 1000.0 / a.clock_mhz;
  throw ExitError{kUsage, "a positive --clock-mhz or --clock-ns is required"};
}

PipelineOptions options_of(const Args& a) {
  PipelineOptions o;
  o.clock_ns = clock_of(a);
  auto s = solver_from_name(a.solver);
  if (!s) throw ExitError{kUsage, "unknown solver '" + a.solver + "'"};
  o.solver = *s;
  if (a.top_k < 1) throw ExitError{kUsage, "--top-k must be at least 1"};
  o.top_k = a.top_k;
  o.depth_limit = a.depth_limit;
  o.limits.max_iterations = a.max_iters;
  o.limits.max_nodes = a.node_limit;
  o.limits.max_classes = a.class_limit;
  o.limits.timeout = std::chrono::milliseconds(static_cast<long long>(a.saturation_timeout_s * 1000));
  o.exact.timeout = std::chrono::milliseconds(static_cast<long long>(a.timeout_s * 1000));
  o.per_operation_only = a.per_op;
  return o;
}

Program load_program(const std::string& path) {
  const fs::path p(path);
  return parse_program(read_file(p), p.stem().string());
}

std::string stamp_line(const Args& a, std::string_view comment) {
  if (!a.stamp) return "";
  const std::time_t now = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return fmt::format("{} generated {}\n", comment, buf);
}

void report_saturation(const PipelineResult& r, const Args& a) {
  log("INFO", fmt::format("saturation: {} after {} iterations, {} classes, {} nodes",
                          stop_reason_name(r.saturation.stop), r.saturation.iterations,
                          r.egraph->num_classes(), r.egraph->num_nodes()));
  if (r.saturation_truncated()) {
    const std::string msg =
        fmt::format("saturation stopped early ({})", stop_reason_name(r.saturation.stop));
    if (!a.allow_partial) throw ExitError{kSaturation, msg + "; pass --allow-partial to continue"};
    log("WARNING", msg);
  }
}

int cmd_run(const Args& a) {
  const Program p = load_program(a.program);
  const ImplLibrary lib = load_library_file(a.lib);
  const PipelineOptions opts = options_of(a);
  const fs::path out(a.out_dir);
  if (opts.solver == SolverChoice::kExportLp) {
    const PipelineResult r = prepare(p, lib, opts);
    report_saturation(r, a);
    write_file(out / (p.name + ".lp"), stamp_line(a, "\\") + export_lp(pipeline_model(r)));
    log("INFO", fmt::format("wrote {}", (out / (p.name + ".lp")).string()));
    return kOk;
  }
  PipelineResult r = prepare(p, lib, opts);
  report_saturation(r, a);
  schedule_prepared(r, opts);
  const Solution& s = *r.solution;
  if (!r.netlist) throw ExitError{kTimeout, "exact search timed out without a solution"};
  write_file(out / (p.name + ".v"), stamp_line(a, "//") + emit_verilog(*r.netlist, *r.library));
  write_file(out / (p.name + ".sched.json"), solution_to_json(s, *r.graph, r.added_paths) + "\n");
  write_file(out / (p.name + ".report.txt"),
             stamp_line(a, "#") + emit_schedule_report(s, *r.graph, r.program));
  log("INFO", fmt::format("latency {} cycles, {} implementations, solver {} ({})", s.latency,
                          s.impl_count(), solver_name(s.solver), status_name(s.status)));
  if (r.closure_rounds > 0)
    log("INFO", fmt::format("timing closure added {} paths over {} re-solves", r.added_paths,
                            r.closure_rounds));
  if (!r.violations.ok())
    throw ExitError{kUnschedulable, fmt::format("solution violates {} model rows (first: {})",
                                                r.violations.size(),
                                                r.violations.violations.front().row)};
  if (!r.timing.ok())
    throw ExitError{kTiming, fmt::format("netlist has {} register-free paths over the clock",
                                         r.timing.violations.size() + r.timing.unusable.size())};
  if (s.status == SolveStatus::kTimeout)
    throw ExitError{kTimeout, "exact search timed out; artifacts hold the best solution found"};
  return kOk;
}

int cmd_dot(const Args& a) {
  const Program p = load_program(a.program);
  std::string text;
  if (a.saturated) {
    const ImplLibrary lib = load_library_file(a.lib);
    EGraph g = egraph_from_program(p);
    auto rules = library_algebraic_rules(a.per_op ? lib.per_operation_only() : lib);
    for (auto& r : enumerate_impl_rules(a.per_op ? lib.per_operation_only() : lib))
      rules.push_back(std::move(r));
    SaturationLimits lim;
    lim.max_iterations = a.max_iters;
    lim.max_nodes = a.node_limit;
    lim.max_classes = a.class_limit;
    saturate(g, rules, lim);
    text = g.to_dot(p.name);
  } else {
    text = egraph_from_program(p).to_dot(p.name);
  }
  if (a.out_dir == "-" || a.out_dir == ".") {
    std::cout << text;
  } else {
    write_file(fs::path(a.out_dir) / (p.name + ".dot"), text);
  }
  return kOk;
}

int cmd_paths(const Args& a) {
  const Program p = load_program(a.program);
  const ImplLibrary lib = load_library_file(a.lib);
  const PipelineResult r = prepare(p, lib, options_of(a));
  report_saturation(r, a);
  const std::string csv = path_table_csv(r.constraints, *r.graph);
  if (a.out_dir == "-" || a.out_dir == ".") {
    std::cout << csv;
  } else {
    write_file(fs::path(a.out_dir) / (p.name + ".paths.csv"), csv);
  }
  return kOk;
}

int cmd_bench(const Args& a) {
  const ImplLibrary lib = load_library_file(a.lib);
  SuiteConfig cfg;
  Args base = a;
  if (base.clock_mhz <= 0 && base.clock_ns <= 0) base.clock_mhz = 100.0;
  cfg.options = options_of(base);
  cfg.jobs = a.jobs;
  cfg.clocks_ns.clear();
  if (a.clocks_mhz.empty()) {
    cfg.clocks_ns.push_back(cfg.options.clock_ns);
  } else {
    for (double f : a.clocks_mhz) {
      if (f <= 0) throw ExitError{kUsage, "clock frequencies must be positive"};
      cfg.clocks_ns.push_back(1000.0 / f);
    }
  }
  cfg.solvers.clear();
  for (const auto& s : a.solvers) {
    auto c = solver_from_name(s);
    if (!c || *c == SolverChoice::kExportLp) throw ExitError{kUsage, "bench solvers: asap, exact"};
    cfg.solvers.push_back(*c);
  }
  if (!a.bench_dir.empty()) {
    cfg.cases = load_benchmark_dir(a.bench_dir);
  } else {
    std::vector<DtypeClass> kinds;
    if (a.dtype == "int" || a.dtype == "both") kinds.push_back(DtypeClass::kInt);
    if (a.dtype == "float" || a.dtype == "both") kinds.push_back(DtypeClass::kFloat);
    if (kinds.empty()) throw ExitError{kUsage, "--dtype must be int, float or both"};
    for (DtypeClass k : kinds)
      for (int size : a.sizes)
        for (int s = 0; s < a.seeds; ++s) {
          const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(s);
          SuiteCase c;
          c.program = generate_synthetic(size, k, seed);
          c.name = c.program.name;
          c.seed = seed;
          cfg.cases.push_back(std::move(c));
        }
  }
  const std::string csv = suite_csv(run_suite(cfg, lib));
  if (a.out_dir == "-" || a.out_dir == ".") {
    std::cout << csv;
  } else {
    write_file(fs::path(a.out_dir) / "bench.csv", csv);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Args a;
  CLI::App app{"E-graph based implementation selection and scheduling"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  app.add_option("--lib", a.lib, "Implementation library (JSON)");
  auto* mhz = app.add_option("--clock-mhz", a.clock_mhz, "Target clock frequency in MHz");
  auto* ns = app.add_option("--clock-ns", a.clock_ns, "Target clock period in ns");
  mhz->excludes(ns);
  app.add_option("--solver", a.solver, "asap, exact or export-lp")
      ->check(CLI::IsMember({"asap", "exact", "export-lp"}));
  app.add_option("--top-k", a.top_k, "Longest combinational paths kept per node pair");
  app.add_option("--depth-limit", a.depth_limit, "Maximum edges per enumerated path");
  app.add_option("--max-iters", a.max_iters, "Saturation iteration limit");
  app.add_option("--node-limit", a.node_limit, "Saturation e-node limit");
  app.add_option("--class-limit", a.class_limit, "Saturation e-class limit");
  app.add_option("--timeout-s", a.timeout_s, "Exact search time limit in seconds");
  app.add_option("--saturation-timeout-s", a.saturation_timeout_s, "Saturation time limit");
  app.add_option("--seed", a.seed, "First seed for generated benchmarks");
  app.add_option("-o,--output", a.out_dir, "Output directory");
  app.add_option("--jobs", a.jobs, "Parallel benchmark rows");
  app.add_flag("--stamp", a.stamp, "Write a generation timestamp into artifacts");
  app.add_flag("--per-op", a.per_op, "Restrict implementations to single-operation entries");
  app.add_flag("--allow-partial", a.allow_partial, "Continue after saturation hits a size limit");
  app.add_flag("-q,--quiet", quiet, "Only warnings and errors on standard error");
  app.add_option("program", a.program, "Program file");

  auto* dot = app.add_subcommand("dot", "Write the e-graph as Graphviz text");
  dot->add_option("program", a.program, "Program file")->required();
  dot->add_flag("!--initial", a.saturated, "Show the e-graph before saturation");

  auto* lp = app.add_subcommand("export-lp", "Write the joint model in CPLEX LP format");
  lp->add_option("program", a.program, "Program file")->required();

  auto* paths = app.add_subcommand("paths", "Write the top-k combinational path table");
  paths->add_option("program", a.program, "Program file")->required();

  auto* bench = app.add_subcommand("bench", "Run a benchmark suite and write CSV");
  bench->add_option("--sizes", a.sizes, "Synthetic program sizes")->delimiter(',');
  bench->add_option("--dtype", a.dtype, "int, float or both");
  bench->add_option("--seeds", a.seeds, "Seeds per size");
  bench->add_option("--solvers", a.solvers, "asap and/or exact")->delimiter(',');
  bench->add_option("--clocks-mhz", a.clocks_mhz, "Clock frequencies")->delimiter(',');
  bench->add_option("--dir", a.bench_dir, "Run the .ir files of a directory instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*dot) return cmd_dot(a);
    if (*paths) return cmd_paths(a);
    if (*bench) return cmd_bench(a);
    if (*lp) a.solver = "export-lp";
    if (a.program.empty()) throw ExitError{kUsage, "no program file given"};
    return cmd_run(a);
  } catch (const ExitError& e) {
    log("ERROR", e.message);
    return e.code;
  } catch (const ParseError& e) {
    log("ERROR", e.what());
    return kParse;
  } catch (const LibraryError& e) {
    log("ERROR", e.what());
    return kLibrary;
  } catch (const InfeasibleClockError& e) {
    log("ERROR", e.what());
    return kInfeasibleClock;
  } catch (const UnschedulableError& e) {
    log("ERROR", e.what());
    return kUnschedulable;
  } catch (const std::exception& e) {
    log("ERROR", e.what());
    return kUsage;
  }
}
