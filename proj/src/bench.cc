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

#include "eqsched/bench.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <fmt/format.h>

namespace eqsched {

std::string_view dtype_class_name(DtypeClass d) { return d == DtypeClass::kInt ? "int" : "float"; }

Program generate_synthetic(int size, DtypeClass dtype, std::uint64_t seed) {
  if (size < 1) throw Error("synthetic program size must be at least 1");
  // Modulo draws keep the sequence identical across standard libraries.
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

  const bool is_int = dtype == DtypeClass::kInt;
  const std::vector<std::pair<Op, int>> weights =
      is_int ? std::vector<std::pair<Op, int>>{{Op::kAdd, 3}, {Op::kSub, 2}, {Op::kMul, 3},
                                               {Op::kDiv, 1}, {Op::kAnd, 1}, {Op::kOr, 1},
                                               {Op::kXor, 1}}
             : std::vector<std::pair<Op, int>>{{Op::kAdd, 3}, {Op::kSub, 2}, {Op::kMul, 3},
                                               {Op::kDiv, 1}, {Op::kExp, 1}, {Op::kSqrt, 1},
                                               {Op::kLog, 1}, {Op::kRecip, 1}};
  int total = 0;
  for (const auto& [_, w] : weights) total += w;

  Program p;
  p.name = fmt::format("syn_{}_{}_s{}", dtype_class_name(dtype), size, seed);
  const DataType in_type = is_int ? DataType{TypeKind::kSigned, 16} : DataType{TypeKind::kFloat, 32};
  const int inputs = 2 + size / 10;
  std::vector<bool> read;
  std::vector<ValueId> unread;
  for (int i = 0; i < inputs; ++i) {
    p.values.push_back({fmt::format("x{}", i), Op::kInput, {}, in_type, std::nullopt});
    read.push_back(false);
    unread.push_back(p.values.size() - 1);
  }
  auto operand = [&]() -> ValueId {
    ValueId v = 0;
    if (unread.empty() || pick(10) == 0) {
      v = pick(p.values.size());
    } else {
      const std::size_t i = pick(unread.size());
      v = unread[i];
    }
    if (!read[v]) {
      read[v] = true;
      unread.erase(std::find(unread.begin(), unread.end(), v));
    }
    return v;
  };
  for (int i = 0; i < size; ++i) {
    int r = static_cast<int>(pick(static_cast<std::size_t>(total)));
    Op op = weights.front().first;
    for (const auto& [o, w] : weights) {
      if (r < w) {
        op = o;
        break;
      }
      r -= w;
    }
    Value v;
    v.name = fmt::format("v{}", i);
    v.op = op;
    for (int a = 0; a < op_arity(op); ++a) v.operands.push_back(operand());
    if (is_int) {
      std::vector<DataType> types;
      for (ValueId a : v.operands) types.push_back(p.values[a].dtype);
      v.dtype = {TypeKind::kSigned, std::min(32, natural_width(op, types))};
    } else {
      v.dtype = in_type;
    }
    p.values.push_back(std::move(v));
    read.push_back(false);
    unread.push_back(p.values.size() - 1);
  }
  for (ValueId v : unread)
    if (p.values[v].op != Op::kInput) p.outputs.push_back(v);
  std::sort(p.outputs.begin(), p.outputs.end());
  return p;
}

namespace {

SuiteRow run_row(const SuiteCase& c, double clock_ns, SolverChoice solver, const PipelineOptions& base,
                 const ImplLibrary& lib) {
  SuiteRow row;
  row.benchmark = c.name;
  row.seed = c.seed;
  row.clock_ns = clock_ns;
  row.solver = solver == SolverChoice::kExact ? "exact" : "asap";
  PipelineOptions opts = base;
  opts.clock_ns = clock_ns;
  opts.solver = solver;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const PipelineResult r = run_pipeline(c.program, lib, opts);
    row.saturate_s = r.times.saturate_s;
    row.schedule_s = r.times.schedule_s;
    if (r.solution) {
      row.status = std::string(status_name(r.solution->status));
      if (!r.solution->selected.empty() || r.netlist) {
        row.latency = r.solution->latency;
        row.impl_count = r.solution->impl_count();
      }
    }
    row.violations = r.violations.size();
    row.timing_violations = r.timing.violations.size() + r.timing.unusable.size();
  } catch (const InfeasibleClockError&) {
    row.status = "infeasible-clock";
  } catch (const UnschedulableError&) {
    row.status = "unschedulable";
  } catch (const std::exception&) {
    row.status = "error";
  }
  row.total_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

}  // namespace

std::vector<SuiteRow> run_suite(const SuiteConfig& cfg, const ImplLibrary& lib) {
  struct Job {
    std::size_t c;
    double clock;
    SolverChoice solver;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cfg.cases.size(); ++c)
    for (double clk : cfg.clocks_ns)
      for (SolverChoice s : cfg.solvers) jobs.push_back({c, clk, s});
  std::vector<SuiteRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i; (i = next++) < jobs.size();)
      rows[i] = run_row(cfg.cases[jobs[i].c], jobs[i].clock, jobs[i].solver, cfg.options, lib);
  };
  const int n = std::max(1, cfg.jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::sort(rows.begin(), rows.end(), [](const SuiteRow& a, const SuiteRow& b) {
    return std::tie(a.benchmark, a.seed, a.clock_ns, a.solver) <
           std::tie(b.benchmark, b.seed, b.clock_ns, b.solver);
  });
  return rows;
}

std::string suite_csv(const std::vector<SuiteRow>& rows) {
  std::string out =
      "benchmark,seed,clock_ns,solver,status,latency,impl_count,violations,timing_violations,"
      "saturate_s,schedule_s,total_s\n";
  for (const auto& r : rows)
    out += fmt::format("{},{},{:.4f},{},{},{},{},{},{},{:.4f},{:.4f},{:.4f}\n", r.benchmark, r.seed,
                       r.clock_ns, r.solver, r.status, r.latency, r.impl_count, r.violations,
                       r.timing_violations, r.saturate_s, r.schedule_s, r.total_s);
  return out;
}

std::vector<SuiteCase> load_benchmark_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".ir") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<SuiteCase> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw Error("cannot read " + f.string());
    std::stringstream ss;
    ss << in.rdbuf();
    SuiteCase c;
    c.name = f.stem().string();
    c.program = parse_program(ss.str(), c.name);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace eqsched
