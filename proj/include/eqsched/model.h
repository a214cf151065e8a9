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

#ifndef EQSCHED_MODEL_H_
#define EQSCHED_MODEL_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "eqsched/timing.h"

namespace eqsched {

class UnschedulableError : public Error {
 public:
  using Error::Error;
};

enum class RowKind {
  kRoot,
  kClassComplete,
  kNodeComplete,
  kDependency,
  kLatency,
  kClassFinish,
  kChaining,
  kMakespan,
};
std::string_view row_kind_name(RowKind k);

enum class VarType { kBinary, kInteger };

struct Var {
  std::string name;
  VarType type = VarType::kInteger;
  double lb = 0.0;
  std::optional<double> ub;
};

enum class Sense { kLe, kGe, kEq };

struct Row {
  RowKind kind = RowKind::kRoot;
  std::string name;
  std::vector<std::pair<std::size_t, double>> terms;  // (var index, coefficient)
  Sense sense = Sense::kGe;
  double rhs = 0.0;
};

// Joint implementation selection and scheduling as a mixed integer program.
// Per implementation node: b_n<id>, s_n<id>, f_n<id>; per class: b_c<id>,
// f_c<id>; with several roots also the makespan F.
struct JointModel {
  double alpha = 0.0;
  double big_m = 0.0;
  std::optional<double> clock_ns;
  std::vector<Var> vars;
  std::vector<Row> rows;
  std::vector<std::pair<std::size_t, double>> objective;
  std::vector<ClassId> roots;
  std::vector<NodeId> impl_nodes;
  std::vector<ClassId> classes;

  std::size_t var(const std::string& name) const { return index.at(name); }
  bool has_var(const std::string& name) const { return index.count(name) != 0; }
  std::size_t add_var(Var v);

  std::unordered_map<std::string, std::size_t> index;
};

std::string node_var(char what, NodeId n);    // b_n7, s_n7, f_n7
std::string class_var(char what, ClassId c);  // b_c3, f_c3

// Small coefficient on implementation count: never trades a cycle.
double default_alpha(std::size_t impl_nodes);

JointModel build_model(const ImplGraph& g, const ChainingConstraintSet& constraints,
                       std::optional<double> alpha = {});

// CPLEX LP text: objective, rows in kind order, bounds, generals, binaries.
std::string export_lp(const JointModel& m);

enum class SolverKind { kExact, kLpExport, kAsap };
enum class SolveStatus { kOptimal, kFeasible, kInfeasible, kTimeout };
std::string_view solver_name(SolverKind s);
std::string_view status_name(SolveStatus s);

struct Placement {
  NodeId node = 0;
  int start = 0;
  int finish = 0;
};

struct Solution {
  std::vector<Placement> selected;  // by node id
  std::map<ClassId, int> class_finish;
  int latency = 0;
  SolverKind solver = SolverKind::kAsap;
  SolveStatus status = SolveStatus::kFeasible;

  std::size_t impl_count() const { return selected.size(); }
  const Placement* find(NodeId n) const;
  // Objective value of the joint model.
  double objective(double alpha) const { return latency + alpha * static_cast<double>(impl_count()); }
};

// `closure_paths` counts chaining paths added after the first solve.
std::string solution_to_json(const Solution& s, const ImplGraph& g, std::size_t closure_paths = 0);

// Exactly one implementation node per class that the roots need.
using Selection = std::map<ClassId, NodeId>;

// Earliest schedule of a fixed selection under dependency and chaining
// constraints. Nullopt when the selection induces a cyclic term.
std::optional<Solution> schedule_selection(const ImplGraph& g,
                                           const ChainingConstraintSet& constraints,
                                           const Selection& sel);

// Same, reusing the path index across many selections.
class SelectionScheduler {
 public:
  SelectionScheduler(const ImplGraph& g, const ChainingConstraintSet& constraints);
  std::optional<Solution> operator()(const Selection& sel) const;

 private:
  const ImplGraph* g_;
  std::unordered_map<NodeId, std::vector<const TimedPath*>> by_dst_;
  std::vector<ClassId> roots_;
};

// Classes for which some acyclic choice of usable implementations exists.
std::vector<bool> viable_classes(const ImplGraph& g);

struct Violation {
  std::string row;  // row name, or a pseudo-row such as "acyclic" or "bounds"
  RowKind kind = RowKind::kRoot;
  double slack = 0.0;  // negative amount by which the row is violated
  std::string detail;
};

struct ViolationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::size_t size() const { return violations.size(); }
};

// Evaluates every row at a full variable assignment.
ViolationReport check_assignment(const JointModel& m, const std::vector<double>& values);

// Expands the solution to a full assignment (unselected nodes start as
// early as their children allow, unselected classes finish at 0) and checks
// it, together with acyclicity of the selected term.
ViolationReport check_solution(const Solution& sol, const JointModel& m, const ImplGraph& g);
// Same checks without holding the rows in memory.
ViolationReport check_solution(const Solution& sol, const ImplGraph& g,
                               const ChainingConstraintSet& constraints);
std::vector<double> solution_assignment(const Solution& sol, const JointModel& m,
                                        const ImplGraph& g);

}  // namespace eqsched

#endif  // EQSCHED_MODEL_H_
