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

#include "eqsched/model.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace eqsched {

namespace {

constexpr double kTol = 1e-6;

std::vector<ClassId> distinct_children(const ImplNode& n) {
  std::vector<ClassId> out = n.args;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<ClassId> canonical_roots(const EGraph& g) {
  std::vector<ClassId> out;
  for (ClassId r : g.roots) {
    const ClassId c = g.find(r);
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  return out;
}

}  // namespace

std::string_view row_kind_name(RowKind k) {
  switch (k) {
    case RowKind::kRoot: return "root";
    case RowKind::kClassComplete: return "class-complete";
    case RowKind::kNodeComplete: return "node-complete";
    case RowKind::kDependency: return "dependency";
    case RowKind::kLatency: return "latency";
    case RowKind::kClassFinish: return "class-finish";
    case RowKind::kChaining: return "chaining";
    case RowKind::kMakespan: return "makespan";
  }
  return "?";
}

std::string_view solver_name(SolverKind s) {
  switch (s) {
    case SolverKind::kExact: return "exact-oracle";
    case SolverKind::kLpExport: return "lp-export";
    case SolverKind::kAsap: return "asap";
  }
  return "?";
}

std::string_view status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasible: return "feasible";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimeout: return "timeout";
  }
  return "?";
}

std::string node_var(char what, NodeId n) { return fmt::format("{}_n{}", what, n); }
std::string class_var(char what, ClassId c) { return fmt::format("{}_c{}", what, c); }

double default_alpha(std::size_t impl_nodes) {
  return 1.0 / (2.0 * (static_cast<double>(impl_nodes) + 1.0));
}

std::size_t JointModel::add_var(Var v) {
  const std::size_t i = vars.size();
  if (!index.emplace(v.name, i).second) throw Error("duplicate model variable " + v.name);
  vars.push_back(std::move(v));
  return i;
}

namespace {

// Variables and lookup tables of the joint model, without its rows.
struct Skeleton {
  JointModel m;
  std::unordered_map<NodeId, std::size_t> node_base;  // index of b_n; s_n and f_n follow
  std::unordered_map<ClassId, std::size_t> class_base;  // index of b_c; f_c follows
  std::size_t makespan = 0;
  bool has_makespan = false;
};

Skeleton model_skeleton(const ImplGraph& g, const ChainingConstraintSet& constraints,
                        std::optional<double> alpha) {
  if (!g.clock_ns()) throw Error("the joint model needs a clock period");
  Skeleton k;
  JointModel& m = k.m;
  m.clock_ns = g.clock_ns();
  m.alpha = alpha.value_or(default_alpha(g.nodes().size()));
  m.roots = canonical_roots(g.egraph());
  if (m.roots.empty()) throw Error("e-graph has no root class");
  m.classes = g.classes();

  double big_m = 1.0;
  for (const ImplNode& n : g.nodes()) {
    m.impl_nodes.push_back(n.id);
    big_m += n.profile->latency;
  }
  for (const auto& [_, paths] : constraints.pairs)
    for (const auto& p : paths) big_m += p.cuts;
  m.big_m = big_m;

  for (const ImplNode& n : g.nodes()) {
    Var b{node_var('b', n.id), VarType::kBinary, 0.0, 1.0};
    if (!n.usable) b.ub = 0.0;
    k.node_base[n.id] = m.add_var(std::move(b));
    m.add_var({node_var('s', n.id), VarType::kInteger, 0.0, std::nullopt});
    m.add_var({node_var('f', n.id), VarType::kInteger, 0.0, std::nullopt});
  }
  for (ClassId c : m.classes) {
    k.class_base[c] = m.add_var({class_var('b', c), VarType::kBinary, 0.0, 1.0});
    Var f{class_var('f', c), VarType::kInteger, 0.0, std::nullopt};
    if (g.is_leaf(c)) f.ub = 0.0;
    m.add_var(std::move(f));
  }
  k.has_makespan = m.roots.size() > 1;
  if (k.has_makespan) k.makespan = m.add_var({"F", VarType::kInteger, 0.0, std::nullopt});

  m.objective.emplace_back(k.has_makespan ? k.makespan : k.class_base.at(m.roots.front()) + 1, 1.0);
  for (const ImplNode& n : g.nodes()) m.objective.emplace_back(k.node_base.at(n.id), m.alpha);
  return k;
}

// Calls sink(row) once per row; the row object is reused between calls.
template <class Sink>
void emit_rows(const Skeleton& k, const ImplGraph& g, const ChainingConstraintSet& constraints,
               Sink&& sink) {
  const JointModel& m = k.m;
  const double big_m = m.big_m;
  auto b_n = [&](NodeId n) { return k.node_base.at(n); };
  auto s_n = [&](NodeId n) { return k.node_base.at(n) + 1; };
  auto f_n = [&](NodeId n) { return k.node_base.at(n) + 2; };
  auto b_c = [&](ClassId c) { return k.class_base.at(c); };
  auto f_c = [&](ClassId c) { return k.class_base.at(c) + 1; };
  Row row;
  auto emit = [&](RowKind kind, std::string name, Sense sense, double rhs) {
    row.kind = kind;
    row.name = std::move(name);
    row.sense = sense;
    row.rhs = rhs;
    sink(row);
    row.terms.clear();
  };

  for (ClassId r : m.roots) {
    row.terms.emplace_back(b_c(r), 1.0);
    emit(RowKind::kRoot, fmt::format("root_c{}", r), Sense::kEq, 1.0);
  }
  for (ClassId c : m.classes) {
    if (g.is_leaf(c)) continue;
    for (NodeId n : g.impls_of(c)) row.terms.emplace_back(b_n(n), 1.0);
    row.terms.emplace_back(b_c(c), -1.0);
    emit(RowKind::kClassComplete, fmt::format("cc_c{}", c), Sense::kGe, 0.0);
  }
  for (const ImplNode& n : g.nodes())
    for (ClassId c : distinct_children(n)) {
      row.terms = {{b_n(n.id), 1.0}, {b_c(c), -1.0}};
      emit(RowKind::kNodeComplete, fmt::format("nc_n{}_c{}", n.id, c), Sense::kLe, 0.0);
    }
  for (const ImplNode& n : g.nodes())
    for (ClassId c : distinct_children(n)) {
      row.terms = {{s_n(n.id), 1.0}, {f_c(c), -1.0}};
      emit(RowKind::kDependency, fmt::format("dep_n{}_c{}", n.id, c), Sense::kGe, 0.0);
    }
  for (const ImplNode& n : g.nodes()) {
    row.terms = {{f_n(n.id), 1.0}, {s_n(n.id), -1.0}};
    emit(RowKind::kLatency, fmt::format("lat_n{}", n.id), Sense::kEq,
         static_cast<double>(n.profile->latency));
  }
  for (const ImplNode& n : g.nodes()) {
    row.terms = {{f_c(n.cls), 1.0}, {f_n(n.id), -1.0}, {b_n(n.id), -big_m}};
    emit(RowKind::kClassFinish, fmt::format("cf_c{}_n{}", n.cls, n.id), Sense::kGe, -big_m);
  }
  std::size_t pi = 0;
  for (const auto& [key, paths] : constraints.pairs) {
    for (const auto& p : paths) {
      row.terms.emplace_back(s_n(key.second), 1.0);
      row.terms.emplace_back(f_n(key.first), -1.0);
      row.terms.emplace_back(b_n(p.src()), -big_m);
      for (const auto& e : p.edges) row.terms.emplace_back(b_n(e.dst), -big_m);
      const double rhs = p.cuts - big_m * static_cast<double>(p.edges.size() + 1);
      emit(RowKind::kChaining, fmt::format("ch{}_n{}_n{}", pi++, key.first, key.second),
           Sense::kGe, rhs);
    }
  }
  if (k.has_makespan)
    for (ClassId r : m.roots) {
      row.terms = {{k.makespan, 1.0}, {f_c(r), -1.0}};
      emit(RowKind::kMakespan, fmt::format("mk_c{}", r), Sense::kGe, 0.0);
    }
}

// Negative slack of a violated row, nullopt when it holds.
std::optional<Violation> evaluate_row(const Row& r, const std::vector<double>& values) {
  double lhs = 0.0;
  for (const auto& [var, coef] : r.terms) lhs += coef * values.at(var);
  double slack = 0.0;
  switch (r.sense) {
    case Sense::kGe: slack = lhs - r.rhs; break;
    case Sense::kLe: slack = r.rhs - lhs; break;
    case Sense::kEq: slack = -std::fabs(lhs - r.rhs); break;
  }
  if (slack >= -kTol) return std::nullopt;
  return Violation{r.name, r.kind, slack, fmt::format("lhs {} rhs {}", lhs, r.rhs)};
}

void check_bounds(const JointModel& m, const std::vector<double>& values, ViolationReport& rep) {
  for (std::size_t i = 0; i < m.vars.size(); ++i) {
    const Var& var = m.vars[i];
    const double x = values.at(i);
    bool bad = x < var.lb - kTol || (var.ub && x > *var.ub + kTol) ||
               std::fabs(x - std::round(x)) > kTol;
    if (bad)
      rep.violations.push_back({"bounds", RowKind::kRoot, -1.0,
                                fmt::format("{} = {} outside its domain", var.name, x)});
  }
}

}  // namespace

JointModel build_model(const ImplGraph& g, const ChainingConstraintSet& constraints,
                       std::optional<double> alpha) {
  Skeleton k = model_skeleton(g, constraints, alpha);
  emit_rows(k, g, constraints, [&](const Row& r) { k.m.rows.push_back(r); });
  return std::move(k.m);
}

namespace {

void write_terms(std::ostringstream& os, const JointModel& m,
                 const std::vector<std::pair<std::size_t, double>>& terms) {
  std::size_t on_line = 0;
  for (const auto& [var, coef] : terms) {
    if (on_line == 8) {
      os << "\n   ";
      on_line = 0;
    }
    os << (coef < 0 ? " - " : " + ") << fmt::format("{}", std::fabs(coef)) << ' '
       << m.vars[var].name;
    ++on_line;
  }
}

}  // namespace

std::string export_lp(const JointModel& m) {
  std::ostringstream os;
  os << fmt::format("\\ joint selection and scheduling model: {} variables, {} rows\n",
                    m.vars.size(), m.rows.size());
  os << fmt::format("\\ alpha = {} big_m = {}\n", m.alpha, m.big_m);
  os << "Minimize\n obj:";
  write_terms(os, m, m.objective);
  os << "\nSubject To\n";
  std::vector<const Row*> rows;
  for (const auto& r : m.rows) rows.push_back(&r);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row* a, const Row* b) { return a->kind < b->kind; });
  for (const Row* r : rows) {
    os << ' ' << r->name << ':';
    write_terms(os, m, r->terms);
    const char* sense = r->sense == Sense::kLe ? "<=" : r->sense == Sense::kGe ? ">=" : "=";
    os << ' ' << sense << ' ' << fmt::format("{}", r->rhs) << '\n';
  }
  os << "Bounds\n";
  for (const auto& var : m.vars) {
    if (!var.ub) continue;
    if (var.type == VarType::kBinary && *var.ub == 1.0) continue;
    if (*var.ub == var.lb)
      os << ' ' << var.name << " = " << fmt::format("{}", var.lb) << '\n';
    else
      os << fmt::format(" {} <= {} <= {}\n", var.lb, var.name, *var.ub);
  }
  os << "Generals\n";
  for (const auto& var : m.vars)
    if (var.type == VarType::kInteger) os << ' ' << var.name << '\n';
  os << "Binaries\n";
  for (const auto& var : m.vars)
    if (var.type == VarType::kBinary) os << ' ' << var.name << '\n';
  os << "End\n";
  return os.str();
}

const Placement* Solution::find(NodeId n) const {
  auto it = std::lower_bound(selected.begin(), selected.end(), n,
                             [](const Placement& p, NodeId id) { return p.node < id; });
  return it != selected.end() && it->node == n ? &*it : nullptr;
}

std::string solution_to_json(const Solution& s, const ImplGraph& g, std::size_t closure_paths) {
  nlohmann::ordered_json doc;
  doc["solver"] = solver_name(s.solver);
  doc["status"] = status_name(s.status);
  doc["latency"] = s.latency;
  doc["impl_count"] = s.impl_count();
  doc["closure_paths"] = closure_paths;
  doc["selected"] = nlohmann::ordered_json::array();
  for (const auto& p : s.selected) {
    const ImplNode& n = g.node(p.node);
    doc["selected"].push_back({{"enode", p.node},
                               {"class", n.cls},
                               {"impl", n.entry->identifier},
                               {"config", g.library().config(n.impl).id},
                               {"start", p.start},
                               {"finish", p.finish}});
  }
  doc["class_finish"] = nlohmann::ordered_json::object();
  for (const auto& [c, f] : s.class_finish) doc["class_finish"][std::to_string(c)] = f;
  return doc.dump(2);
}

std::vector<bool> viable_classes(const ImplGraph& g) {
  ClassId max_id = 0;
  for (ClassId c : g.classes()) max_id = std::max(max_id, c);
  std::vector<bool> viable(g.classes().empty() ? 0 : max_id + 1, false);
  for (ClassId c : g.classes())
    if (g.is_leaf(c)) viable[c] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (ClassId c : g.classes()) {
      if (viable[c]) continue;
      for (NodeId id : g.impls_of(c)) {
        const ImplNode& n = g.node(id);
        if (n.usable && std::all_of(n.args.begin(), n.args.end(),
                                    [&](ClassId a) { return viable[a]; })) {
          viable[c] = true;
          changed = true;
          break;
        }
      }
    }
  }
  return viable;
}

std::optional<Solution> schedule_selection(const ImplGraph& g,
                                           const ChainingConstraintSet& constraints,
                                           const Selection& sel) {
  return SelectionScheduler(g, constraints)(sel);
}

SelectionScheduler::SelectionScheduler(const ImplGraph& g, const ChainingConstraintSet& constraints)
    : g_(&g), by_dst_(constraints.by_destination(true)), roots_(canonical_roots(g.egraph())) {}

std::optional<Solution> SelectionScheduler::operator()(const Selection& sel) const {
  const ImplGraph& g = *g_;
  const auto& by_dst = by_dst_;
  const auto& roots = roots_;

  // Post-order over the selected term; gray marks the current DFS stack.
  enum Color : char { kWhite, kGray, kBlack };
  std::map<ClassId, Color> color;
  std::vector<ClassId> order;
  bool cyclic = false;
  std::function<void(ClassId)> visit = [&](ClassId c) {
    if (cyclic) return;
    auto& col = color[c];
    if (col == kBlack) return;
    if (col == kGray) {
      cyclic = true;
      return;
    }
    if (g.is_leaf(c)) {
      col = kBlack;
      order.push_back(c);
      return;
    }
    col = kGray;
    auto it = sel.find(c);
    if (it == sel.end()) throw Error(fmt::format("selection misses class {}", c));
    const ImplNode& n = g.node(it->second);
    if (n.cls != c) throw Error(fmt::format("node {} is not in class {}", n.id, c));
    for (ClassId a : n.args) visit(a);
    color[c] = kBlack;
    order.push_back(c);
  };
  for (ClassId r : roots) visit(r);
  if (cyclic) return std::nullopt;

  std::set<NodeId> chosen;
  for (ClassId c : order)
    if (!g.is_leaf(c)) chosen.insert(sel.at(c));

  Solution s;
  std::map<NodeId, int> finish;
  for (ClassId c : order) {
    if (g.is_leaf(c)) {
      s.class_finish[c] = 0;
      continue;
    }
    const ImplNode& n = g.node(sel.at(c));
    int start = 0;
    for (ClassId a : n.args) start = std::max(start, s.class_finish.at(a));
    if (auto it = by_dst.find(n.id); it != by_dst.end()) {
      for (const TimedPath* p : it->second) {
        bool active = true;
        for (const auto& e : p->edges)
          if (!chosen.count(e.src)) active = false;
        if (active) start = std::max(start, finish.at(p->src()) + p->cuts);
      }
    }
    const int f = start + n.profile->latency;
    finish[n.id] = f;
    s.class_finish[c] = f;
    s.selected.push_back({n.id, start, f});
  }
  std::sort(s.selected.begin(), s.selected.end(),
            [](const Placement& a, const Placement& b) { return a.node < b.node; });
  for (ClassId r : roots) s.latency = std::max(s.latency, s.class_finish.at(r));
  return s;
}

ViolationReport check_assignment(const JointModel& m, const std::vector<double>& values) {
  ViolationReport rep;
  check_bounds(m, values, rep);
  for (const auto& r : m.rows)
    if (auto v = evaluate_row(r, values)) rep.violations.push_back(std::move(*v));
  return rep;
}

std::vector<double> solution_assignment(const Solution& sol, const JointModel& m,
                                        const ImplGraph& g) {
  std::vector<double> x(m.vars.size(), 0.0);
  auto set = [&](const std::string& name, double value) {
    if (m.has_var(name)) x[m.var(name)] = value;
  };
  for (const auto& [c, f] : sol.class_finish) {
    set(class_var('b', c), 1.0);
    set(class_var('f', c), f);
  }
  auto class_finish = [&](ClassId c) {
    auto it = sol.class_finish.find(c);
    return it == sol.class_finish.end() ? 0 : it->second;
  };
  for (const ImplNode& n : g.nodes()) {
    if (const Placement* p = sol.find(n.id)) {
      set(node_var('b', n.id), 1.0);
      set(node_var('s', n.id), p->start);
      set(node_var('f', n.id), p->finish);
      continue;
    }
    int start = 0;
    for (ClassId a : n.args) start = std::max(start, class_finish(a));
    set(node_var('s', n.id), start);
    set(node_var('f', n.id), start + n.profile->latency);
  }
  set("F", sol.latency);
  return x;
}

namespace {

bool known_nodes(const Solution& sol, const ImplGraph& g, ViolationReport& rep) {
  for (const auto& p : sol.selected) {
    if (!g.contains(p.node)) {
      rep.violations.push_back({"bounds", RowKind::kRoot, -1.0,
                                fmt::format("node {} is not an implementation node", p.node)});
      return false;
    }
  }
  return true;
}

// Kahn over the selected nodes.
void check_acyclic(const Solution& sol, const ImplGraph& g, ViolationReport& rep) {
  std::map<NodeId, std::vector<NodeId>> succ;
  std::map<NodeId, int> indeg;
  std::map<ClassId, std::vector<NodeId>> in_class;
  for (const auto& p : sol.selected) {
    indeg[p.node];
    in_class[g.node(p.node).cls].push_back(p.node);
  }
  for (const auto& p : sol.selected) {
    for (ClassId a : distinct_children(g.node(p.node))) {
      auto it = in_class.find(a);
      if (it == in_class.end()) continue;
      for (NodeId c : it->second) {
        succ[c].push_back(p.node);
        ++indeg[p.node];
      }
    }
  }
  std::vector<NodeId> ready;
  for (const auto& [n, d] : indeg)
    if (d == 0) ready.push_back(n);
  std::size_t seen = 0;
  while (!ready.empty()) {
    const NodeId n = ready.back();
    ready.pop_back();
    ++seen;
    for (NodeId s : succ[n])
      if (--indeg[s] == 0) ready.push_back(s);
  }
  if (seen != sol.selected.size())
    rep.violations.push_back({"acyclic", RowKind::kDependency, -1.0,
                              "selected implementations form a cyclic term"});
}

}  // namespace

ViolationReport check_solution(const Solution& sol, const JointModel& m, const ImplGraph& g) {
  ViolationReport rep;
  if (!known_nodes(sol, g, rep)) return rep;
  rep = check_assignment(m, solution_assignment(sol, m, g));
  check_acyclic(sol, g, rep);
  return rep;
}

ViolationReport check_solution(const Solution& sol, const ImplGraph& g,
                               const ChainingConstraintSet& constraints) {
  ViolationReport rep;
  if (!known_nodes(sol, g, rep)) return rep;
  const Skeleton k = model_skeleton(g, constraints, std::nullopt);
  const std::vector<double> x = solution_assignment(sol, k.m, g);
  check_bounds(k.m, x, rep);
  emit_rows(k, g, constraints, [&](const Row& r) {
    if (auto v = evaluate_row(r, x)) rep.violations.push_back(std::move(*v));
  });
  check_acyclic(sol, g, rep);
  return rep;
}

}  // namespace eqsched
