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

#include "eqsched/egraph.h"

#include <algorithm>
#include <functional>
#include <tuple>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace eqsched {

namespace {

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

struct MatchState {
  std::vector<std::pair<std::string, ClassId>> binding;
  std::vector<ClassId> internal;
};

}  // namespace

std::size_t ENodeHash::operator()(const ENode& n) const {
  std::size_t h = std::hash<std::string>{}(n.symbol);
  for (ClassId a : n.args) hash_combine(h, a);
  hash_combine(h, static_cast<std::size_t>(n.dtype.kind) * 131 + n.dtype.bits);
  hash_combine(h, std::hash<std::string>{}(n.payload));
  if (n.impl) {
    hash_combine(h, n.impl->entry);
    hash_combine(h, n.impl->config);
  }
  return h;
}

ClassId Match::at(const std::string& var) const {
  for (const auto& [name, cls] : binding)
    if (name == var) return cls;
  throw Error("unbound pattern variable ?" + var);
}

ClassId EGraph::find(ClassId id) const {
  ClassId root = id;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[id] != root) {
    ClassId next = parent_[id];
    parent_[id] = root;
    id = next;
  }
  return root;
}

ENode EGraph::canonical(const ENode& n) const {
  ENode c = n;
  for (ClassId& a : c.args) a = find(a);
  return c;
}

NodeId EGraph::push_node(ENode n, ClassId cls) {
  const NodeId id = static_cast<NodeId>(nodes_.size());
  hashcons_.emplace(n, id);
  nodes_.push_back(std::move(n));
  node_class_.push_back(cls);
  node_live_.push_back(true);
  classes_[cls].nodes.push_back(id);
  ++num_live_nodes_;
  return id;
}

std::optional<NodeId> EGraph::lookup(const ENode& n) const {
  auto it = hashcons_.find(canonical(n));
  if (it == hashcons_.end()) return std::nullopt;
  return it->second;
}

ClassId EGraph::add(ENode n) {
  for (ClassId a : n.args)
    if (a >= classes_.size()) throw Error(fmt::format("unknown child class {}", a));
  n = canonical(n);
  if (auto it = hashcons_.find(n); it != hashcons_.end()) return class_of(it->second);
  const ClassId id = static_cast<ClassId>(classes_.size());
  classes_.push_back(EClass{id, {}, n.dtype});
  parent_.push_back(id);
  ++num_classes_;
  push_node(std::move(n), id);
  return id;
}

bool EGraph::add_to_class(ClassId cls, ENode n) {
  if (cls >= classes_.size()) throw Error(fmt::format("unknown class {}", cls));
  for (ClassId a : n.args)
    if (a >= classes_.size()) throw Error(fmt::format("unknown child class {}", a));
  cls = find(cls);
  if (n.dtype != classes_[cls].dtype)
    throw Error(fmt::format("node '{}' of type {} inserted into class {} of type {}", n.symbol,
                            n.dtype.str(), cls, classes_[cls].dtype.str()));
  n = canonical(n);
  if (hashcons_.count(n)) return false;
  push_node(std::move(n), cls);
  return true;
}

ClassId EGraph::merge(ClassId a, ClassId b) {
  a = find(a);
  b = find(b);
  if (a == b) return a;
  if (classes_[a].dtype != classes_[b].dtype)
    throw Error(fmt::format("cannot merge class {} ({}) with class {} ({})", a,
                            classes_[a].dtype.str(), b, classes_[b].dtype.str()));
  if (b < a) std::swap(a, b);
  parent_[b] = a;
  auto& moved = classes_[b].nodes;
  classes_[a].nodes.insert(classes_[a].nodes.end(), moved.begin(), moved.end());
  moved.clear();
  --num_classes_;
  dirty_ = true;
  return a;
}

void EGraph::rebuild() {
  for (;;) {
    bool merged = false;
    hashcons_.clear();
    for (NodeId id = 0; id < nodes_.size(); ++id) {
      if (!node_live_[id]) continue;
      nodes_[id] = canonical(nodes_[id]);
      auto [it, inserted] = hashcons_.try_emplace(nodes_[id], id);
      if (inserted) continue;
      if (class_of(it->second) != class_of(id)) {
        merge(node_class_[it->second], node_class_[id]);
        merged = true;
      }
      node_live_[id] = false;
      --num_live_nodes_;
    }
    if (!merged) break;
  }
  for (auto& c : classes_) c.nodes.clear();
  for (NodeId id = 0; id < nodes_.size(); ++id)
    if (node_live_[id]) classes_[class_of(id)].nodes.push_back(id);
  dirty_ = false;
}

std::vector<ClassId> EGraph::class_ids() const {
  std::vector<ClassId> out;
  out.reserve(num_classes_);
  for (ClassId id = 0; id < classes_.size(); ++id)
    if (find(id) == id) out.push_back(id);
  return out;
}

bool EGraph::is_leaf_class(ClassId id) const {
  const EClass& c = eclass(id);
  return std::any_of(c.nodes.begin(), c.nodes.end(),
                     [&](NodeId n) { return nodes_[n].is_leaf(); });
}

namespace {

void match_rec(const EGraph& g, const Pattern& p, ClassId cls, MatchState st,
               std::vector<MatchState>& out) {
  cls = g.find(cls);
  if (p.is_var()) {
    const std::string name = p.var_name();
    for (const auto& [v, c] : st.binding) {
      if (v == name) {
        if (c == cls) out.push_back(std::move(st));
        return;
      }
    }
    st.binding.emplace_back(name, cls);
    out.push_back(std::move(st));
    return;
  }
  st.internal.push_back(cls);
  for (NodeId nid : g.eclass(cls).nodes) {
    const ENode& n = g.node(nid);
    if (n.is_impl() || n.symbol != p.symbol || n.args.size() != p.children.size()) continue;
    std::vector<MatchState> states{st};
    for (std::size_t i = 0; i < p.children.size() && !states.empty(); ++i) {
      std::vector<MatchState> next;
      for (auto& s : states) match_rec(g, p.children[i], n.args[i], std::move(s), next);
      states = std::move(next);
    }
    for (auto& s : states) out.push_back(std::move(s));
  }
}

}  // namespace

std::vector<Match> EGraph::ematch_class(const Pattern& pat, ClassId cls) const {
  std::vector<MatchState> states;
  match_rec(*this, pat, cls, {}, states);
  std::vector<Match> out;
  out.reserve(states.size());
  for (auto& s : states) {
    std::sort(s.binding.begin(), s.binding.end());
    out.push_back(Match{find(cls), std::move(s.binding), std::move(s.internal)});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Match> EGraph::ematch(const Pattern& pat) const {
  std::vector<Match> out;
  for (ClassId cls : class_ids()) {
    auto m = ematch_class(pat, cls);
    out.insert(out.end(), std::make_move_iterator(m.begin()), std::make_move_iterator(m.end()));
  }
  return out;
}

std::string EGraph::to_json() const {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["roots"] = ordered_json::array();
  for (ClassId r : roots) doc["roots"].push_back(find(r));
  doc["classes"] = ordered_json::array();
  for (ClassId id : class_ids()) {
    std::vector<const ENode*> ns;
    for (NodeId n : classes_[id].nodes) ns.push_back(&nodes_[n]);
    std::sort(ns.begin(), ns.end(), [](const ENode* a, const ENode* b) {
      return std::tie(a->symbol, a->args, a->payload) < std::tie(b->symbol, b->args, b->payload);
    });
    ordered_json jc;
    jc["id"] = id;
    jc["dtype"] = classes_[id].dtype.str();
    jc["nodes"] = ordered_json::array();
    for (const ENode* n : ns) {
      ordered_json jn;
      jn["op"] = n->symbol;
      jn["args"] = n->args;
      if (!n->payload.empty()) jn["payload"] = n->payload;
      jc["nodes"].push_back(std::move(jn));
    }
    doc["classes"].push_back(std::move(jc));
  }
  return doc.dump(1);
}

std::string EGraph::to_dot(std::string_view name) const {
  std::string out = fmt::format("digraph \"{}\" {{\n  compound=true;\n", name);
  std::vector<std::pair<NodeId, ClassId>> edges;
  for (ClassId id : class_ids()) {
    const bool root = std::any_of(roots.begin(), roots.end(),
                                  [&](ClassId r) { return find(r) == id; });
    out += fmt::format("  subgraph cluster_{} {{\n    label=\"c{} {}{}\";\n", id, id,
                       classes_[id].dtype.str(), root ? " root" : "");
    std::vector<NodeId> ns = classes_[id].nodes;
    std::sort(ns.begin(), ns.end());
    // Anchor so edges can point at the cluster.
    out += fmt::format("    a{} [shape=point, style=invis];\n", id);
    for (NodeId n : ns) {
      const ENode& e = nodes_[n];
      std::string label = e.symbol;
      if (!e.payload.empty()) label += " " + e.payload;
      out += fmt::format("    n{} [label=\"{}\"{}];\n", n, label,
                         e.is_impl() ? ", shape=box" : "");
      for (ClassId a : e.args) edges.push_back({n, find(a)});
    }
    out += "  }\n";
  }
  for (const auto& [n, c] : edges)
    out += fmt::format("  n{} -> a{} [lhead=cluster_{}];\n", n, c, c);
  out += "}\n";
  return out;
}

EGraph egraph_from_program(const Program& p) {
  EGraph g;
  std::vector<ClassId> cls(p.values.size());
  for (ValueId i = 0; i < p.values.size(); ++i) {
    const Value& v = p.values[i];
    ENode n;
    n.symbol = std::string(op_name(v.op));
    n.dtype = v.dtype;
    if (v.op == Op::kInput) n.payload = v.name;
    if (v.op == Op::kConst) n.payload = *v.literal;
    for (ValueId a : v.operands) n.args.push_back(cls[a]);
    cls[i] = g.add(std::move(n));
  }
  for (ValueId o : p.outputs) g.roots.push_back(cls[o]);
  return g;
}

}  // namespace eqsched
