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

#ifndef EQSCHED_EGRAPH_H_
#define EQSCHED_EGRAPH_H_

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eqsched/ir.h"
#include "eqsched/pattern.h"

namespace eqsched {

using ClassId = std::uint32_t;
using NodeId = std::uint32_t;

// Points an implementation e-node at a library entry and one of its
// configurations.
struct ImplRef {
  std::size_t entry = 0;
  std::size_t config = 0;
  bool operator==(const ImplRef&) const = default;
  auto operator<=>(const ImplRef&) const = default;
};

struct ENode {
  // Operator name, or `<identifier>#<config>` for implementation e-nodes.
  std::string symbol;
  std::vector<ClassId> args;
  DataType dtype;
  // Input name or constant literal; empty for everything else.
  std::string payload;
  std::optional<ImplRef> impl;

  bool is_impl() const { return impl.has_value(); }
  bool is_leaf() const { return !is_impl() && (symbol == "input" || symbol == "const"); }
  bool operator==(const ENode&) const = default;
};

struct ENodeHash {
  std::size_t operator()(const ENode& n) const;
};

struct EClass {
  ClassId id = 0;
  std::vector<NodeId> nodes;
  DataType dtype;
};

// One e-matching result. `binding` is sorted by variable name; `internal`
// lists the class matched by each operator node of the pattern in preorder
// (so internal[0] == cls).
struct Match {
  ClassId cls = 0;
  std::vector<std::pair<std::string, ClassId>> binding;
  std::vector<ClassId> internal;

  ClassId at(const std::string& var) const;
  bool operator==(const Match&) const = default;
  auto operator<=>(const Match&) const = default;
};

class EGraph {
 public:
  EGraph() = default;

  // Adds `n` (args need not be canonical) and returns its class. Reuses the
  // hashconsed class when an equal node already exists.
  ClassId add(ENode n);

  // Inserts `n` into `cls` without merging anything. Returns false when an
  // equal node already exists anywhere in the graph.
  bool add_to_class(ClassId cls, ENode n);

  // Returns the canonical id of the merged class. Classes of different
  // declared types are never merged.
  ClassId merge(ClassId a, ClassId b);

  ClassId find(ClassId id) const;
  void rebuild();
  bool dirty() const { return dirty_; }

  std::vector<ClassId> class_ids() const;
  const EClass& eclass(ClassId id) const { return classes_[find(id)]; }
  const ENode& node(NodeId id) const { return nodes_[id]; }
  ClassId class_of(NodeId id) const { return find(node_class_[id]); }
  bool node_live(NodeId id) const { return node_live_[id]; }
  std::size_t num_classes() const { return num_classes_; }
  std::size_t num_nodes() const { return num_live_nodes_; }
  std::size_t node_capacity() const { return nodes_.size(); }
  std::optional<NodeId> lookup(const ENode& n) const;

  // Classes containing an input or const node are available at cycle 0.
  bool is_leaf_class(ClassId id) const;

  std::vector<Match> ematch(const Pattern& pat) const;
  std::vector<Match> ematch_class(const Pattern& pat, ClassId cls) const;

  // Deterministic JSON text: classes by id, nodes by (symbol, args, payload).
  std::string to_json() const;
  // Graphviz text: one cluster per class, edges from e-nodes to child classes.
  std::string to_dot(std::string_view name = "egraph") const;

  std::vector<ClassId> roots;

 private:
  ENode canonical(const ENode& n) const;
  NodeId push_node(ENode n, ClassId cls);

  std::vector<ENode> nodes_;
  std::vector<ClassId> node_class_;
  std::vector<bool> node_live_;
  std::vector<EClass> classes_;
  mutable std::vector<ClassId> parent_;
  std::unordered_map<ENode, NodeId, ENodeHash> hashcons_;
  std::size_t num_classes_ = 0;
  std::size_t num_live_nodes_ = 0;
  bool dirty_ = false;
};

EGraph egraph_from_program(const Program& p);

}  // namespace eqsched

#endif  // EQSCHED_EGRAPH_H_
