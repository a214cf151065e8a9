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

#ifndef EQSCHED_TIMING_H_
#define EQSCHED_TIMING_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eqsched/egraph.h"
#include "eqsched/library.h"

namespace eqsched {

class InfeasibleClockError : public Error {
 public:
  using Error::Error;
};

struct ImplNode {
  NodeId id = 0;
  ClassId cls = 0;
  std::vector<ClassId> args;  // canonical, in port order
  ImplRef impl;
  const ImplEntry* entry = nullptr;
  const TimingProfile* profile = nullptr;
  // False when some timing attribute alone exceeds the clock period; such
  // nodes can never be selected.
  bool usable = true;

  const std::string& port(std::size_t i) const { return entry->ports[i]; }
};

// Implementation e-nodes of a rebuilt e-graph with their timing profiles.
class ImplGraph {
 public:
  ImplGraph(const EGraph& g, const ImplLibrary& lib, std::optional<double> clock_ns = {});

  const EGraph& egraph() const { return *g_; }
  const ImplLibrary& library() const { return *lib_; }
  const TimingConstants& constants() const { return lib_->constants; }
  std::optional<double> clock_ns() const { return clock_ns_; }

  const std::vector<ImplNode>& nodes() const { return nodes_; }
  const ImplNode& node(NodeId id) const { return nodes_.at(index_.at(id)); }
  bool contains(NodeId id) const { return index_.count(id) != 0; }
  // All implementation nodes of a class, usable or not, by node id.
  const std::vector<NodeId>& impls_of(ClassId cls) const;
  // (consumer node, port index) pairs reading `cls`.
  const std::vector<std::pair<NodeId, std::size_t>>& consumers_of(ClassId cls) const;
  const std::vector<ClassId>& classes() const { return classes_; }
  bool is_leaf(ClassId cls) const { return leaf_.at(cls); }

 private:
  const EGraph* g_;
  const ImplLibrary* lib_;
  std::optional<double> clock_ns_;
  std::vector<ImplNode> nodes_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<ClassId> classes_;
  std::unordered_map<ClassId, std::vector<NodeId>> by_class_;
  std::unordered_map<ClassId, std::vector<std::pair<NodeId, std::size_t>>> consumers_;
  std::unordered_map<ClassId, bool> leaf_;
};

bool usable_at_clock(const TimingProfile& t, double clock_ns);

// Output of `src` feeding input `port` of `dst`. The port name points into
// the library entry of `dst`.
struct ImplEdge {
  NodeId src = 0;
  NodeId dst = 0;
  std::string_view port;
  bool operator==(const ImplEdge&) const = default;
};

struct TimedPath {
  std::vector<ImplEdge> edges;
  double delay = 0.0;
  bool src_combinational = false;
  int cuts = 0;

  NodeId src() const { return edges.front().src; }
  NodeId dst() const { return edges.back().dst; }
  // src, intermediates, dst.
  std::vector<NodeId> nodes() const;
};

double edge_delay(const ImplEdge& e, const ImplGraph& g);
double edge_delay(const TimingProfile& src, const TimingProfile& dst, std::string_view port,
                  const TimingConstants& k);
double path_delay(const TimedPath& path, const ImplGraph& g);

// Minimum number of pipeline registers so that a path of `t_path` ns meets
// `clock_ns`. Throws InfeasibleClockError when a register alone cannot fit.
int cuts(double t_path, double clock_ns, const TimingConstants& k);

// Longest combinational path delay from `src` to `dst` by exhaustive search.
std::optional<double> chain_delay(NodeId src, NodeId dst, const ImplGraph& g,
                                  int depth_limit = 20);

struct ChainingConstraintSet {
  int k = 3;
  std::optional<double> clock_ns;
  // Per ordered pair, at most k paths sorted by delay, longest first.
  std::map<std::pair<NodeId, NodeId>, std::vector<TimedPath>> pairs;
  // Pairs whose search stopped at the depth limit.
  std::set<std::pair<NodeId, NodeId>> depth_limited;

  std::size_t path_count() const;
  // Every path ending at each destination. A path without cuts only asks
  // for s_dst >= f_src, which the data dependencies along it already imply,
  // so schedulers may pass with_cuts_only.
  std::unordered_map<NodeId, std::vector<const TimedPath*>> by_destination(
      bool with_cuts_only = false) const;
};

// Top-k longest combinational paths for every ordered pair of usable
// implementation nodes. Cuts are filled in when the graph has a clock.
ChainingConstraintSet enumerate_top_k_paths(const ImplGraph& g, int k = 3, int depth_limit = 20);

// CSV: src,dst,delay_ns,cuts,edges
std::string path_table_csv(const ChainingConstraintSet& set, const ImplGraph& g);

}  // namespace eqsched

#endif  // EQSCHED_TIMING_H_
