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

#include "eqsched/timing.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

namespace eqsched {

namespace {

const std::vector<NodeId> kNoNodes;
const std::vector<std::pair<NodeId, std::size_t>> kNoConsumers;

}  // namespace

bool usable_at_clock(const TimingProfile& t, double clock_ns) {
  return t.t_cycle <= clock_ns && t.max_incoming() <= clock_ns && t.t_outgoing <= clock_ns;
}

ImplGraph::ImplGraph(const EGraph& g, const ImplLibrary& lib, std::optional<double> clock_ns)
    : g_(&g), lib_(&lib), clock_ns_(clock_ns) {
  classes_ = g.class_ids();
  for (ClassId c : classes_) {
    leaf_[c] = g.is_leaf_class(c);
    for (NodeId n : g.eclass(c).nodes) {
      const ENode& en = g.node(n);
      if (!en.is_impl()) continue;
      ImplNode in;
      in.id = n;
      in.cls = c;
      for (ClassId a : en.args) in.args.push_back(g.find(a));
      in.impl = *en.impl;
      in.entry = &lib.entry(in.impl);
      in.profile = &lib.profile(in.impl);
      in.usable = !clock_ns || usable_at_clock(*in.profile, *clock_ns);
      nodes_.push_back(std::move(in));
    }
  }
  std::sort(nodes_.begin(), nodes_.end(),
            [](const ImplNode& a, const ImplNode& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ImplNode& n = nodes_[i];
    index_[n.id] = i;
    by_class_[n.cls].push_back(n.id);
    for (std::size_t p = 0; p < n.args.size(); ++p) consumers_[n.args[p]].emplace_back(n.id, p);
  }
}

const std::vector<NodeId>& ImplGraph::impls_of(ClassId cls) const {
  auto it = by_class_.find(g_->find(cls));
  return it == by_class_.end() ? kNoNodes : it->second;
}

const std::vector<std::pair<NodeId, std::size_t>>& ImplGraph::consumers_of(ClassId cls) const {
  auto it = consumers_.find(g_->find(cls));
  return it == consumers_.end() ? kNoConsumers : it->second;
}

std::vector<NodeId> TimedPath::nodes() const {
  std::vector<NodeId> out;
  out.reserve(edges.size() + 1);
  out.push_back(edges.front().src);
  for (const auto& e : edges) out.push_back(e.dst);
  return out;
}

double edge_delay(const TimingProfile& src, const TimingProfile& dst, std::string_view port,
                  const TimingConstants& k) {
  auto it = dst.t_incoming.find(port);
  if (it == dst.t_incoming.end()) throw Error("destination has no input port '" + std::string(port) + "'");
  return src.t_outgoing + k.t_net + it->second;
}

double edge_delay(const ImplEdge& e, const ImplGraph& g) {
  return edge_delay(*g.node(e.src).profile, *g.node(e.dst).profile, e.port, g.constants());
}

double path_delay(const TimedPath& path, const ImplGraph& g) {
  double d = 0.0;
  const TimingProfile& first = *g.node(path.src()).profile;
  if (first.combinational()) d += first.max_incoming();
  for (const auto& e : path.edges) d += edge_delay(e, g);
  return d;
}

int cuts(double t_path, double clock_ns, const TimingConstants& k) {
  const double overhead = k.register_overhead();
  if (t_path <= clock_ns) return 0;
  if (!(clock_ns > overhead))
    throw InfeasibleClockError(fmt::format(
        "clock period {:.3f} ns does not exceed register overhead {:.3f} ns", clock_ns, overhead));
  auto holds = [&](long long q) {
    return t_path + static_cast<double>(q) * overhead <= static_cast<double>(q + 1) * clock_ns;
  };
  long long q = static_cast<long long>(std::ceil((t_path - clock_ns) / (clock_ns - overhead)));
  q = std::max<long long>(q, 1);
  while (q > 1 && holds(q - 1)) --q;
  while (!holds(q)) ++q;
  return static_cast<int>(q);
}

namespace {

void chain_dfs(const ImplGraph& g, NodeId at, NodeId dst, double delay, int depth, int limit,
               std::vector<ClassId>& visited, std::optional<double>& best) {
  if (depth >= limit) return;
  const ImplNode& u = g.node(at);
  for (const auto& [v, port] : g.consumers_of(u.cls)) {
    const ImplNode& vn = g.node(v);
    if (!vn.usable) continue;
    if (std::find(visited.begin(), visited.end(), vn.cls) != visited.end()) continue;
    const double d = delay + edge_delay(*u.profile, *vn.profile, vn.port(port), g.constants());
    if (v == dst && (!best || d > *best)) best = d;
    if (!vn.profile->combinational()) continue;
    visited.push_back(vn.cls);
    chain_dfs(g, v, dst, d, depth + 1, limit, visited, best);
    visited.pop_back();
  }
}

struct Label {
  double delay;
  NodeId node;
  int parent;
  std::size_t port;
  int depth;
};

}  // namespace

std::optional<double> chain_delay(NodeId src, NodeId dst, const ImplGraph& g, int depth_limit) {
  const ImplNode& s = g.node(src);
  if (!s.usable) return std::nullopt;
  std::optional<double> best;
  std::vector<ClassId> visited{s.cls};
  const double start = s.profile->combinational() ? s.profile->max_incoming() : 0.0;
  chain_dfs(g, src, dst, start, 0, depth_limit, visited, best);
  return best;
}

std::size_t ChainingConstraintSet::path_count() const {
  std::size_t n = 0;
  for (const auto& [_, v] : pairs) n += v.size();
  return n;
}

std::unordered_map<NodeId, std::vector<const TimedPath*>> ChainingConstraintSet::by_destination(
    bool with_cuts_only) const {
  std::unordered_map<NodeId, std::vector<const TimedPath*>> out;
  for (const auto& [key, paths] : pairs)
    for (const auto& p : paths)
      if (!with_cuts_only || p.cuts > 0) out[key.second].push_back(&p);
  return out;
}

ChainingConstraintSet enumerate_top_k_paths(const ImplGraph& g, int k, int depth_limit) {
  if (k < 1) throw Error("top-k needs k >= 1");
  ChainingConstraintSet set;
  set.k = k;
  set.clock_ns = g.clock_ns();
  const TimingConstants& consts = g.constants();

  std::vector<Label> labels;
  std::unordered_map<NodeId, std::vector<int>> best;  // per destination, sorted by delay desc
  for (const ImplNode& s : g.nodes()) {
    if (!s.usable) continue;
    labels.clear();
    best.clear();
    labels.push_back({s.profile->combinational() ? s.profile->max_incoming() : 0.0, s.id, -1, 0, 0});
    std::vector<int> frontier{0};
    auto on_chain = [&](int li, ClassId cls) {
      for (; li >= 0; li = labels[li].parent)
        if (g.node(labels[li].node).cls == cls) return true;
      return false;
    };
    for (int depth = 0; !frontier.empty(); ++depth) {
      std::vector<int> next;
      for (int li : frontier) {
        const NodeId at = labels[li].node;
        const ImplNode& u = g.node(at);
        if (depth > 0 && !u.profile->combinational()) continue;
        for (const auto& [v, port] : g.consumers_of(u.cls)) {
          const ImplNode& vn = g.node(v);
          if (!vn.usable || on_chain(li, vn.cls)) continue;
          if (depth >= depth_limit) {
            set.depth_limited.emplace(s.id, v);
            continue;
          }
          const double d = labels[li].delay +
                           edge_delay(*u.profile, *vn.profile, vn.port(port), consts);
          auto& slot = best[v];
          if (static_cast<int>(slot.size()) >= k && d <= labels[slot.back()].delay) continue;
          const int nl = static_cast<int>(labels.size());
          labels.push_back({d, v, li, port, depth + 1});
          auto pos = std::find_if(slot.begin(), slot.end(),
                                  [&](int o) { return labels[o].delay < d; });
          slot.insert(pos, nl);
          if (static_cast<int>(slot.size()) > k) slot.pop_back();
          next.push_back(nl);
        }
      }
      frontier = std::move(next);
    }
    for (const auto& [dst, slot] : best) {
      auto& paths = set.pairs[{s.id, dst}];
      paths.reserve(slot.size());
      for (int li : slot) {
        TimedPath p;
        p.edges.reserve(static_cast<std::size_t>(labels[li].depth));
        p.delay = labels[li].delay;
        p.src_combinational = s.profile->combinational();
        for (int at = li; labels[at].parent >= 0; at = labels[at].parent) {
          const ImplNode& dn = g.node(labels[at].node);
          p.edges.push_back({labels[labels[at].parent].node, dn.id, dn.port(labels[at].port)});
        }
        std::reverse(p.edges.begin(), p.edges.end());
        if (set.clock_ns) p.cuts = cuts(p.delay, *set.clock_ns, consts);
        paths.push_back(std::move(p));
      }
    }
  }
  return set;
}

std::string path_table_csv(const ChainingConstraintSet& set, const ImplGraph& g) {
  std::ostringstream os;
  os << "src,dst,delay_ns,cuts,edges\n";
  for (const auto& [key, paths] : set.pairs) {
    for (const auto& p : paths) {
      os << g.egraph().node(key.first).symbol << "@" << key.first << ','
         << g.egraph().node(key.second).symbol << "@" << key.second << ','
         << fmt::format("{:.3f}", p.delay) << ',' << p.cuts << ',';
      for (std::size_t i = 0; i < p.edges.size(); ++i) {
        if (i) os << ' ';
        os << p.edges[i].src << "->" << p.edges[i].dst << '.' << p.edges[i].port;
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace eqsched
