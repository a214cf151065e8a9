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

#include "eqsched/asap.h"

#include <algorithm>
#include <queue>
#include <set>
#include <tuple>

#include <fmt/format.h>

namespace eqsched {

NodeId tie_break(std::span<const TieCandidate> candidates) {
  if (candidates.empty()) throw Error("tie_break needs at least one candidate");
  auto key = [](const TieCandidate& c) {
    return std::tie(c.latency, c.identifier, c.config, c.node);
  };
  return std::min_element(candidates.begin(), candidates.end(),
                          [&](const TieCandidate& a, const TieCandidate& b) {
                            return key(a) < key(b);
                          })
      ->node;
}

Solution asap_schedule(const ImplGraph& g, const ChainingConstraintSet& constraints) {
  const EGraph& eg = g.egraph();
  const auto viable = viable_classes(g);
  const auto by_dst = constraints.by_destination(true);
  const std::size_t ncls = viable.size();

  std::vector<char> done(ncls, 0);
  std::vector<int> finish(ncls, 0);
  std::vector<NodeId> chosen(ncls, 0);
  std::vector<int> total(ncls, 0), ready(ncls, 0);
  std::unordered_map<NodeId, int> pending;
  std::unordered_map<NodeId, std::pair<int, int>> node_time;  // chosen nodes only
  std::unordered_map<ClassId, std::vector<NodeId>> waiters;
  std::vector<char> selected(eg.node_capacity(), 0);

  for (ClassId c : g.classes())
    if (g.is_leaf(c)) done[c] = 1;

  std::priority_queue<ClassId, std::vector<ClassId>, std::greater<>> full;
  std::set<ClassId> partial;
  auto mark_ready = [&](const ImplNode& n) {
    const ClassId c = n.cls;
    if (done[c]) return;
    ++ready[c];
    partial.insert(c);
    if (ready[c] == total[c]) full.push(c);
  };

  std::vector<const ImplNode*> relevant;
  for (const ImplNode& n : g.nodes()) {
    if (!n.usable || g.is_leaf(n.cls)) continue;
    if (!std::all_of(n.args.begin(), n.args.end(), [&](ClassId a) { return viable[a]; }))
      continue;
    relevant.push_back(&n);
    ++total[n.cls];
    std::vector<ClassId> kids = n.args;
    std::sort(kids.begin(), kids.end());
    kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
    int waiting = 0;
    for (ClassId a : kids) {
      if (done[a]) continue;
      ++waiting;
      waiters[a].push_back(n.id);
    }
    pending[n.id] = waiting;
  }
  for (const ImplNode* n : relevant)
    if (pending[n->id] == 0) mark_ready(*n);

  auto next_class = [&]() -> std::optional<ClassId> {
    while (!full.empty()) {
      const ClassId c = full.top();
      full.pop();
      if (!done[c]) return c;
    }
    while (!partial.empty()) {
      const ClassId c = *partial.begin();
      partial.erase(partial.begin());
      if (!done[c]) return c;
    }
    return std::nullopt;
  };

  while (auto next = next_class()) {
    const ClassId c = *next;
    int best_f = 0;
    std::vector<TieCandidate> ties;
    std::unordered_map<NodeId, int> starts;
    for (NodeId id : g.impls_of(c)) {
      const ImplNode& n = g.node(id);
      auto pit = pending.find(id);
      if (pit == pending.end() || pit->second != 0) continue;
      int s = 0;
      for (ClassId a : n.args) s = std::max(s, finish[a]);
      if (auto it = by_dst.find(id); it != by_dst.end()) {
        for (const TimedPath* p : it->second) {
          bool active = true;
          for (const auto& e : p->edges)
            if (!selected[e.src]) {
              active = false;
              break;
            }
          if (active) s = std::max(s, node_time.at(p->src()).second + p->cuts);
        }
      }
      const int f = s + n.profile->latency;
      starts[id] = s;
      TieCandidate cand{id, n.profile->latency, n.entry->identifier,
                        g.library().config(n.impl).id};
      if (ties.empty() || f < best_f) {
        best_f = f;
        ties.assign(1, std::move(cand));
      } else if (f == best_f) {
        ties.push_back(std::move(cand));
      }
    }
    const NodeId pick = tie_break(ties);
    done[c] = 1;
    chosen[c] = pick;
    finish[c] = best_f;
    selected[pick] = 1;
    node_time[pick] = {starts.at(pick), best_f};
    if (auto it = waiters.find(c); it != waiters.end())
      for (NodeId w : it->second)
        if (--pending[w] == 0) mark_ready(g.node(w));
  }

  std::vector<ClassId> roots;
  for (ClassId r : eg.roots) roots.push_back(eg.find(r));
  for (ClassId r : roots)
    if (!done[r])
      throw UnschedulableError(fmt::format(
          "class {} cannot be scheduled: no usable implementation reaches it", r));

  Solution s;
  s.solver = SolverKind::kAsap;
  s.status = SolveStatus::kFeasible;
  std::vector<ClassId> stack(roots.begin(), roots.end());
  while (!stack.empty()) {
    const ClassId c = stack.back();
    stack.pop_back();
    if (s.class_finish.count(c)) continue;
    s.class_finish[c] = finish[c];
    if (g.is_leaf(c)) continue;
    const NodeId n = chosen[c];
    s.selected.push_back({n, node_time.at(n).first, node_time.at(n).second});
    for (ClassId a : g.node(n).args) stack.push_back(a);
  }
  std::sort(s.selected.begin(), s.selected.end(),
            [](const Placement& a, const Placement& b) { return a.node < b.node; });
  for (ClassId r : roots) s.latency = std::max(s.latency, s.class_finish.at(r));
  return s;
}

}  // namespace eqsched
