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

#include "eqsched/exact.h"

#include <algorithm>
#include <limits>

#include "eqsched/asap.h"

namespace eqsched {

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 4;
constexpr NodeId kNone = std::numeric_limits<NodeId>::max();

class BranchAndBound {
 public:
  BranchAndBound(const ImplGraph& g, const ChainingConstraintSet& constraints,
                 const ExactOptions& opts)
      : g_(g),
        constraints_(constraints),
        opts_(opts),
        schedule_(g, constraints),
        by_dst_(constraints.by_destination(true)),
        viable_(viable_classes(g)),
        start_(std::chrono::steady_clock::now()) {
    for (ClassId r : g.egraph().roots) {
      const ClassId c = g.egraph().find(r);
      if (std::find(roots_.begin(), roots_.end(), c) == roots_.end()) roots_.push_back(c);
    }
    static_bounds();
    const std::size_t nn = g.egraph().node_capacity();
    cand_.resize(viable_.size());
    for (ClassId c : g.classes())
      if (!g.is_leaf(c)) cand_[c] = make_candidates(c);
    sel_.assign(viable_.size(), kNone);
    memo_.assign(nn, 0);
    stamp_.assign(nn, 0);
    on_stack_.assign(nn, 0);
    path_index_.resize(nn);
    for (auto& [dst, paths] : by_dst_) path_index_[dst] = paths;
  }

  Solution run(ExactStats* stats) {
    Solution out;
    out.solver = SolverKind::kExact;
    for (ClassId r : roots_) {
      if (!viable_[r]) {
        out.status = SolveStatus::kInfeasible;
        return out;
      }
    }
    if (opts_.warm_start) {
      try {
        const Solution a = asap_schedule(g_, constraints_);
        Selection sel;
        for (const auto& p : a.selected) sel[g_.node(p.node).cls] = p.node;
        if (auto s = schedule_(sel)) consider(std::move(*s));
      } catch (const UnschedulableError&) {
      }
    }
    std::vector<ClassId> pending;
    for (ClassId r : roots_)
      if (!g_.is_leaf(r)) pending.push_back(r);
    std::sort(pending.begin(), pending.end());
    if (pending.empty()) {
      if (auto s = schedule_(selection())) consider(std::move(*s));
    } else {
      dfs(pending);
    }
    if (stats) {
      stats->steps = steps_;
      stats->complete = complete_;
    }
    if (!best_) {
      out.status = stopped_ ? SolveStatus::kTimeout : SolveStatus::kInfeasible;
      return out;
    }
    out = std::move(*best_);
    out.solver = SolverKind::kExact;
    out.status = stopped_ ? SolveStatus::kTimeout : SolveStatus::kOptimal;
    return out;
  }

 private:
  const std::vector<NodeId>& candidates(ClassId c) const { return cand_[c]; }

  std::vector<NodeId> make_candidates(ClassId c) const {
    std::vector<NodeId> out;
    for (NodeId id : g_.impls_of(c)) {
      const ImplNode& n = g_.node(id);
      if (n.usable && std::all_of(n.args.begin(), n.args.end(),
                                  [&](ClassId a) { return viable_[a]; }))
        out.push_back(id);
    }
    std::stable_sort(out.begin(), out.end(),
                     [&](NodeId a, NodeId b) { return node_lb(a) < node_lb(b); });
    return out;
  }

  int node_lb(NodeId id) const {
    const ImplNode& n = g_.node(id);
    int s = 0;
    for (ClassId a : n.args) s = std::max(s, class_lb_[a]);
    return s >= kInf ? kInf : s + n.profile->latency;
  }

  void static_bounds() {
    class_lb_.assign(viable_.size(), kInf);
    for (ClassId c : g_.classes())
      if (g_.is_leaf(c)) class_lb_[c] = 0;
    for (bool changed = true; changed;) {
      changed = false;
      for (ClassId c : g_.classes()) {
        if (g_.is_leaf(c)) continue;
        for (NodeId id : g_.impls_of(c)) {
          if (!g_.node(id).usable) continue;
          const int v = node_lb(id);
          if (v < class_lb_[c]) {
            class_lb_[c] = v;
            changed = true;
          }
        }
      }
    }
  }

  Selection selection() const {
    Selection out;
    for (ClassId c = 0; c < sel_.size(); ++c)
      if (sel_[c] != kNone) out[c] = sel_[c];
    return out;
  }

  // Lower bound on the finish of a decided node; kInf on a cyclic choice.
  int decided_lb(NodeId id) {
    if (stamp_[id] == round_) return memo_[id];
    if (on_stack_[id]) return kInf;
    on_stack_[id] = 1;
    const ImplNode& n = g_.node(id);
    int s = 0;
    for (ClassId a : n.args) {
      int f = 0;
      if (g_.is_leaf(a)) {
        f = 0;
      } else if (sel_[a] != kNone) {
        f = decided_lb(sel_[a]);
      } else {
        f = class_lb_[a];
      }
      s = std::max(s, f);
    }
    if (s < kInf) {
      for (const TimedPath* p : path_index_[id]) {
        bool active = true;
        for (const auto& e : p->edges)
          if (sel_[g_.node(e.src).cls] != e.src) {
            active = false;
            break;
          }
        if (!active) continue;
        const int f = decided_lb(p->src());
        if (f >= kInf) {
          s = kInf;
          break;
        }
        s = std::max(s, f + p->cuts);
      }
    }
    on_stack_[id] = 0;
    const int f = s >= kInf ? kInf : s + n.profile->latency;
    memo_[id] = f;
    stamp_[id] = round_;
    return f;
  }

  bool prune(std::size_t pending_count) {
    if (!best_) return false;
    ++round_;
    int lb = 0;
    for (ClassId r : roots_) {
      int f = 0;
      if (g_.is_leaf(r)) f = 0;
      else if (sel_[r] != kNone) f = decided_lb(sel_[r]);
      else f = class_lb_[r];
      lb = std::max(lb, f);
    }
    if (lb >= kInf) return true;
    if (lb > best_->latency) return true;
    const std::size_t count = decided_ + pending_count;
    return lb == best_->latency && count >= best_->impl_count();
  }

  bool out_of_budget() {
    if (stopped_) return true;
    if (++steps_ > opts_.max_steps ||
        std::chrono::steady_clock::now() - start_ > opts_.timeout)
      stopped_ = true;
    return stopped_;
  }

  void consider(Solution s) {
    ++complete_;
    if (!best_ || s.latency < best_->latency ||
        (s.latency == best_->latency && s.impl_count() < best_->impl_count()))
      best_ = std::move(s);
  }

  void dfs(const std::vector<ClassId>& pending) {
    if (out_of_budget()) return;
    if (pending.empty()) {
      if (auto s = schedule_(selection())) consider(std::move(*s));
      return;
    }
    // Branch on the most constrained pending class.
    std::size_t pick = 0;
    for (std::size_t i = 1; i < pending.size() && candidates(pending[pick]).size() > 1; ++i)
      if (candidates(pending[i]).size() < candidates(pending[pick]).size()) pick = i;
    const ClassId c = pending[pick];
    ++decided_;
    for (NodeId id : candidates(c)) {
      sel_[c] = id;
      std::vector<ClassId> next;
      for (std::size_t i = 0; i < pending.size(); ++i)
        if (i != pick) next.push_back(pending[i]);
      for (ClassId a : g_.node(id).args)
        if (!g_.is_leaf(a) && sel_[a] == kNone) next.push_back(a);
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      if (!prune(next.size())) dfs(next);
      sel_[c] = kNone;
      if (stopped_) break;
    }
    --decided_;
  }

  const ImplGraph& g_;
  const ChainingConstraintSet& constraints_;
  const ExactOptions& opts_;
  SelectionScheduler schedule_;
  std::unordered_map<NodeId, std::vector<const TimedPath*>> by_dst_;
  std::vector<bool> viable_;
  std::vector<int> class_lb_;
  std::vector<ClassId> roots_;
  std::vector<std::vector<NodeId>> cand_;
  std::vector<std::vector<const TimedPath*>> path_index_;
  // Decided node per class, kNone while open.
  std::vector<NodeId> sel_;
  std::size_t decided_ = 0;
  std::vector<int> memo_;
  std::vector<std::uint32_t> stamp_;
  std::vector<char> on_stack_;
  std::uint32_t round_ = 0;
  std::optional<Solution> best_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t steps_ = 0;
  std::uint64_t complete_ = 0;
  bool stopped_ = false;
};

}  // namespace

Solution solve_exact(const ImplGraph& g, const ChainingConstraintSet& constraints,
                     const ExactOptions& opts, ExactStats* stats) {
  BranchAndBound bb(g, constraints, opts);
  return bb.run(stats);
}

}  // namespace eqsched
