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

#ifndef EQSCHED_EXACT_H_
#define EQSCHED_EXACT_H_

#include <chrono>
#include <cstdint>

#include "eqsched/model.h"

namespace eqsched {

struct ExactOptions {
  std::chrono::milliseconds timeout{std::chrono::hours(1)};
  // Search nodes explored before giving up with a timeout status.
  std::uint64_t max_steps = std::uint64_t{1} << 20;
  // Seed the incumbent with the ASAP selection.
  bool warm_start = true;
};

struct ExactStats {
  std::uint64_t steps = 0;
  std::uint64_t complete = 0;  // full selections scheduled
};

// Branch and bound over one implementation per needed class; each complete
// acyclic selection gets its earliest schedule. Minimizes latency, then the
// number of implementations. Status is optimal, infeasible or timeout (with
// the best selection found so far, if any).
Solution solve_exact(const ImplGraph& g, const ChainingConstraintSet& constraints,
                     const ExactOptions& opts = {}, ExactStats* stats = nullptr);

}  // namespace eqsched

#endif  // EQSCHED_EXACT_H_
