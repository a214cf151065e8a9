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

#ifndef EQSCHED_ASAP_H_
#define EQSCHED_ASAP_H_

#include <span>
#include <string>

#include "eqsched/model.h"

namespace eqsched {

struct TieCandidate {
  NodeId node = 0;
  int latency = 0;
  std::string identifier;
  std::string config;
};

// Smallest (latency, identifier, config, node id).
NodeId tie_break(std::span<const TieCandidate> candidates);

// Visits classes in dependency order and keeps, per class, the implementation
// with the earliest finish. Only the term reachable from the roots is
// returned. Throws UnschedulableError when a root class cannot be finished.
Solution asap_schedule(const ImplGraph& g, const ChainingConstraintSet& constraints);

}  // namespace eqsched

#endif  // EQSCHED_ASAP_H_
