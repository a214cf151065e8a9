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

#ifndef EQSCHED_LIBRARY_H_
#define EQSCHED_LIBRARY_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eqsched/egraph.h"
#include "eqsched/ir.h"
#include "eqsched/pattern.h"
#include "eqsched/rewrite.h"

namespace eqsched {

class LibraryError : public Error {
 public:
  using Error::Error;
};

// Four-attribute timing model of one configured implementation. Delays in ns.
struct TimingProfile {
  int latency = 0;
  std::map<std::string, double, std::less<>> t_incoming;  // per input port
  double t_outgoing = 0.0;
  double t_cycle = 0.0;

  bool combinational() const { return latency == 0; }
  double max_incoming() const;
  bool operator==(const TimingProfile&) const = default;
};

enum class ImplKind { kBasicLogic, kHardwarePrimitive, kParameterizedIp };
std::string_view impl_kind_name(ImplKind k);

// Type requirement on one matcher port. The pseudo-port "$out" refers to the
// matched class itself.
struct PortCondition {
  std::string port;
  int min_bits = 1;
  int max_bits = 64;
  std::optional<std::string> kind;  // "int", "signed", "unsigned" or "float"

  bool operator==(const PortCondition&) const = default;
};

struct ImplConfig {
  std::string id;
  TimingProfile timing;
  std::map<std::string, int> resources;
  std::string template_name;
  std::map<std::string, std::string> params;

  bool operator==(const ImplConfig&) const = default;
};

struct ImplEntry {
  std::string identifier;
  ImplKind kind = ImplKind::kBasicLogic;
  Pattern matcher;
  std::vector<std::string> ports;  // matcher variables in first-occurrence order
  std::vector<PortCondition> conditions;
  std::vector<ImplConfig> configs;
  // Operands may be connected in any order (identical port timing).
  bool commutative = false;

  std::string symbol(std::size_t config) const { return identifier + "#" + configs[config].id; }
  bool operator==(const ImplEntry&) const = default;
};

struct TimingConstants {
  double t_net = 0.6;
  double t_su = 0.1;
  double t_clkq = 0.15;

  // Delay one inserted pipeline register adds to a path.
  double register_overhead() const { return t_su + t_clkq + t_net; }
  bool operator==(const TimingConstants&) const = default;
};

struct AlgebraicRuleSpec {
  std::string name;
  std::string lhs;
  std::string rhs;
  bool operator==(const AlgebraicRuleSpec&) const = default;
};

struct ImplLibrary {
  int version = 1;
  TimingConstants constants;
  // nullopt: the built-in default rule set applies.
  std::optional<std::vector<AlgebraicRuleSpec>> algebraic_rules;
  std::map<std::string, std::string> templates;
  std::vector<ImplEntry> entries;

  const ImplEntry& entry(ImplRef r) const { return entries.at(r.entry); }
  const ImplConfig& config(ImplRef r) const { return entries.at(r.entry).configs.at(r.config); }
  const TimingProfile& profile(ImplRef r) const { return config(r).timing; }
  std::size_t config_count() const;

  // Keeps only entries whose matcher covers a single operator.
  ImplLibrary per_operation_only() const;

  bool operator==(const ImplLibrary&) const = default;
};

ImplLibrary load_library(std::string_view json_text);
ImplLibrary load_library_file(const std::filesystem::path& path);
std::string serialize_library(const ImplLibrary& lib);

bool check_condition(const PortCondition& cond, DataType t);
bool check_condition(std::span<const PortCondition> conds,
                     const std::map<std::string, DataType>& port_types);

// One implementation rule per (entry, configuration).
std::vector<RewriteRule> enumerate_impl_rules(const ImplLibrary& lib);
// The library's algebraic rules, or the defaults when the library has none.
std::vector<RewriteRule> library_algebraic_rules(const ImplLibrary& lib);

}  // namespace eqsched

#endif  // EQSCHED_LIBRARY_H_
