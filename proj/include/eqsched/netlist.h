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

#ifndef EQSCHED_NETLIST_H_
#define EQSCHED_NETLIST_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "eqsched/ir.h"
#include "eqsched/model.h"

namespace eqsched {

struct NetlistPort {
  std::string name;   // Verilog port name
  std::string value;  // program value name
  DataType dtype;
  std::string net;    // outputs: driving net (possibly a delayed tap)
  std::string base;   // outputs: undelayed net
  int delay = 0;
};

struct Net {
  std::string name;
  DataType dtype;
  ClassId cls = 0;
};

struct ConstNet {
  std::string name;
  DataType dtype;
  std::int64_t value = 0;  // integer constants
  std::string literal;
};

struct InstancePort {
  std::string port;
  std::string net;  // tap actually read (base net or a delayed copy)
  std::string base;
  int delay = 0;
  DataType dtype;
};

struct Instance {
  std::string name;
  NodeId node = 0;
  ImplRef impl;
  std::string identifier;
  std::string config;
  std::string template_name;
  std::map<std::string, std::string> params;
  std::vector<InstancePort> ports;  // matcher port order
  std::string out;
  DataType out_type;
  int start = 0;
  int finish = 0;
  int latency = 0;
};

// Shift register on `net`: taps[k] is the value delayed by k + 1 cycles.
struct RegisterChain {
  std::string net;
  DataType dtype;
  std::vector<std::string> taps;
  int depth() const { return static_cast<int>(taps.size()); }
};

struct Netlist {
  std::string module;
  std::vector<NetlistPort> inputs;
  std::vector<NetlistPort> outputs;
  std::vector<ConstNet> consts;
  std::vector<Net> nets;  // instance outputs
  std::vector<Instance> instances;
  std::vector<RegisterChain> chains;
  int latency = 0;

  std::size_t register_count() const;
};

// Builds the structural netlist of a validated solution. Every output is
// delayed to the common latency. Throws Error on an incomplete or cyclic
// selection.
Netlist build_netlist(const Solution& sol, const ImplGraph& g, const Program& p);

// Synthesizable Verilog. Throws LibraryError on a missing template or an
// unknown placeholder.
std::string emit_verilog(const Netlist& n, const ImplLibrary& lib);
std::string emit_netlist(const Solution& sol, const ImplGraph& g, const Program& p);

// Infix rendering of an implementation's function, e.g. "C-((A+D)*B)".
std::string function_text(const Pattern& matcher);

std::string emit_schedule_report(const Solution& sol, const ImplGraph& g, const Program& p);

// Cycle-accurate evaluation of an integer netlist. stream[t] holds the input
// values (declaration order) presented at cycle t; the result holds the
// output values observed at each of `cycles` cycles.
std::vector<std::vector<std::int64_t>> simulate(const Netlist& n, const ImplLibrary& lib,
                                                const std::vector<std::vector<std::int64_t>>& stream,
                                                int cycles);

struct TimingViolationPath {
  std::vector<std::string> instances;  // source first
  std::vector<NodeId> nodes;
  std::vector<std::string> ports;      // port entered at each hop
  double delay = 0.0;
};

struct NetlistTimingReport {
  double worst_ns = 0.0;  // longest register-free path
  std::vector<TimingViolationPath> violations;
  std::vector<std::string> unusable;  // instances whose own profile misses the clock
  bool ok() const { return violations.empty() && unusable.empty(); }
};

// Re-runs the timing model over the netlist: instances, direct nets and
// register taps. Only register-free instance-to-instance paths count.
NetlistTimingReport check_netlist_timing(const Netlist& n, const ImplLibrary& lib, double clock_ns);

}  // namespace eqsched

#endif  // EQSCHED_NETLIST_H_
