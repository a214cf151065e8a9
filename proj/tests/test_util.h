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

#ifndef EQSCHED_TESTS_TEST_UTIL_H_
#define EQSCHED_TESTS_TEST_UTIL_H_

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eqsched/library.h"
#include "eqsched/bench.h"
#include "eqsched/pipeline.h"

namespace eqsched::testing {

inline std::string data_path(const std::string& file) {
  return std::string(EQSCHED_DATA_DIR) + "/" + file;
}
inline std::string bench_path(const std::string& file) {
  return std::string(EQSCHED_BENCH_DIR) + "/" + file;
}

inline const ImplLibrary& sample_library() {
  static const ImplLibrary lib = load_library_file(data_path("kintex_sample.json"));
  return lib;
}

inline const char* kFig1Source =
    "a = input i16\n"
    "b = input i16\n"
    "c = input i16\n"
    "s = add i17 a b\n"
    "n = neg i18 s\n"
    "m = mul i32 n c\n"
    "return m\n";

// One single-configuration combinational or pipelined entry.
inline nlohmann::json entry(const std::string& id, const std::string& matcher,
                            std::map<std::string, double> t_in, int latency = 0,
                            double t_out = 0.0, double t_cycle = 0.0,
                            const std::string& template_name = "generic") {
  nlohmann::json cfg{{"id", latency == 0 ? "comb" : "lat" + std::to_string(latency)},
                     {"latency", latency},
                     {"t_incoming", t_in},
                     {"t_outgoing", t_out},
                     {"t_cycle", t_cycle},
                     {"resources", nlohmann::json::object()},
                     {"template", template_name},
                     {"params", nlohmann::json::object()}};
  return {{"identifier", id},
          {"kind", "basic-logic"},
          {"matcher", matcher},
          {"conditions", nlohmann::json::array()},
          {"configurations", nlohmann::json::array({cfg})}};
}

// Library without algebraic rules and the given entries.
inline ImplLibrary make_library(const std::vector<nlohmann::json>& entries, double t_net = 0.6,
                                double t_su = 0.1, double t_clkq = 0.15) {
  nlohmann::json doc{{"version", 1},
                     {"constants", {{"t_net", t_net}, {"t_su", t_su}, {"t_clkq", t_clkq}}},
                     {"algebraic_rules", nlohmann::json::array()},
                     {"templates", {{"generic", "assign {out} = {A};"}}},
                     {"implementations", entries}};
  return load_library(doc.dump());
}

inline PipelineOptions options_at(double clock_ns,
                                  SolverChoice solver = SolverChoice::kAsap) {
  PipelineOptions o;
  o.clock_ns = clock_ns;
  o.solver = solver;
  return o;
}

struct Built {
  ImplLibrary lib;
  EGraph eg;
  std::unique_ptr<ImplGraph> g;
};

// Maps every operator of the program with the library, no algebraic rules.
inline std::unique_ptr<Built> build(const std::string& src, ImplLibrary lib,
                             std::optional<double> clk = {}) {
  auto b = std::make_unique<Built>();
  b->lib = std::move(lib);
  b->eg = egraph_from_program(parse_program(src));
  const auto rules = enumerate_impl_rules(b->lib);
  saturate(b->eg, rules);
  b->g = std::make_unique<ImplGraph>(b->eg, b->lib, clk);
  return b;
}

inline NodeId node_of(const ImplGraph& g, const std::string& identifier) {
  for (const auto& n : g.nodes())
    if (n.entry->identifier == identifier) return n.id;
  throw Error("no node for " + identifier);
}

}  // namespace eqsched::testing

#endif  // EQSCHED_TESTS_TEST_UTIL_H_
