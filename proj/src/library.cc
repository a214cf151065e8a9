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

#include "eqsched/library.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace eqsched {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw LibraryError(where.empty() ? what : where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) fail(where, fmt::format("missing field '{}'", key));
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

ImplKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "basic-logic") return ImplKind::kBasicLogic;
  if (s == "hardware-primitive") return ImplKind::kHardwarePrimitive;
  if (s == "parameterized-ip") return ImplKind::kParameterizedIp;
  fail(where, "unknown kind '" + s + "'");
}

void check_matcher_symbols(const Pattern& p, const std::string& where) {
  if (p.is_var()) return;
  auto op = op_from_name(p.symbol);
  if (!op || *op == Op::kInput || *op == Op::kConst)
    fail(where, "matcher uses unknown operator '" + p.symbol + "'");
  if (static_cast<int>(p.children.size()) != op_arity(*op))
    fail(where, fmt::format("matcher operator '{}' takes {} operand(s)", p.symbol, op_arity(*op)));
  for (const auto& c : p.children) check_matcher_symbols(c, where);
}

TimingProfile parse_profile(const json& c, const std::vector<std::string>& ports,
                            const std::string& where) {
  TimingProfile t;
  const json& lat = require(c, "latency", where);
  if (!lat.is_number_integer() || lat.get<long long>() < 0)
    fail(where, "latency must be a nonnegative integer");
  t.latency = lat.get<int>();
  const json& inc = require(c, "t_incoming", where);
  if (!inc.is_object()) fail(where, "t_incoming must be an object");
  for (const auto& [port, v] : inc.items()) t.t_incoming[port] = number(v, where + ".t_incoming." + port);
  t.t_outgoing = number(require(c, "t_outgoing", where), where + ".t_outgoing");
  t.t_cycle = number(require(c, "t_cycle", where), where + ".t_cycle");

  for (const auto& [port, v] : t.t_incoming)
    if (v < 0) fail(where, "negative delay on port " + port);
  if (t.t_outgoing < 0 || t.t_cycle < 0) fail(where, "negative delay");
  if (t.latency == 0 && (t.t_outgoing != 0.0 || t.t_cycle != 0.0))
    fail(where, "combinational configuration must have t_outgoing = 0 and t_cycle = 0");
  std::set<std::string> want(ports.begin(), ports.end());
  std::set<std::string> have;
  for (const auto& [port, _] : t.t_incoming) have.insert(port);
  if (want != have) fail(where, "t_incoming ports do not match the matcher variables");
  return t;
}

}  // namespace

double TimingProfile::max_incoming() const {
  double m = 0.0;
  for (const auto& [_, v] : t_incoming) m = std::max(m, v);
  return m;
}

std::string_view impl_kind_name(ImplKind k) {
  switch (k) {
    case ImplKind::kBasicLogic: return "basic-logic";
    case ImplKind::kHardwarePrimitive: return "hardware-primitive";
    case ImplKind::kParameterizedIp: return "parameterized-ip";
  }
  return "?";
}

std::size_t ImplLibrary::config_count() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.configs.size();
  return n;
}

ImplLibrary ImplLibrary::per_operation_only() const {
  ImplLibrary out = *this;
  out.entries.clear();
  for (const auto& e : entries)
    if (e.matcher.op_count() == 1) out.entries.push_back(e);
  return out;
}

ImplLibrary load_library(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw LibraryError(std::string("library is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("", "library must be a JSON object");

  ImplLibrary lib;
  const json& ver = require(doc, "version", "library");
  if (!ver.is_number_integer() || ver.get<int>() != 1) fail("library", "unsupported version");

  const json& k = require(doc, "constants", "library");
  lib.constants.t_net = number(require(k, "t_net", "constants"), "constants.t_net");
  lib.constants.t_su = number(require(k, "t_su", "constants"), "constants.t_su");
  lib.constants.t_clkq = number(require(k, "t_clkq", "constants"), "constants.t_clkq");
  if (lib.constants.t_net < 0 || lib.constants.t_su < 0 || lib.constants.t_clkq < 0)
    fail("constants", "negative delay");

  if (doc.contains("algebraic_rules")) {
    std::vector<AlgebraicRuleSpec> rules;
    std::size_t i = 0;
    for (const auto& r : doc.at("algebraic_rules")) {
      const std::string where = fmt::format("algebraic_rules[{}]", i++);
      AlgebraicRuleSpec spec;
      std::string rule = text(r.is_object() ? require(r, "rule", where) : r, where);
      spec.name = r.is_object() && r.contains("name") ? text(r.at("name"), where) : where;
      auto arrow = rule.find("->");
      if (arrow == std::string::npos) fail(where, "expected '<matcher> -> <applier>'");
      spec.lhs = rule.substr(0, arrow);
      spec.rhs = rule.substr(arrow + 2);
      auto trim = [](std::string& s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t") + 1);
      };
      trim(spec.lhs);
      trim(spec.rhs);
      try {
        (void)make_algebraic_rule(spec.name, spec.lhs, spec.rhs);
      } catch (const Error& e) {
        fail(where, e.what());
      }
      rules.push_back(std::move(spec));
    }
    lib.algebraic_rules = std::move(rules);
  }

  if (doc.contains("templates")) {
    for (const auto& [name, body] : doc.at("templates").items())
      lib.templates[name] = text(body, "templates." + name);
  }

  std::set<std::pair<std::string, std::string>> seen;
  std::size_t ei = 0;
  for (const auto& je : require(doc, "implementations", "library")) {
    std::string where = fmt::format("implementations[{}]", ei++);
    ImplEntry e;
    e.identifier = text(require(je, "identifier", where), where + ".identifier");
    where += " (" + e.identifier + ")";
    if (e.identifier.empty() || e.identifier.find('#') != std::string::npos)
      fail(where, "identifier must be nonempty and must not contain '#'");
    e.kind = parse_kind(text(require(je, "kind", where), where), where);
    try {
      e.matcher = parse_pattern(text(require(je, "matcher", where), where));
    } catch (const LibraryError&) {
      throw;
    } catch (const Error& err) {
      fail(where, err.what());
    }
    if (e.matcher.is_var()) fail(where, "matcher must not be a bare variable");
    check_matcher_symbols(e.matcher, where);
    e.ports = e.matcher.vars();

    if (je.contains("conditions")) {
      for (const auto& jc : je.at("conditions")) {
        PortCondition c;
        c.port = text(require(jc, "port", where), where);
        if (c.port != "$out" && std::find(e.ports.begin(), e.ports.end(), c.port) == e.ports.end())
          fail(where, "condition on unknown port '" + c.port + "'");
        if (jc.contains("min_bits")) c.min_bits = jc.at("min_bits").get<int>();
        if (jc.contains("max_bits")) c.max_bits = jc.at("max_bits").get<int>();
        if (jc.contains("kind")) {
          c.kind = text(jc.at("kind"), where);
          if (*c.kind != "int" && *c.kind != "signed" && *c.kind != "unsigned" && *c.kind != "float")
            fail(where, "unknown condition kind '" + *c.kind + "'");
        }
        e.conditions.push_back(std::move(c));
      }
    }

    const json& configs = require(je, "configurations", where);
    if (!configs.is_array() || configs.empty()) fail(where, "needs at least one configuration");
    for (const auto& jc : configs) {
      ImplConfig c;
      c.id = text(require(jc, "id", where), where + ".id");
      const std::string cw = where + "#" + c.id;
      if (!seen.emplace(e.identifier, c.id).second) fail(cw, "duplicate (identifier, config-id)");
      c.timing = parse_profile(jc, e.ports, cw);
      if (jc.contains("resources"))
        for (const auto& [name, v] : jc.at("resources").items()) c.resources[name] = v.get<int>();
      c.template_name = text(require(jc, "template", cw), cw + ".template");
      if (jc.contains("params"))
        for (const auto& [name, v] : jc.at("params").items())
          c.params[name] = v.is_string() ? v.get<std::string>() : v.dump();
      e.configs.push_back(std::move(c));
    }
    if (je.contains("commutative")) {
      e.commutative = je.at("commutative").get<bool>();
      if (e.commutative) {
        if (e.matcher.children.size() != e.ports.size())
          fail(where, "commutative entries need a single-operator matcher");
        for (const auto& c : e.configs) {
          const auto& t = c.timing.t_incoming;
          for (const auto& [_, v] : t)
            if (v != t.begin()->second) fail(where, "commutative entry with asymmetric port timing");
        }
        for (const auto& c : e.conditions)
          if (c.port != "$out") fail(where, "commutative entries may only constrain $out");
      }
    }
    lib.entries.push_back(std::move(e));
  }
  return lib;
}

ImplLibrary load_library_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LibraryError("cannot read library file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_library(ss.str());
}

std::string serialize_library(const ImplLibrary& lib) {
  ordered_json doc;
  doc["version"] = lib.version;
  doc["constants"] = {{"t_net", lib.constants.t_net},
                      {"t_su", lib.constants.t_su},
                      {"t_clkq", lib.constants.t_clkq}};
  if (lib.algebraic_rules) {
    doc["algebraic_rules"] = ordered_json::array();
    for (const auto& r : *lib.algebraic_rules)
      doc["algebraic_rules"].push_back({{"name", r.name}, {"rule", r.lhs + " -> " + r.rhs}});
  }
  doc["templates"] = ordered_json::object();
  for (const auto& [name, body] : lib.templates) doc["templates"][name] = body;
  doc["implementations"] = ordered_json::array();
  for (const auto& e : lib.entries) {
    ordered_json je;
    je["identifier"] = e.identifier;
    je["kind"] = impl_kind_name(e.kind);
    je["matcher"] = e.matcher.str();
    if (e.commutative) je["commutative"] = true;
    je["conditions"] = ordered_json::array();
    for (const auto& c : e.conditions) {
      ordered_json jc{{"port", c.port}, {"min_bits", c.min_bits}, {"max_bits", c.max_bits}};
      if (c.kind) jc["kind"] = *c.kind;
      je["conditions"].push_back(std::move(jc));
    }
    je["configurations"] = ordered_json::array();
    for (const auto& c : e.configs) {
      ordered_json jc;
      jc["id"] = c.id;
      jc["latency"] = c.timing.latency;
      jc["t_incoming"] = c.timing.t_incoming;
      jc["t_outgoing"] = c.timing.t_outgoing;
      jc["t_cycle"] = c.timing.t_cycle;
      jc["resources"] = c.resources;
      jc["template"] = c.template_name;
      jc["params"] = c.params;
      je["configurations"].push_back(std::move(jc));
    }
    doc["implementations"].push_back(std::move(je));
  }
  return doc.dump(2);
}

bool check_condition(const PortCondition& cond, DataType t) {
  if (t.bits < cond.min_bits || t.bits > cond.max_bits) return false;
  if (!cond.kind) return true;
  if (*cond.kind == "int") return t.is_int();
  if (*cond.kind == "signed") return t.kind == TypeKind::kSigned;
  if (*cond.kind == "unsigned") return t.kind == TypeKind::kUnsigned;
  return t.kind == TypeKind::kFloat;
}

bool check_condition(std::span<const PortCondition> conds,
                     const std::map<std::string, DataType>& port_types) {
  for (const auto& c : conds) {
    auto it = port_types.find(c.port);
    if (it == port_types.end() || !check_condition(c, it->second)) return false;
  }
  return true;
}

std::vector<RewriteRule> enumerate_impl_rules(const ImplLibrary& lib) {
  std::vector<RewriteRule> rules;
  for (std::size_t ei = 0; ei < lib.entries.size(); ++ei) {
    const ImplEntry& e = lib.entries[ei];
    for (std::size_t ci = 0; ci < e.configs.size(); ++ci) {
      RewriteRule r;
      r.name = e.symbol(ci);
      r.kind = RuleKind::kImplementation;
      r.matcher = e.matcher;
      r.applier.symbol = r.name;
      for (const auto& p : e.ports) r.applier.children.push_back(Pattern{"?" + p, {}});
      r.impl = ImplRef{ei, ci};
      r.unordered_args = e.commutative;
      r.condition = [conds = e.conditions, matcher = e.matcher](const EGraph& g, const Match& m) {
        std::map<std::string, DataType> types;
        for (const auto& [port, cls] : m.binding) types[port] = g.eclass(cls).dtype;
        types["$out"] = g.eclass(m.cls).dtype;
        return check_condition(conds, types) && width_safe(g, matcher, m);
      };
      rules.push_back(std::move(r));
    }
  }
  return rules;
}

std::vector<RewriteRule> library_algebraic_rules(const ImplLibrary& lib) {
  if (!lib.algebraic_rules) return default_algebraic_rules();
  std::vector<RewriteRule> rules;
  for (const auto& r : *lib.algebraic_rules) rules.push_back(make_algebraic_rule(r.name, r.lhs, r.rhs));
  return rules;
}

}  // namespace eqsched
