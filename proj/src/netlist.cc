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

#include "eqsched/netlist.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <functional>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

namespace eqsched {

namespace {

std::string sanitize(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || (out[0] >= '0' && out[0] <= '9')) out.insert(out.begin(), '_');
  return out;
}

std::string decl(DataType t) {
  if (t.kind == TypeKind::kSigned) return fmt::format("signed [{}:0]", t.bits - 1);
  return fmt::format("[{}:0]", t.bits - 1);
}

std::string tap_name(const std::string& net, int k) { return fmt::format("{}_d{}", net, k); }

std::string const_bits(const ConstNet& c) {
  std::uint64_t bits = 0;
  if (c.dtype.is_int()) {
    bits = static_cast<std::uint64_t>(c.value);
  } else {
    float f = 0.0f;
    try {
      f = std::stof(c.literal);
    } catch (const std::exception&) {
      throw Error("bad float literal '" + c.literal + "'");
    }
    bits = std::bit_cast<std::uint32_t>(f);
  }
  if (c.dtype.bits < 64) bits &= (std::uint64_t{1} << c.dtype.bits) - 1;
  return fmt::format("{}'h{:x}", c.dtype.bits, bits);
}

}  // namespace

std::size_t Netlist::register_count() const {
  std::size_t n = 0;
  for (const auto& c : chains) n += c.taps.size();
  return n;
}

Netlist build_netlist(const Solution& sol, const ImplGraph& g, const Program& p) {
  const EGraph& eg = g.egraph();
  const ImplLibrary& lib = g.library();
  Netlist n;
  n.module = sanitize(p.name.empty() ? "kernel" : p.name);
  n.latency = sol.latency;

  std::set<std::string> used_names{"clk", "rst"};
  auto unique = [&](std::string base) {
    std::string name = base;
    for (int i = 1; used_names.count(name); ++i) name = fmt::format("{}_{}", base, i);
    used_names.insert(name);
    return name;
  };

  std::unordered_map<std::string, std::string> input_net;  // program input name -> port
  for (ValueId v : p.inputs()) {
    NetlistPort port;
    port.value = p.values[v].name;
    port.dtype = p.values[v].dtype;
    port.name = unique("in_" + sanitize(port.value));
    port.net = port.name;
    input_net[port.value] = port.name;
    n.inputs.push_back(std::move(port));
  }

  // Driving net and finish cycle of every class the solution touches.
  std::unordered_map<ClassId, std::string> class_net;
  std::unordered_map<ClassId, DataType> class_type;
  std::unordered_map<ClassId, int> class_finish;
  auto leaf_net = [&](ClassId c) -> std::string {
    std::optional<NodeId> pick;
    for (NodeId id : eg.eclass(c).nodes) {
      const ENode& e = eg.node(id);
      if (!e.is_leaf()) continue;
      if (!pick || (e.symbol == "input" && eg.node(*pick).symbol != "input")) pick = id;
    }
    if (!pick) throw Error(fmt::format("class {} has no leaf node", c));
    const ENode& e = eg.node(*pick);
    if (e.symbol == "input") return input_net.at(e.payload);
    ConstNet k;
    k.name = unique(fmt::format("k{}", c));
    k.dtype = e.dtype;
    k.literal = e.payload;
    if (k.dtype.is_int()) k.value = parse_int_literal(k.dtype, k.literal);
    n.consts.push_back(k);
    return k.name;
  };

  std::unordered_map<ClassId, const Placement*> chosen;
  for (const Placement& pl : sol.selected) {
    if (!g.contains(pl.node)) throw Error(fmt::format("node {} is not an implementation", pl.node));
    const ClassId c = g.node(pl.node).cls;
    if (!chosen.emplace(c, &pl).second)
      throw Error(fmt::format("class {} has more than one selected implementation", c));
  }
  auto net_of = [&](ClassId c) -> const std::string& {
    if (auto it = class_net.find(c); it != class_net.end()) return it->second;
    if (g.is_leaf(c)) {
      class_finish[c] = 0;
      class_type[c] = eg.eclass(c).dtype;
      return class_net[c] = leaf_net(c);
    }
    auto it = chosen.find(c);
    if (it == chosen.end()) throw Error(fmt::format("class {} has no selected implementation", c));
    class_finish[c] = it->second->finish;
    class_type[c] = eg.eclass(c).dtype;
    return class_net[c] = unique(fmt::format("c{}", c));
  };

  for (const Placement& pl : sol.selected) {
    const ImplNode& node = g.node(pl.node);
    const ImplConfig& cfg = lib.config(node.impl);
    Instance inst;
    inst.name = unique(fmt::format("U{}", pl.node));
    inst.node = pl.node;
    inst.impl = node.impl;
    inst.identifier = node.entry->identifier;
    inst.config = cfg.id;
    inst.template_name = cfg.template_name;
    inst.params = cfg.params;
    inst.out = net_of(node.cls);
    inst.out_type = eg.eclass(node.cls).dtype;
    inst.start = pl.start;
    inst.finish = pl.finish;
    inst.latency = node.profile->latency;
    if (pl.finish != pl.start + inst.latency)
      throw Error(fmt::format("node {} finish does not match its latency", pl.node));
    n.nets.push_back({inst.out, inst.out_type, node.cls});
    n.instances.push_back(std::move(inst));
  }

  // Port connections with register taps; chain depth is the longest delay
  // any reader of a net needs.
  std::map<std::string, int> depth;
  auto tap = [&](ClassId c, int delay, std::string& base) {
    base = net_of(c);
    if (delay < 0) throw Error(fmt::format("class {} is read before it is ready", c));
    if (delay == 0) return base;
    int& d = depth[base];
    d = std::max(d, delay);
    return tap_name(base, delay);
  };
  for (Instance& inst : n.instances) {
    const ImplNode& node = g.node(inst.node);
    for (std::size_t i = 0; i < node.args.size(); ++i) {
      const ClassId a = node.args[i];
      InstancePort port;
      port.port = node.port(i);
      net_of(a);
      port.delay = inst.start - class_finish.at(a);
      port.net = tap(a, port.delay, port.base);
      port.dtype = class_type.at(a);
      inst.ports.push_back(std::move(port));
    }
  }

  for (std::size_t i = 0; i < p.outputs.size(); ++i) {
    const ClassId r = eg.find(eg.roots.at(i));
    NetlistPort port;
    port.value = p.values[p.outputs[i]].name;
    port.dtype = p.values[p.outputs[i]].dtype;
    port.name = unique("out_" + sanitize(port.value));
    net_of(r);
    port.delay = sol.latency - class_finish.at(r);
    port.net = tap(r, port.delay, port.base);
    n.outputs.push_back(std::move(port));
  }

  std::unordered_map<std::string, DataType> net_type;
  for (const auto& [c, name] : class_net) net_type[name] = class_type.at(c);
  for (const auto& [net, d] : depth) {
    RegisterChain chain;
    chain.net = net;
    chain.dtype = net_type.at(net);
    for (int k = 1; k <= d; ++k) chain.taps.push_back(tap_name(net, k));
    n.chains.push_back(std::move(chain));
  }
  std::sort(n.instances.begin(), n.instances.end(), [](const Instance& a, const Instance& b) {
    return std::tie(a.start, a.node) < std::tie(b.start, b.node);
  });
  std::sort(n.nets.begin(), n.nets.end(),
            [](const Net& a, const Net& b) { return a.cls < b.cls; });
  std::sort(n.consts.begin(), n.consts.end(),
            [](const ConstNet& a, const ConstNet& b) { return a.name < b.name; });
  return n;
}

namespace {

std::string render(const std::string& tmpl, const Instance& inst,
                   const std::map<std::string, std::string>& port_nets) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl[i] != '{') {
      out.push_back(tmpl[i++]);
      continue;
    }
    const std::size_t close = tmpl.find('}', i);
    if (close == std::string::npos)
      throw LibraryError("unterminated placeholder in template '" + inst.template_name + "'");
    const std::string key = tmpl.substr(i + 1, close - i - 1);
    i = close + 1;
    if (key == "inst") {
      out += inst.name;
    } else if (key == "out") {
      out += inst.out;
    } else if (key == "clk") {
      out += "clk";
    } else if (key == "rst") {
      out += "rst";
    } else if (key == "width") {
      out += std::to_string(inst.out_type.bits);
    } else if (key == "params") {
      std::vector<std::string> parts;
      for (const auto& [k, v] : inst.params) parts.push_back(fmt::format(".{}({})", k, v));
      out += fmt::format("{}", fmt::join(parts, ", "));
    } else if (key == "ports") {
      std::vector<std::string> parts;
      for (const auto& p : inst.ports) parts.push_back(fmt::format(".{}({})", p.port, p.net));
      out += fmt::format("{}", fmt::join(parts, ", "));
    } else if (auto it = port_nets.find(key); it != port_nets.end()) {
      out += it->second;
    } else {
      throw LibraryError("unknown placeholder {" + key + "} in template '" +
                         inst.template_name + "'");
    }
  }
  return out;
}

}  // namespace

std::string emit_verilog(const Netlist& n, const ImplLibrary& lib) {
  std::string v;
  auto line = [&](std::string_view s) {
    v += s;
    v += '\n';
  };
  line(fmt::format("// {}: latency {} cycles", n.module, n.latency));
  line(fmt::format("module {} (", n.module));
  std::vector<std::string> ports{"  input wire clk", "  input wire rst"};
  for (const auto& p : n.inputs) ports.push_back(fmt::format("  input wire {} {}", decl(p.dtype), p.name));
  for (const auto& p : n.outputs)
    ports.push_back(fmt::format("  output wire {} {}", decl(p.dtype), p.name));
  for (std::size_t i = 0; i < ports.size(); ++i)
    line(ports[i] + (i + 1 < ports.size() ? "," : ""));
  line(");");
  for (const auto& k : n.consts)
    line(fmt::format("  wire {} {} = {};", decl(k.dtype), k.name, const_bits(k)));
  for (const auto& net : n.nets) line(fmt::format("  wire {} {};", decl(net.dtype), net.name));
  for (const auto& c : n.chains)
    line(fmt::format("  reg {} {};", decl(c.dtype), fmt::join(c.taps, ", ")));
  if (!n.chains.empty()) {
    line("");
    line("  always @(posedge clk) begin");
    line("    if (rst) begin");
    for (const auto& c : n.chains)
      for (const auto& t : c.taps) line(fmt::format("      {} <= 0;", t));
    line("    end else begin");
    for (const auto& c : n.chains) {
      std::string prev = c.net;
      for (const auto& t : c.taps) {
        line(fmt::format("      {} <= {};", t, prev));
        prev = t;
      }
    }
    line("    end");
    line("  end");
  }
  for (const auto& inst : n.instances) {
    auto it = lib.templates.find(inst.template_name);
    if (it == lib.templates.end())
      throw LibraryError("template '" + inst.template_name + "' is not in the library");
    std::map<std::string, std::string> port_nets;
    for (const auto& p : inst.ports) port_nets[p.port] = p.net;
    line("");
    line(fmt::format("  // {}#{} start {} finish {}", inst.identifier, inst.config, inst.start,
                     inst.finish));
    const std::string text = render(it->second, inst, port_nets);
    std::size_t from = 0;
    while (from <= text.size()) {
      const std::size_t nl = text.find('\n', from);
      const std::string part = text.substr(from, nl == std::string::npos ? nl : nl - from);
      line("  " + part);
      if (nl == std::string::npos) break;
      from = nl + 1;
    }
  }
  if (!n.outputs.empty()) line("");
  for (const auto& p : n.outputs) line(fmt::format("  assign {} = {};", p.name, p.net));
  line("endmodule");
  return v;
}

std::string emit_netlist(const Solution& sol, const ImplGraph& g, const Program& p) {
  return emit_verilog(build_netlist(sol, g, p), g.library());
}

std::string function_text(const Pattern& m) {
  static const std::map<std::string, std::string> infix{
      {"add", "+"}, {"sub", "-"}, {"mul", "*"}, {"div", "/"},   {"and", "&"},
      {"or", "|"},  {"xor", "^"}, {"shl", "<<"}, {"shr", ">>"}, {"cmp", "<"}};
  if (m.is_var()) return m.var_name();
  auto child = [&](const Pattern& c) {
    const std::string t = function_text(c);
    if (c.is_var() || (c.children.size() == 1 && !infix.count(c.symbol) && c.symbol != "neg"))
      return t;
    return "(" + t + ")";
  };
  if (m.symbol == "neg" && m.children.size() == 1) return "-" + child(m.children[0]);
  if (auto it = infix.find(m.symbol); it != infix.end() && m.children.size() == 2)
    return child(m.children[0]) + it->second + child(m.children[1]);
  std::vector<std::string> args;
  for (const auto& c : m.children) args.push_back(function_text(c));
  return fmt::format("{}({})", m.symbol, fmt::join(args, ", "));
}

std::string emit_schedule_report(const Solution& sol, const ImplGraph& g, const Program& p) {
  const Netlist n = build_netlist(sol, g, p);
  std::string r;
  r += fmt::format("kernel {}\n", p.name);
  r += fmt::format("latency = {} cycles\n", sol.latency);
  if (g.clock_ns())
    r += fmt::format("clock = {:.3f} ns ({:.1f} MHz)\n", *g.clock_ns(), 1000.0 / *g.clock_ns());
  r += fmt::format("solver = {} ({})\n", solver_name(sol.solver), status_name(sol.status));
  r += fmt::format("instances = {}\n", n.instances.size());
  for (const auto& inst : n.instances) {
    const ImplEntry& e = g.library().entry(inst.impl);
    r += fmt::format("  {} {} func = \"{}\" config = {} start = {} finish = {}\n", inst.name,
                     inst.identifier, function_text(e.matcher), inst.config, inst.start,
                     inst.finish);
  }
  std::unordered_map<std::string, std::string> producer;
  for (const auto& inst : n.instances) producer[inst.out] = inst.name;
  for (const auto& in : n.inputs) producer[in.net] = in.name;
  for (const auto& k : n.consts) producer[k.name] = k.name;
  r += fmt::format("registers = {}\n", n.register_count());
  for (const auto& inst : n.instances)
    for (const auto& port : inst.ports)
      if (port.delay > 0)
        r += fmt::format("  {} -> {}.{} : {}\n", producer.at(port.base), inst.name, port.port,
                         port.delay);
  for (const auto& out : n.outputs)
    if (out.delay > 0)
      r += fmt::format("  {} -> {} : {}\n", producer.at(out.base), out.name, out.delay);
  return r;
}

namespace {

std::int64_t eval_matcher(const Pattern& m, DataType result,
                          const std::map<std::string, std::pair<std::int64_t, DataType>>& env) {
  if (m.is_var()) return env.at(m.var_name()).first;
  const auto op = op_from_name(m.symbol);
  if (!op) throw Error("cannot simulate operator '" + m.symbol + "'");
  const DataType wide{TypeKind::kSigned, 64};
  std::vector<std::int64_t> args;
  std::vector<DataType> types;
  for (const auto& c : m.children) {
    if (c.is_var()) {
      const auto& [v, t] = env.at(c.var_name());
      args.push_back(v);
      types.push_back(t);
    } else {
      args.push_back(eval_matcher(c, wide, env));
      types.push_back(wide);
    }
  }
  return apply_int_op(*op, result, args, types);
}

}  // namespace

std::vector<std::vector<std::int64_t>> simulate(const Netlist& n, const ImplLibrary& lib,
                                                const std::vector<std::vector<std::int64_t>>& stream,
                                                int cycles) {
  std::unordered_map<std::string, std::int64_t> val;
  for (const auto& p : n.inputs)
    if (!p.dtype.is_int()) throw Error("cannot simulate float input '" + p.value + "'");
  for (const auto& net : n.nets)
    if (!net.dtype.is_int()) throw Error("cannot simulate float net '" + net.name + "'");
  for (const auto& k : n.consts) {
    if (!k.dtype.is_int()) throw Error("cannot simulate float constant '" + k.name + "'");
    val[k.name] = k.value;
  }
  for (const auto& c : n.chains)
    for (const auto& t : c.taps) val[t] = 0;

  // Combinational instances in dependency order.
  std::unordered_map<std::string, std::size_t> driver;
  for (std::size_t i = 0; i < n.instances.size(); ++i) driver[n.instances[i].out] = i;
  std::vector<std::size_t> order;
  std::vector<int> mark(n.instances.size(), 0);
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    if (mark[i] == 2) return;
    if (mark[i] == 1) throw Error("combinational loop through " + n.instances[i].name);
    mark[i] = 1;
    if (n.instances[i].latency == 0)
      for (const auto& p : n.instances[i].ports)
        if (auto it = driver.find(p.net); it != driver.end() && n.instances[it->second].latency == 0)
          visit(it->second);
    mark[i] = 2;
    if (n.instances[i].latency == 0) order.push_back(i);
  };
  for (std::size_t i = 0; i < n.instances.size(); ++i) visit(i);

  std::vector<std::vector<std::int64_t>> pipes(n.instances.size());
  for (std::size_t i = 0; i < n.instances.size(); ++i)
    pipes[i].assign(static_cast<std::size_t>(n.instances[i].latency), 0);

  auto compute = [&](const Instance& inst) {
    std::map<std::string, std::pair<std::int64_t, DataType>> env;
    for (const auto& p : inst.ports) env[p.port] = {val.at(p.net), p.dtype};
    return eval_matcher(lib.entry(inst.impl).matcher, inst.out_type, env);
  };

  std::vector<std::vector<std::int64_t>> out;
  for (int t = 0; t < cycles; ++t) {
    const std::vector<std::int64_t>* in =
        static_cast<std::size_t>(t) < stream.size() ? &stream[t] : nullptr;
    for (std::size_t i = 0; i < n.inputs.size(); ++i) {
      const std::int64_t raw = in && i < in->size() ? (*in)[i] : 0;
      val[n.inputs[i].net] = wrap_to(n.inputs[i].dtype, raw);
    }
    for (std::size_t i = 0; i < n.instances.size(); ++i)
      if (!pipes[i].empty()) val[n.instances[i].out] = pipes[i].back();
    for (std::size_t i : order) val[n.instances[i].out] = compute(n.instances[i]);
    std::vector<std::int64_t> row;
    for (const auto& p : n.outputs) row.push_back(val.at(p.net));
    out.push_back(std::move(row));

    // Clock edge.
    for (std::size_t i = 0; i < n.instances.size(); ++i) {
      auto& pipe = pipes[i];
      if (pipe.empty()) continue;
      for (std::size_t k = pipe.size() - 1; k > 0; --k) pipe[k] = pipe[k - 1];
      pipe[0] = compute(n.instances[i]);
    }
    for (const auto& c : n.chains) {
      for (std::size_t k = c.taps.size() - 1; k > 0; --k) val[c.taps[k]] = val[c.taps[k - 1]];
      val[c.taps[0]] = val.at(c.net);
    }
  }
  return out;
}

NetlistTimingReport check_netlist_timing(const Netlist& n, const ImplLibrary& lib,
                                         double clock_ns) {
  constexpr double kEps = 1e-9;
  NetlistTimingReport rep;
  const TimingConstants& k = lib.constants;
  std::unordered_map<std::string, std::size_t> driver;
  for (std::size_t i = 0; i < n.instances.size(); ++i) driver[n.instances[i].out] = i;
  auto prof = [&](std::size_t i) -> const TimingProfile& { return lib.profile(n.instances[i].impl); };

  for (std::size_t i = 0; i < n.instances.size(); ++i)
    if (!usable_at_clock(prof(i), clock_ns)) rep.unusable.push_back(n.instances[i].name);

  // Longest register-free arrival at each instance input, in topological
  // order over direct (undelayed) connections.
  const std::size_t m = n.instances.size();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> preds(m);  // (driver, port idx)
  std::vector<int> indeg(m, 0);
  std::vector<std::vector<std::size_t>> succs(m);
  for (std::size_t v = 0; v < m; ++v) {
    const auto& ports = n.instances[v].ports;
    for (std::size_t q = 0; q < ports.size(); ++q) {
      if (ports[q].delay != 0) continue;
      auto it = driver.find(ports[q].net);
      if (it == driver.end()) continue;
      preds[v].push_back({it->second, q});
      succs[it->second].push_back(v);
      ++indeg[v];
    }
  }
  std::vector<std::size_t> topo;
  for (std::size_t i = 0; i < m; ++i)
    if (indeg[i] == 0) topo.push_back(i);
  for (std::size_t h = 0; h < topo.size(); ++h)
    for (std::size_t v : succs[topo[h]])
      if (--indeg[v] == 0) topo.push_back(v);
  if (topo.size() != m) throw Error("netlist has a combinational loop");

  struct Arrival {
    double delay = -1.0;
    std::size_t pred = 0;
    std::size_t port = 0;
  };
  std::vector<Arrival> arrive(m);
  std::vector<bool> through(m, false);
  auto out_delay = [&](std::size_t u) {
    const TimingProfile& t = prof(u);
    if (!t.combinational()) return t.t_outgoing;
    const double start = t.max_incoming();
    through[u] = arrive[u].delay > start;
    return std::max(start, arrive[u].delay) + t.t_outgoing;
  };
  for (std::size_t v : topo) {
    for (const auto& [u, q] : preds[v]) {
      const auto& in = prof(v).t_incoming;
      auto it = in.find(n.instances[v].ports[q].port);
      const double tin = it == in.end() ? 0.0 : it->second;
      const double d = out_delay(u) + k.t_net + tin;
      rep.worst_ns = std::max(rep.worst_ns, d);
      if (d > arrive[v].delay) arrive[v] = {d, u, q};
    }
  }
  for (std::size_t v = 0; v < m; ++v) {
    if (arrive[v].delay <= clock_ns + kEps) continue;
    TimingViolationPath path;
    path.delay = arrive[v].delay;
    std::size_t cur = v;
    while (true) {
      path.instances.push_back(n.instances[cur].name);
      path.nodes.push_back(n.instances[cur].node);
      if (arrive[cur].delay < 0 || (cur != v && !through[cur])) break;
      path.ports.push_back(n.instances[cur].ports[arrive[cur].port].port);
      cur = arrive[cur].pred;
    }
    std::reverse(path.instances.begin(), path.instances.end());
    std::reverse(path.nodes.begin(), path.nodes.end());
    std::reverse(path.ports.begin(), path.ports.end());
    rep.violations.push_back(std::move(path));
  }
  return rep;
}

}  // namespace eqsched
