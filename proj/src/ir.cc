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

#include "eqsched/ir.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace eqsched {

namespace {

using u128 = unsigned __int128;
using i128 = __int128;

constexpr std::string_view kOpNames[] = {
    "add", "sub", "neg", "mul", "div", "shl", "shr", "and", "or",
    "xor", "cmp", "exp", "log", "sqrt", "recip", "const", "input",
};

std::string_view kind_name(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::kSyntax: return "syntax error";
    case ParseError::Kind::kArity: return "arity mismatch";
    case ParseError::Kind::kUndefined: return "undefined operand";
    case ParseError::Kind::kType: return "type mismatch";
    case ParseError::Kind::kDuplicate: return "duplicate definition";
  }
  return "error";
}

i128 to_i128(DataType t, std::int64_t v) {
  if (t.kind == TypeKind::kUnsigned) return static_cast<i128>(static_cast<std::uint64_t>(v));
  return static_cast<i128>(v);
}

std::int64_t wrap128(DataType t, u128 raw) {
  const int w = t.bits;
  std::uint64_t low = static_cast<std::uint64_t>(raw);
  if (w < 64) {
    const std::uint64_t mask = (std::uint64_t{1} << w) - 1;
    low &= mask;
    if (t.kind == TypeKind::kSigned && (low >> (w - 1)) & 1) low |= ~mask;
  }
  return static_cast<std::int64_t>(low);
}

struct Token {
  std::string text;
  int column;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
      ++i;
      continue;
    }
    if (line[i] == '=') {
      out.push_back({"=", static_cast<int>(i) + 1});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' &&
           line[j] != '=')
      ++j;
    out.push_back({std::string(line.substr(i, j - i)), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto ok_first = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '%'; };
  if (!ok_first(s[0])) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '%';
  });
}

bool is_literal(DataType t, const std::string& s) {
  if (t.is_int()) {
    std::int64_t v = 0;
    std::string_view sv = s;
    if (!sv.empty() && sv[0] == '+') sv.remove_prefix(1);
    auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (ec == std::errc() && p == sv.data() + sv.size()) return true;
    std::uint64_t u = 0;
    auto [pu, ecu] = std::from_chars(sv.data(), sv.data() + sv.size(), u);
    return ecu == std::errc() && pu == sv.data() + sv.size();
  }
  try {
    std::size_t used = 0;
    (void)std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

ParseError::ParseError(Kind kind, int line, int column, const std::string& message)
    : Error(fmt::format("{}:{}: {}: {}", line, column, kind_name(kind), message)),
      kind_(kind),
      line_(line),
      column_(column) {}

i128 DataType::min_value() const {
  if (kind == TypeKind::kUnsigned) return 0;
  return -(static_cast<i128>(1) << (bits - 1));
}

i128 DataType::max_value() const {
  if (kind == TypeKind::kUnsigned) return (static_cast<i128>(1) << bits) - 1;
  return (static_cast<i128>(1) << (bits - 1)) - 1;
}

std::string DataType::str() const {
  switch (kind) {
    case TypeKind::kSigned: return fmt::format("i{}", bits);
    case TypeKind::kUnsigned: return fmt::format("u{}", bits);
    case TypeKind::kFloat: return fmt::format("f{}", bits);
  }
  return "?";
}

std::optional<DataType> DataType::parse(std::string_view token) {
  if (token.size() < 2) return std::nullopt;
  TypeKind kind;
  switch (token[0]) {
    case 'i': kind = TypeKind::kSigned; break;
    case 'u': kind = TypeKind::kUnsigned; break;
    case 'f': kind = TypeKind::kFloat; break;
    default: return std::nullopt;
  }
  int bits = 0;
  auto [p, ec] = std::from_chars(token.data() + 1, token.data() + token.size(), bits);
  if (ec != std::errc() || p != token.data() + token.size()) return std::nullopt;
  if (bits < 1 || bits > 64) return std::nullopt;
  if (kind == TypeKind::kFloat && bits != 32) return std::nullopt;
  return DataType{kind, bits};
}

std::string_view op_name(Op op) { return kOpNames[static_cast<int>(op)]; }

std::optional<Op> op_from_name(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kOpNames); ++i)
    if (kOpNames[i] == name) return static_cast<Op>(i);
  return std::nullopt;
}

int op_arity(Op op) {
  switch (op) {
    case Op::kNeg:
    case Op::kExp:
    case Op::kLog:
    case Op::kSqrt:
    case Op::kRecip:
      return 1;
    case Op::kConst:
    case Op::kInput:
      return 0;
    default:
      return 2;
  }
}

bool op_is_float_only(Op op) {
  return op == Op::kExp || op == Op::kLog || op == Op::kSqrt || op == Op::kRecip;
}

bool op_is_ring(Op op) {
  switch (op) {
    case Op::kAdd:
    case Op::kSub:
    case Op::kNeg:
    case Op::kMul:
    case Op::kShl:
    case Op::kAnd:
    case Op::kOr:
    case Op::kXor:
      return true;
    default:
      return false;
  }
}

int natural_width(Op op, std::span<const DataType> operands) {
  int widest = 1;
  for (const auto& t : operands) widest = std::max(widest, t.bits);
  int w = widest;
  switch (op) {
    case Op::kAdd:
    case Op::kSub:
      w = widest + 1;
      break;
    case Op::kNeg:
      w = operands[0].bits + 1;
      break;
    case Op::kMul:
      w = operands[0].bits + operands[1].bits;
      break;
    case Op::kDiv:
    case Op::kShl:
    case Op::kShr:
      w = operands[0].bits;
      break;
    case Op::kCmp:
      w = 64;  // any declared width holds a 0/1 result
      break;
    default:
      break;
  }
  return std::min(w, 64);
}

std::vector<ValueId> Program::inputs() const {
  std::vector<ValueId> out;
  for (ValueId i = 0; i < values.size(); ++i)
    if (values[i].op == Op::kInput) out.push_back(i);
  return out;
}

std::size_t Program::op_count() const {
  return std::count_if(values.begin(), values.end(), [](const Value& v) {
    return v.op != Op::kInput && v.op != Op::kConst;
  });
}

std::optional<ValueId> Program::find(std::string_view name) const {
  for (ValueId i = 0; i < values.size(); ++i)
    if (values[i].name == name) return i;
  return std::nullopt;
}

Program parse_program(std::string_view text, std::string name) {
  Program p;
  p.name = std::move(name);
  std::map<std::string, ValueId, std::less<>> ids;
  bool seen_return = false;
  int line_no = 0;

  auto statement = [&](std::string_view stmt, int line, int col_offset) {
    std::vector<Token> toks = tokenize(stmt);
    for (auto& t : toks) t.column += col_offset;
    if (toks.empty()) return;
    auto fail = [&](ParseError::Kind k, const Token& at, const std::string& msg) {
      throw ParseError(k, line, at.column, msg);
    };
    if (toks[0].text == "return") {
      if (seen_return) fail(ParseError::Kind::kSyntax, toks[0], "second return statement");
      if (toks.size() < 2) fail(ParseError::Kind::kSyntax, toks[0], "return needs at least one value");
      for (std::size_t i = 1; i < toks.size(); ++i) {
        auto it = ids.find(toks[i].text);
        if (it == ids.end()) fail(ParseError::Kind::kUndefined, toks[i], "'" + toks[i].text + "'");
        p.outputs.push_back(it->second);
      }
      seen_return = true;
      return;
    }
    if (seen_return) fail(ParseError::Kind::kSyntax, toks[0], "statement after return");
    if (toks.size() < 4 || toks[1].text != "=")
      fail(ParseError::Kind::kSyntax, toks[0], "expected '<id> = <op> <type> ...'");
    if (!is_identifier(toks[0].text))
      fail(ParseError::Kind::kSyntax, toks[0], "bad identifier '" + toks[0].text + "'");
    if (ids.count(toks[0].text))
      fail(ParseError::Kind::kDuplicate, toks[0], "'" + toks[0].text + "'");
    auto op = op_from_name(toks[2].text);
    if (!op) fail(ParseError::Kind::kSyntax, toks[2], "unknown operator '" + toks[2].text + "'");
    auto dtype = DataType::parse(toks[3].text);
    if (!dtype) fail(ParseError::Kind::kSyntax, toks[3], "bad type '" + toks[3].text + "'");

    Value v;
    v.name = toks[0].text;
    v.op = *op;
    v.dtype = *dtype;
    std::size_t rest = 4;
    if (*op == Op::kConst) {
      if (toks.size() != 5) fail(ParseError::Kind::kArity, toks[2], "const takes exactly one literal");
      if (!is_literal(*dtype, toks[4].text))
        fail(ParseError::Kind::kSyntax, toks[4], "bad literal '" + toks[4].text + "'");
      v.literal = toks[4].text;
      rest = 5;
    }
    const std::size_t nargs = toks.size() - rest;
    if (static_cast<int>(nargs) != op_arity(*op))
      fail(ParseError::Kind::kArity, toks[2],
           fmt::format("'{}' takes {} operand(s), got {}", toks[2].text, op_arity(*op), nargs));
    std::vector<DataType> arg_types;
    for (std::size_t i = rest; i < toks.size(); ++i) {
      auto it = ids.find(toks[i].text);
      if (it == ids.end()) fail(ParseError::Kind::kUndefined, toks[i], "'" + toks[i].text + "'");
      v.operands.push_back(it->second);
      arg_types.push_back(p.values[it->second].dtype);
    }

    // Type rules.
    const bool result_float = !dtype->is_int();
    if (op_is_float_only(*op) && !result_float)
      fail(ParseError::Kind::kType, toks[3], "operator requires f32");
    if ((*op == Op::kShl || *op == Op::kShr || *op == Op::kAnd || *op == Op::kOr ||
         *op == Op::kXor) && result_float)
      fail(ParseError::Kind::kType, toks[3], "bitwise operator on float");
    if (*op == Op::kCmp) {
      if (result_float) fail(ParseError::Kind::kType, toks[3], "cmp produces an integer");
      if (arg_types[0].is_int() != arg_types[1].is_int())
        fail(ParseError::Kind::kType, toks[rest], "cmp operands of mixed kind");
    } else {
      for (std::size_t i = 0; i < arg_types.size(); ++i)
        if (arg_types[i].is_int() == result_float)
          fail(ParseError::Kind::kType, toks[rest + i],
               fmt::format("operand '{}' is {}, result is {}", toks[rest + i].text,
                           arg_types[i].str(), dtype->str()));
    }
    if (dtype->is_int() && !arg_types.empty() && *op != Op::kCmp) {
      const int nat = natural_width(*op, arg_types);
      if (dtype->bits > nat)
        fail(ParseError::Kind::kType, toks[3],
             fmt::format("declared {} wider than the {}-bit result of {}", dtype->str(), nat,
                         toks[2].text));
    }
    ids.emplace(v.name, p.values.size());
    p.values.push_back(std::move(v));
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t semi = line.find(';', start);
      if (semi == std::string_view::npos) semi = line.size();
      statement(line.substr(start, semi - start), line_no, static_cast<int>(start));
      start = semi + 1;
    }
    pos = nl + 1;
  }
  if (!seen_return) throw ParseError(ParseError::Kind::kSyntax, line_no, 1, "missing return");
  return p;
}

std::string print_program(const Program& p) {
  std::ostringstream os;
  for (const auto& v : p.values) {
    os << v.name << " = " << op_name(v.op) << ' ' << v.dtype.str();
    if (v.literal) os << ' ' << *v.literal;
    for (ValueId a : v.operands) os << ' ' << p.values[a].name;
    os << '\n';
  }
  os << "return";
  for (ValueId o : p.outputs) os << ' ' << p.values[o].name;
  os << '\n';
  return os.str();
}

std::string program_to_dot(const Program& p) {
  std::ostringstream os;
  os << "digraph \"" << p.name << "\" {\n";
  for (ValueId i = 0; i < p.values.size(); ++i) {
    const Value& v = p.values[i];
    const bool is_out = std::find(p.outputs.begin(), p.outputs.end(), i) != p.outputs.end();
    os << "  v" << i << " [label=\"" << v.name << ": " << op_name(v.op);
    if (v.literal) os << ' ' << *v.literal;
    os << ' ' << v.dtype.str() << "\"";
    if (is_out) os << ", peripheries=2";
    os << "];\n";
  }
  for (ValueId i = 0; i < p.values.size(); ++i)
    for (ValueId a : p.values[i].operands) os << "  v" << a << " -> v" << i << ";\n";
  os << "}\n";
  return os.str();
}

std::int64_t wrap_to(DataType t, std::int64_t raw) {
  return wrap128(t, static_cast<u128>(static_cast<i128>(raw)));
}

std::int64_t apply_int_op(Op op, DataType result, std::span<const std::int64_t> args,
                          std::span<const DataType> arg_types) {
  auto val = [&](std::size_t i) { return to_i128(arg_types[i], args[i]); };
  auto bits = [&](std::size_t i) { return static_cast<u128>(val(i)); };
  switch (op) {
    case Op::kAdd: return wrap128(result, bits(0) + bits(1));
    case Op::kSub: return wrap128(result, bits(0) - bits(1));
    case Op::kNeg: return wrap128(result, u128{0} - bits(0));
    case Op::kMul: return wrap128(result, bits(0) * bits(1));
    case Op::kAnd: return wrap128(result, bits(0) & bits(1));
    case Op::kOr: return wrap128(result, bits(0) | bits(1));
    case Op::kXor: return wrap128(result, bits(0) ^ bits(1));
    case Op::kDiv: {
      const i128 d = val(1);
      if (d == 0) return 0;
      return wrap128(result, static_cast<u128>(val(0) / d));
    }
    case Op::kShl: {
      const i128 amount = val(1);
      if (amount < 0 || amount >= 128) return 0;
      return wrap128(result, bits(0) << static_cast<int>(amount));
    }
    case Op::kShr: {
      i128 amount = val(1);
      if (amount < 0) return 0;
      if (amount > 127) amount = 127;
      if (arg_types[0].kind == TypeKind::kSigned)
        return wrap128(result, static_cast<u128>(val(0) >> static_cast<int>(amount)));
      return wrap128(result, bits(0) >> static_cast<int>(amount));
    }
    case Op::kCmp: return wrap128(result, val(0) < val(1) ? 1 : 0);
    default:
      throw Error(fmt::format("operator '{}' has no integer semantics", op_name(op)));
  }
}

std::int64_t parse_int_literal(DataType t, const std::string& literal) {
  std::string_view sv = literal;
  if (!sv.empty() && sv[0] == '+') sv.remove_prefix(1);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
  if (ec == std::errc() && p == sv.data() + sv.size()) return wrap_to(t, v);
  std::uint64_t u = 0;
  auto [pu, ecu] = std::from_chars(sv.data(), sv.data() + sv.size(), u);
  if (ecu == std::errc() && pu == sv.data() + sv.size())
    return wrap_to(t, static_cast<std::int64_t>(u));
  throw Error("bad integer literal '" + literal + "'");
}

std::vector<std::int64_t> evaluate(const Program& p, std::span<const std::int64_t> inputs) {
  std::vector<std::int64_t> env(p.values.size(), 0);
  std::size_t next_input = 0;
  for (ValueId i = 0; i < p.values.size(); ++i) {
    const Value& v = p.values[i];
    if (!v.dtype.is_int()) throw Error("cannot evaluate float value '" + v.name + "'");
    if (v.op == Op::kInput) {
      if (next_input >= inputs.size()) throw Error("not enough input values");
      env[i] = wrap_to(v.dtype, inputs[next_input++]);
      continue;
    }
    if (v.op == Op::kConst) {
      env[i] = parse_int_literal(v.dtype, *v.literal);
      continue;
    }
    std::vector<std::int64_t> args;
    std::vector<DataType> types;
    for (ValueId a : v.operands) {
      args.push_back(env[a]);
      types.push_back(p.values[a].dtype);
    }
    env[i] = apply_int_op(v.op, v.dtype, args, types);
  }
  std::vector<std::int64_t> out;
  for (ValueId o : p.outputs) out.push_back(env[o]);
  return out;
}

}  // namespace eqsched
