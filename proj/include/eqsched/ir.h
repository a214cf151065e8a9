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

#ifndef EQSCHED_IR_H_
#define EQSCHED_IR_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eqsched {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  enum class Kind { kSyntax, kArity, kUndefined, kType, kDuplicate };

  ParseError(Kind kind, int line, int column, const std::string& message);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  Kind kind_;
  int line_;
  int column_;
};

enum class TypeKind { kSigned, kUnsigned, kFloat };

struct DataType {
  TypeKind kind = TypeKind::kSigned;
  int bits = 32;

  bool is_int() const { return kind != TypeKind::kFloat; }
  bool operator==(const DataType&) const = default;
  auto operator<=>(const DataType&) const = default;

  // Smallest and largest representable integer (integer kinds only).
  __int128 min_value() const;
  __int128 max_value() const;

  std::string str() const;
  static std::optional<DataType> parse(std::string_view token);
};

enum class Op {
  kAdd, kSub, kNeg, kMul, kDiv, kShl, kShr, kAnd, kOr, kXor, kCmp,
  kExp, kLog, kSqrt, kRecip, kConst, kInput,
};

std::string_view op_name(Op op);
std::optional<Op> op_from_name(std::string_view name);
int op_arity(Op op);
bool op_is_float_only(Op op);
// Operators whose result modulo 2^w depends only on operands modulo 2^w.
bool op_is_ring(Op op);

// Width an integer result needs before any declared truncation.
int natural_width(Op op, std::span<const DataType> operands);

using ValueId = std::size_t;

struct Value {
  std::string name;
  Op op = Op::kInput;
  std::vector<ValueId> operands;
  DataType dtype;
  std::optional<std::string> literal;  // const only

  bool operator==(const Value&) const = default;
};

struct Program {
  std::string name;
  std::vector<Value> values;
  std::vector<ValueId> outputs;

  std::vector<ValueId> inputs() const;
  std::size_t op_count() const;  // values that are neither inputs nor consts
  std::optional<ValueId> find(std::string_view name) const;
  bool operator==(const Program&) const = default;
};

Program parse_program(std::string_view text, std::string name = "kernel");
std::string print_program(const Program& p);
std::string program_to_dot(const Program& p);

// Integer semantics shared by the program evaluator and the netlist
// simulator. Values are carried sign- or zero-extended in an int64.
std::int64_t wrap_to(DataType t, std::int64_t raw);
std::int64_t apply_int_op(Op op, DataType result, std::span<const std::int64_t> args,
                          std::span<const DataType> arg_types);
std::int64_t parse_int_literal(DataType t, const std::string& literal);

// Evaluates an integer program; inputs are given in declaration order.
std::vector<std::int64_t> evaluate(const Program& p, std::span<const std::int64_t> inputs);

}  // namespace eqsched

#endif  // EQSCHED_IR_H_
