#pragma once

// Grounded planning tasks: propositional atoms, optional mutex groups, numeric
// variables, and actions with literal/numeric preconditions and effects.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtdb/errors.hpp"

namespace dtdb {

/// Malformed task text. Line and column are 1-based.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : ValidationError(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

enum class Comparison { Less, LessEqual, Equal, GreaterEqual, Greater };
enum class NumericOp { Assign, Increase, Decrease };

struct NumericCondition {
  std::uint32_t var = 0;
  Comparison cmp = Comparison::Equal;
  double value = 0.0;
  friend bool operator==(const NumericCondition&, const NumericCondition&) = default;
};

struct NumericEffect {
  std::uint32_t var = 0;
  NumericOp op = NumericOp::Assign;
  double value = 0.0;
  friend bool operator==(const NumericEffect&, const NumericEffect&) = default;
};

struct Action {
  std::string name;
  std::uint64_t cost = 1;
  std::vector<std::uint32_t> pre_pos;  // sorted, unique
  std::vector<std::uint32_t> pre_neg;  // sorted, unique
  std::vector<NumericCondition> npre;
  std::vector<std::uint32_t> add;  // sorted, unique
  std::vector<std::uint32_t> del;  // sorted, unique
  std::vector<NumericEffect> neff;  // applied in order
  friend bool operator==(const Action&, const Action&) = default;
};

struct NumericVariable {
  std::string name;
  double initial = 0.0;
  friend bool operator==(const NumericVariable&, const NumericVariable&) = default;
};

struct Goal {
  std::vector<std::uint32_t> pos;
  std::vector<std::uint32_t> neg;
  std::vector<NumericCondition> numeric;
  friend bool operator==(const Goal&, const Goal&) = default;
};

/// True atoms (ascending) plus one value per numeric variable.
struct State {
  std::vector<std::uint32_t> atoms;
  std::vector<double> numeric;
  friend bool operator==(const State&, const State&) = default;
};

struct GroundedTask {
  std::vector<std::string> atoms;
  std::vector<std::vector<std::uint32_t>> mutex_groups;  // disjoint, each sorted
  std::vector<NumericVariable> numeric;
  std::vector<std::uint32_t> init;  // sorted
  Goal goal;
  std::vector<Action> actions;
  friend bool operator==(const GroundedTask&, const GroundedTask&) = default;

  std::size_t atom_count() const noexcept { return atoms.size(); }
  std::size_t numeric_count() const noexcept { return numeric.size(); }
};

GroundedTask parse_task(std::string_view text);
std::string print_task(const GroundedTask& task);

/// Throws ValidationError if any group has more than one true atom.
void check_mutex(const GroundedTask& task, const State& s);

bool compare(double lhs, Comparison cmp, double rhs) noexcept;

State initial_state(const GroundedTask& task);
bool is_goal(const GroundedTask& task, const State& s);
bool is_applicable(const GroundedTask& task, const State& s, std::size_t action);

/// Applicable action ids in declaration order.
std::vector<std::uint32_t> applicable(const GroundedTask& task, const State& s);

/// (s minus del) union add, then numeric effects in declaration order.
State succ(const GroundedTask& task, const State& s, std::size_t action);

/// Finite-domain view of the propositional part. One variable per mutex group
/// plus a binary {p, none} variable per ungrouped atom, ordered by smallest
/// atom index. Value atoms.size() means none.
class FdrCompilation {
 public:
  struct Variable {
    std::vector<std::uint32_t> atoms;
    std::uint32_t domain() const noexcept { return static_cast<std::uint32_t>(atoms.size() + 1); }
    std::uint32_t none() const noexcept { return static_cast<std::uint32_t>(atoms.size()); }
  };

  explicit FdrCompilation(const GroundedTask& task);

  std::size_t size() const noexcept { return vars_.size(); }
  const Variable& variable(std::size_t i) const { return vars_.at(i); }
  std::vector<std::uint32_t> domains() const;
  std::uint32_t var_of(std::uint32_t atom) const { return var_of_.at(atom); }
  std::uint32_t value_of(std::uint32_t atom) const { return value_of_.at(atom); }

  std::vector<std::uint32_t> values(std::span<const std::uint32_t> atoms) const;
  void values_into(std::span<const std::uint32_t> atoms, std::span<std::uint32_t> out) const;
  std::vector<std::uint32_t> atoms(std::span<const std::uint32_t> values) const;

 private:
  std::vector<Variable> vars_;
  std::vector<std::uint32_t> var_of_;
  std::vector<std::uint32_t> value_of_;
};

/// Number of bits for values 0..m-1 (0 when m == 1).
std::uint32_t bitwidth(std::uint64_t m) noexcept;

}  // namespace dtdb
