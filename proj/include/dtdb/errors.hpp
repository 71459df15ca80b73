#pragma once

#include <stdexcept>
#include <string>

namespace dtdb {

/// A caller broke an operation's precondition (bad index, wrong variant, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Input data was rejected (out-of-domain value, unsorted atoms, bad NaN, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An index space or table capacity was exhausted.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Stored data could not be decoded (unknown leaf id, truncated record).
class CorruptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dtdb
