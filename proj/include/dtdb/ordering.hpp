#pragma once

// Variable orderings for tree-database state encodings.
//
// Variables use one index space: FDR variables 0..F-1, then numeric
// variables F..F+N-1. Only FDR variables are packed into bins (words);
// numeric variables always follow the bins in task order.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "dtdb/encoding.hpp"
#include "dtdb/task.hpp"

namespace dtdb {

/// Sorted variables written by the action's add/del lists and numeric effects.
std::vector<std::uint32_t> effect_variables(const FdrCompilation& fdr, const Action& action);

class AffinityMatrix {
 public:
  explicit AffinityMatrix(std::size_t n = 0) : n_(n), cells_(n * n, 0) {}
  std::size_t size() const noexcept { return n_; }
  std::uint32_t operator()(std::size_t a, std::size_t b) const { return cells_[a * n_ + b]; }
  void bump(std::size_t a, std::size_t b) {
    ++cells_[a * n_ + b];
    ++cells_[b * n_ + a];
  }
  std::uint64_t row_sum(std::size_t a) const;

 private:
  std::size_t n_;
  std::vector<std::uint32_t> cells_;
};

/// aff(v, v') = number of actions whose effects touch both v and v' (v != v').
AffinityMatrix affinity(const GroundedTask& task, const FdrCompilation& fdr);

struct VariableOrdering {
  std::vector<std::vector<std::uint32_t>> bins;  // FDR variables per word
  std::vector<std::uint32_t> position;           // pi: variable -> 0..|V|-1

  /// Variables in pi order.
  std::vector<std::uint32_t> sequence() const;
};

enum class OrderingKind { Input, Affinity };
std::string_view ordering_name(OrderingKind k) noexcept;
OrderingKind parse_ordering(std::string_view name);

/// Next-fit packing in variable order, bins of capacity_bits.
VariableOrdering input_ordering(const GroundedTask& task, const FdrCompilation& fdr, unsigned capacity_bits);

/// Greedy affinity bin packing. Seeds each bin with the unpacked variable of
/// largest total affinity, then adds the fitting variable with the largest
/// affinity to the bin until nothing fits. Ties: larger domain, lower index.
VariableOrdering greedy_pack(const GroundedTask& task, const FdrCompilation& fdr, unsigned capacity_bits);

VariableOrdering make_ordering(OrderingKind kind, const GroundedTask& task, const FdrCompilation& fdr,
                               unsigned capacity_bits);

/// Sum over actions of the number of distinct floor(pi(v)/2) over eff(a).
std::uint64_t objective(const VariableOrdering& ordering, const GroundedTask& task, const FdrCompilation& fdr);

/// Word layout realising the ordering's bins.
FdrLayout layout_for(const VariableOrdering& ordering, const FdrCompilation& fdr, unsigned word_bits);

}  // namespace dtdb
