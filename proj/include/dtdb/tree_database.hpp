#pragma once

// Dynamic tree databases over w-bit words.
//
// A sequence z of length k is stored as a perfectly balanced binary tree with
// floor((k+1)/2) leaves. Leaf i holds (z[2i], z[2i+1]); for odd k the last
// element sits directly in the right field of its parent. Nodes are
// hash-consed in a single store regardless of role, so a pair can be a leaf in
// one tree and an inner node in another. Whether a field is an element or a
// child index is decided only by the shape, which is a function of k.
//
// Two node stores are supported:
//   Stable  node ids are positions in an append-only array (never change).
//   HashId  node ids are slots in the hash table; on resize every tree is
//           rebuilt depth-first into a larger table and root refs rewritten.
// The root store maps (root ref, k) to the state index and is stable in both.

#include <algorithm>
#include <bit>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dtdb/errors.hpp"
#include "dtdb/hash.hpp"
#include "dtdb/indexed_sets.hpp"

namespace dtdb {

template <std::unsigned_integral Word>
struct Node {
  Word left = 0;
  Word right = 0;
  friend bool operator==(const Node&, const Node&) = default;
};

template <std::unsigned_integral Word>
std::uint64_t hash_value(const Node<Word>& n, std::uint64_t seed) noexcept {
  if constexpr (sizeof(Word) <= 4)
    return hash_u64((static_cast<std::uint64_t>(n.left) << 32) | n.right, seed);
  else
    return hash_pair(n.left, n.right, seed);
}

/// Root ref is a node id for k >= 2, the element itself for k == 1, 0 for k == 0.
template <std::unsigned_integral Word>
struct RootEntry {
  Word root = 0;
  Word length = 0;
  friend bool operator==(const RootEntry&, const RootEntry&) = default;
};

template <std::unsigned_integral Word>
std::uint64_t hash_value(const RootEntry<Word>& e, std::uint64_t seed) noexcept {
  if constexpr (sizeof(Word) <= 4)
    return hash_u64((static_cast<std::uint64_t>(e.length) << 32) | e.root, seed);
  else
    return hash_pair(e.root, e.length, seed);
}

constexpr std::uint64_t root_leaf_count(std::uint64_t length) noexcept { return (length + 1) / 2; }

struct ShapeSplit {
  std::uint64_t left;
  std::uint64_t right;
  friend bool operator==(const ShapeSplit&, const ShapeSplit&) = default;
};

/// Leaf counts of the two children of a node with `leaves` leaves.
/// The left side always gets the largest power of two strictly below `leaves`.
inline ShapeSplit shape_split(std::uint64_t leaves) {
  if (leaves < 2) throw ContractViolation("shape_split: leaf count must be >= 2");
  const std::uint64_t left = std::bit_floor(leaves - 1);
  return {left, leaves - left};
}

enum class TreeVariant { Stable, HashId };

struct TreeConfig {
  double growth = kDefaultGrowth;
  std::uint64_t seed = kDefaultSeed;
};

struct TreeStats {
  std::size_t node_count = 0;
  std::size_t node_capacity = 0;
  std::size_t root_count = 0;
  std::size_t numeric_count = 0;
  std::size_t allocated_bytes = 0;
  std::size_t payload_bytes = 0;
  std::size_t peak_allocated_bytes = 0;
  std::size_t relocations = 0;
};

/// Interns binary64 values by bit pattern. Ids share the tree's element domain.
template <std::unsigned_integral Word>
class NumericLeafStore {
 public:
  static constexpr std::uint64_t kCanonicalNaN = 0x7FF8000000000000ULL;

  explicit NumericLeafStore(double growth = kDefaultGrowth, std::uint64_t seed = kDefaultSeed)
      : values_(growth, seed) {}

  Word intern(double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    const std::uint64_t exponent = (bits >> 52) & 0x7FF;
    if (exponent == 0x7FF && bits != kCanonicalNaN)
      throw ValidationError("numeric leaf: only finite values and the canonical quiet NaN are accepted");
    return values_.insert(bits).first;
  }

  bool contains(std::uint64_t id) const noexcept { return id < values_.size(); }

  double value(std::uint64_t id) const {
    if (!contains(id)) throw CorruptionError("numeric leaf: unknown leaf id " + std::to_string(id));
    return std::bit_cast<double>(values_.key_of(id));
  }

  std::size_t size() const noexcept { return values_.size(); }
  std::size_t allocated_bytes() const noexcept { return values_.allocated_bytes(); }
  std::size_t payload_bytes() const noexcept { return values_.payload_bytes(); }

 private:
  StableIndexedSet<std::uint64_t, Word> values_;
};

template <std::unsigned_integral Word>
class TreeDatabase {
 public:
  using word_type = Word;
  using NodeType = Node<Word>;

  struct InsertResult {
    Word index;
    bool inserted;
  };

  explicit TreeDatabase(TreeVariant variant = TreeVariant::Stable, TreeConfig config = {});

  /// Stores the sequence if new. Returns its stable state index.
  InsertResult insert(std::span<const Word> sequence);

  std::vector<Word> lookup(std::size_t index) const;
  void lookup_into(std::size_t index, std::vector<Word>& out) const;

  std::size_t size() const noexcept { return roots_.size(); }
  TreeVariant variant() const noexcept { return variant_; }
  const TreeConfig& config() const noexcept { return config_; }

  const RootEntry<Word>& root(std::size_t index) const { return roots_.key_of(index); }
  const NodeType& node(std::size_t id) const;
  std::size_t node_count() const noexcept;
  std::size_t relocations() const noexcept { return relocations_; }

  NumericLeafStore<Word>& numeric() noexcept { return numeric_; }
  const NumericLeafStore<Word>& numeric() const noexcept { return numeric_; }

  TreeStats stats() const;
  std::size_t allocated_bytes() const noexcept;

  /// HashId only: rebuild every tree into a table grown by the growth factor.
  /// Runs automatically when a node insert would exceed the 7/8 load bound.
  void relocate();

 private:
  using StableNodes = StableIndexedSet<NodeType, Word>;
  using HashIdNodes = HashIdSet<NodeType>;

  StableNodes& stable_nodes() noexcept { return *std::get_if<StableNodes>(&nodes_); }
  HashIdNodes& hashid_nodes() noexcept { return *std::get_if<HashIdNodes>(&nodes_); }

  std::optional<Word> build(std::span<const Word> elements, std::uint64_t leaves);
  std::optional<Word> intern(const NodeType& n);
  void decode(Word ref, std::uint64_t leaves, std::uint64_t count, std::vector<Word>& out) const;
  static std::optional<Word> copy_tree(const HashIdNodes& from, HashIdNodes& to, Word ref,
                                       std::uint64_t leaves, std::uint64_t count);
  void note_peak(std::size_t bytes) noexcept { peak_bytes_ = std::max(peak_bytes_, bytes); }

  TreeVariant variant_;
  TreeConfig config_;
  std::variant<StableNodes, HashIdNodes> nodes_;
  StableIndexedSet<RootEntry<Word>, Word> roots_;
  NumericLeafStore<Word> numeric_;
  std::size_t peak_bytes_ = 0;
  std::size_t relocations_ = 0;
};

extern template class TreeDatabase<std::uint32_t>;
extern template class TreeDatabase<std::uint64_t>;

}  // namespace dtdb
