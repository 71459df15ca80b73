#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dtdb/errors.hpp"
#include "dtdb/flat_table.hpp"
#include "dtdb/hash.hpp"

namespace dtdb {

inline std::uint64_t hash_value(std::uint32_t v, std::uint64_t seed) noexcept { return hash_u64(v, seed); }
inline std::uint64_t hash_value(std::uint64_t v, std::uint64_t seed) noexcept { return hash_u64(v, seed); }

/// Hashes any key type that has a hash_value(key, seed) overload.
struct SeededHash {
  std::uint64_t seed = kDefaultSeed;
  template <class Key>
  std::uint64_t operator()(const Key& key) const noexcept {
    return hash_value(key, seed);
  }
};

/// Next dynamic-array capacity for growth factor delta.
inline std::size_t grown_array_capacity(std::size_t capacity, double growth) {
  const auto target = static_cast<std::size_t>(std::ceil(static_cast<double>(capacity) * growth));
  return std::max(capacity + 1, target);
}

/// Indexed hash set whose indices are insertion positions and never change.
///
/// Keys live in a dense array (index = insertion order); a FlatTable of
/// Index-typed positions provides the key -> index direction.
template <class Key, class Index = std::uint32_t>
class StableIndexedSet {
 public:
  explicit StableIndexedSet(double growth = kDefaultGrowth, std::uint64_t seed = kDefaultSeed,
                            std::size_t initial_capacity = kInitialCapacity)
      : index_(initial_capacity, growth), hash_{seed}, growth_(growth) {
    keys_.reserve(initial_capacity);
    payload_capacity_ = initial_capacity;
  }

  static constexpr std::size_t max_size() noexcept {
    if constexpr (sizeof(Index) >= sizeof(std::size_t)) return std::numeric_limits<std::size_t>::max();
    else return std::size_t{std::numeric_limits<Index>::max()} + 1;
  }

  /// Returns (index, inserted). First-time keys get index == previous size().
  std::pair<Index, bool> insert(const Key& key) {
    const std::uint64_t h = hash_(key);
    auto r = index_.probe(h, [&](Index i) { return keys_[i] == key; });
    if (r.found) return {index_.slot(r.slot), false};
    if (keys_.size() >= max_size()) throw CapacityError("indexed set: index space exhausted");
    const auto next = static_cast<Index>(keys_.size());
    if (index_.at_max_load()) {
      index_.rebuild(index_.next_capacity(), [&](Index i) { return hash_(keys_[i]); });
      r = index_.probe(h, [](Index) { return false; });
    }
    index_.emplace_at(r.slot, h, next);
    if (keys_.size() == payload_capacity_) {
      payload_capacity_ = grown_array_capacity(payload_capacity_, growth_);
      keys_.reserve(payload_capacity_);
    }
    keys_.push_back(key);
    return {next, true};
  }

  std::optional<Index> find(const Key& key) const {
    const auto slot = index_.find(hash_(key), [&](Index i) { return keys_[i] == key; });
    if (!slot) return std::nullopt;
    return index_.slot(*slot);
  }

  const Key& key_of(std::size_t index) const {
    if (index >= keys_.size())
      throw ContractViolation("indexed set: index " + std::to_string(index) + " out of range");
    return keys_[index];
  }

  std::size_t size() const noexcept { return keys_.size(); }
  bool empty() const noexcept { return keys_.empty(); }
  std::span<const Key> keys() const noexcept { return keys_; }
  std::size_t payload_capacity() const noexcept { return payload_capacity_; }
  const FlatTable<Index>& index_table() const noexcept { return index_; }
  std::uint64_t seed() const noexcept { return hash_.seed; }

  /// Lets the caller edit stored keys in place (indices stay put), then
  /// rebuilds the key -> index table. The edit must keep keys distinct.
  template <class Edit>
  void rewrite_keys(Edit&& edit) {
    for (std::size_t i = 0; i < keys_.size(); ++i) edit(i, keys_[i]);
    index_.reset(index_.capacity());
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      const std::uint64_t h = hash_(keys_[i]);
      const auto r = index_.probe(h, [&](Index j) { return keys_[j] == keys_[i]; });
      if (r.found) throw ContractViolation("indexed set: rewrite produced duplicate keys");
      index_.emplace_at(r.slot, h, static_cast<Index>(i));
    }
  }

  std::size_t allocated_bytes() const noexcept {
    return payload_capacity_ * sizeof(Key) + index_.allocated_bytes();
  }
  std::size_t payload_bytes() const noexcept { return keys_.size() * sizeof(Key); }

 private:
  std::vector<Key> keys_;
  std::size_t payload_capacity_ = 0;
  FlatTable<Index> index_;
  SeededHash hash_;
  double growth_;
};

/// Indexed hash set whose identifier is the key's slot in the table.
///
/// Ids are stable only between resizes. try_insert() refuses to grow, so an
/// owner holding ids elsewhere (the tree database) can run its own relocation
/// and rewrite them; insert() grows with a plain rehash for standalone use.
template <class Key>
class HashIdSet {
 public:
  explicit HashIdSet(std::size_t capacity = kInitialCapacity, double growth = kDefaultGrowth,
                     std::uint64_t seed = kDefaultSeed,
                     std::size_t max_capacity = std::numeric_limits<std::size_t>::max())
      : table_(capacity, growth, max_capacity), hash_{seed} {}

  /// Empty set with this set's growth, seed and limit, at the given capacity.
  HashIdSet empty_like(std::size_t capacity) const {
    return HashIdSet(capacity, table_.growth(), hash_.seed, table_.max_capacity());
  }

  /// nullopt means: key absent and the table is at its 7/8 bound.
  std::optional<std::pair<std::size_t, bool>> try_insert(const Key& key) {
    return table_.try_insert(hash_(key), [&](const Key& k) { return k == key; }, key);
  }

  /// Inserts with the default relocation (rehash every key; ids may change).
  std::pair<std::size_t, bool> insert(const Key& key) {
    return insert(key, [](HashIdSet& self) { self.rehash_grow(); });
  }

  /// Inserts; when the table is full, calls relocate(*this), which must leave
  /// the set with room for one more key, then retries.
  template <class Relocate>
  std::pair<std::size_t, bool> insert(const Key& key, Relocate&& relocate) {
    if (auto r = try_insert(key)) return *r;
    relocate(*this);
    auto r = try_insert(key);
    if (!r) throw ContractViolation("hash-id set: relocation left no room");
    return *r;
  }

  /// Grows by one step, rehashing keys in place of their old slots.
  void rehash_grow() {
    table_.rebuild(table_.next_capacity(), [&](const Key& k) { return hash_(k); });
  }

  std::optional<std::size_t> find(const Key& key) const {
    return table_.find(hash_(key), [&](const Key& k) { return k == key; });
  }

  bool contains_id(std::size_t id) const noexcept { return id < table_.capacity() && table_.occupied(id); }

  const Key& key_of(std::size_t id) const {
    if (!contains_id(id))
      throw ContractViolation("hash-id set: id " + std::to_string(id) + " is not an occupied slot");
    return table_.slot(id);
  }

  std::size_t size() const noexcept { return table_.size(); }
  std::size_t capacity() const noexcept { return table_.capacity(); }
  std::size_t next_capacity() const { return table_.next_capacity(); }
  bool at_max_load() const noexcept { return table_.at_max_load(); }
  const FlatTable<Key>& table() const noexcept { return table_; }
  std::uint64_t seed() const noexcept { return hash_.seed; }
  std::size_t allocated_bytes() const noexcept { return table_.allocated_bytes(); }
  std::size_t payload_bytes() const noexcept { return table_.size() * sizeof(Key); }

 private:
  FlatTable<Key> table_;
  SeededHash hash_;
};

}  // namespace dtdb
