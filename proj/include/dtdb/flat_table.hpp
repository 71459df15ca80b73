#pragma once

// Open-addressing table with a parallel control-byte array.
//
// Each occupied slot's control byte holds the top 7 bits of the key's hash
// (high bit clear); empty slots hold kEmpty (high bit set). Lookups probe
// linearly from hash & (capacity - 1), compare control bytes first and only
// call the full key comparison on a fingerprint match. The table never hashes
// keys itself: callers pass hash values in, plus a rehash callable on growth.
// That lets the indexed sets store bare indices in the slots and hash the
// referenced payload instead.

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#if defined(__SSE2__)
#include <emmintrin.h>
#endif

#include "dtdb/errors.hpp"

namespace dtdb {

namespace ctrl {
inline constexpr std::uint8_t kEmpty = 0x80;
// Reserved for tombstones. Deletion is not supported, so it is never written.
inline constexpr std::uint8_t kDeleted = 0xFE;

constexpr std::uint8_t fingerprint(std::uint64_t hash) noexcept {
  return static_cast<std::uint8_t>(hash >> 57);
}
}  // namespace ctrl

inline constexpr std::size_t kInitialCapacity = 16;
inline constexpr double kDefaultGrowth = 2.0;

/// Largest element count a table of this capacity may hold: floor(7/8 * capacity).
constexpr std::size_t max_load(std::size_t capacity) noexcept {
  return capacity / 8 * 7 + capacity % 8 * 7 / 8;
}

/// Capacity after one growth step: the smallest power of two >= ceil(capacity * growth),
/// and at least double the current one.
inline std::size_t grown_capacity(std::size_t capacity, double growth) {
  const double target = std::ceil(static_cast<double>(capacity) * growth);
  const auto wanted = std::max<std::size_t>(capacity + 1, static_cast<std::size_t>(target));
  return std::bit_ceil(wanted);
}

struct ProbeResult {
  std::size_t slot;
  bool found;
};

template <class Slot>
class FlatTable {
 public:
  explicit FlatTable(std::size_t capacity = kInitialCapacity, double growth = kDefaultGrowth,
                     std::size_t max_capacity = std::numeric_limits<std::size_t>::max())
      : growth_(growth), max_capacity_(max_capacity) {
    if (!std::has_single_bit(capacity) || capacity < 8)
      throw ContractViolation("flat table capacity must be a power of two >= 8");
    if (!(growth > 1.0)) throw ContractViolation("growth factor must exceed 1");
    if (capacity > max_capacity_) throw CapacityError("table full");
    slots_.resize(capacity);
    ctrl_.assign(capacity, ctrl::kEmpty);
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  std::size_t capacity() const noexcept { return ctrl_.size(); }
  double growth() const noexcept { return growth_; }
  std::size_t max_capacity() const noexcept { return max_capacity_; }

  bool occupied(std::size_t i) const noexcept { return ctrl_[i] != ctrl::kEmpty; }
  std::uint8_t control(std::size_t i) const noexcept { return ctrl_[i]; }
  const Slot& slot(std::size_t i) const noexcept { return slots_[i]; }
  Slot& slot(std::size_t i) noexcept { return slots_[i]; }

  /// True when adding one more element would exceed the 7/8 load bound.
  bool at_max_load() const noexcept { return size_ + 1 > max_load(capacity()); }

  /// Capacity of the next growth step; throws "table full" past max_capacity.
  std::size_t next_capacity() const {
    const std::size_t next = grown_capacity(capacity(), growth_);
    if (next > max_capacity_ || next <= capacity()) throw CapacityError("table full");
    return next;
  }

  /// Bytes under the accounting model: one slot payload plus one control byte per slot.
  std::size_t allocated_bytes() const noexcept { return capacity() * (sizeof(Slot) + 1); }

  /// Returns the matching slot, or the first empty slot on the probe path.
  template <class Match>
  ProbeResult probe(std::uint64_t hash, Match&& match) const {
#if defined(__SSE2__)
    return probe_grouped(hash, match);
#else
    return probe_scalar(hash, match);
#endif
  }

  /// Byte-at-a-time probe. Always available; probe() must agree with it.
  template <class Match>
  ProbeResult probe_scalar(std::uint64_t hash, Match&& match) const {
    const std::size_t mask = capacity() - 1;
    const std::uint8_t fp = ctrl::fingerprint(hash);
    std::size_t i = hash & mask;
    for (std::size_t n = 0; n < capacity(); ++n, i = (i + 1) & mask) {
      const std::uint8_t c = ctrl_[i];
      if (c == fp && match(slots_[i])) return {i, true};
      if (c == ctrl::kEmpty) return {i, false};
    }
    assert(false && "flat table has no empty slot");
    return {capacity(), false};
  }

  /// Probe that compares 16 control bytes at a time where SSE2 exists.
  template <class Match>
  ProbeResult probe_grouped(std::uint64_t hash, Match&& match) const {
#if defined(__SSE2__)
    const std::size_t cap = capacity();
    const std::size_t mask = cap - 1;
    const std::uint8_t fp = ctrl::fingerprint(hash);
    const __m128i want = _mm_set1_epi8(static_cast<char>(fp));
    const __m128i empty = _mm_set1_epi8(static_cast<char>(ctrl::kEmpty));
    std::size_t i = hash & mask;
    for (std::size_t scanned = 0; scanned < cap;) {
      if (i + 16 <= cap) {
        const __m128i group = _mm_loadu_si128(reinterpret_cast<const __m128i*>(ctrl_.data() + i));
        const auto hits = static_cast<std::uint32_t>(_mm_movemask_epi8(_mm_cmpeq_epi8(group, want)));
        const auto holes = static_cast<std::uint32_t>(_mm_movemask_epi8(_mm_cmpeq_epi8(group, empty)));
        // Only matches before the first empty byte are on the probe path.
        const std::uint32_t before_hole = holes != 0 ? (holes & (0u - holes)) - 1 : 0xFFFFu;
        for (std::uint32_t m = hits & before_hole; m != 0; m &= m - 1) {
          const std::size_t at = i + static_cast<std::size_t>(std::countr_zero(m));
          if (match(slots_[at])) return {at, true};
        }
        if (holes != 0) return {i + static_cast<std::size_t>(std::countr_zero(holes)), false};
        i = (i + 16) & mask;
        scanned += 16;
      } else {
        const std::uint8_t c = ctrl_[i];
        if (c == fp && match(slots_[i])) return {i, true};
        if (c == ctrl::kEmpty) return {i, false};
        i = (i + 1) & mask;
        ++scanned;
      }
    }
    assert(false && "flat table has no empty slot");
    return {cap, false};
#else
    return probe_scalar(hash, match);
#endif
  }

  template <class Match>
  std::optional<std::size_t> find(std::uint64_t hash, Match&& match) const {
    const ProbeResult r = probe(hash, match);
    if (r.found) return r.slot;
    return std::nullopt;
  }

  /// Writes a new element into an empty slot found by probe(). No load check.
  void emplace_at(std::size_t i, std::uint64_t hash, Slot value) {
    assert(ctrl_[i] == ctrl::kEmpty);
    slots_[i] = std::move(value);
    ctrl_[i] = ctrl::fingerprint(hash);
    ++size_;
  }

  /// Inserts unless present; never grows. Returns nullopt when the element is
  /// absent and the table is at its 7/8 bound.
  template <class Match>
  std::optional<std::pair<std::size_t, bool>> try_insert(std::uint64_t hash, Match&& match,
                                                          const Slot& value) {
    const ProbeResult r = probe(hash, match);
    if (r.found) return std::pair{r.slot, false};
    if (at_max_load()) return std::nullopt;
    emplace_at(r.slot, hash, value);
    return std::pair{r.slot, true};
  }

  /// Inserts unless present, growing by the growth factor first if needed.
  /// rehash(slot) must return the hash of a stored slot.
  template <class Match, class Rehash>
  std::pair<std::size_t, bool> insert(std::uint64_t hash, Match&& match, const Slot& value,
                                      Rehash&& rehash) {
    ProbeResult r = probe(hash, match);
    if (r.found) return {r.slot, false};
    if (at_max_load()) {
      rebuild(next_capacity(), rehash);
      r = probe(hash, [](const Slot&) { return false; });
    }
    emplace_at(r.slot, hash, value);
    return {r.slot, true};
  }

  /// Moves every element into a table of new_capacity, recomputing positions.
  template <class Rehash>
  void rebuild(std::size_t new_capacity, Rehash&& rehash) {
    if (!std::has_single_bit(new_capacity) || new_capacity < 8)
      throw ContractViolation("flat table capacity must be a power of two >= 8");
    if (new_capacity > max_capacity_) throw CapacityError("table full");
    if (max_load(new_capacity) < size_) throw ContractViolation("rebuild target too small");
    std::vector<Slot> old_slots(new_capacity);
    std::vector<std::uint8_t> old_ctrl(new_capacity, ctrl::kEmpty);
    old_slots.swap(slots_);
    old_ctrl.swap(ctrl_);
    const std::size_t count = size_;
    size_ = 0;
    for (std::size_t i = 0; i < old_ctrl.size(); ++i) {
      if (old_ctrl[i] == ctrl::kEmpty) continue;
      const std::uint64_t h = rehash(old_slots[i]);
      const ProbeResult r = probe(h, [](const Slot&) { return false; });
      emplace_at(r.slot, h, std::move(old_slots[i]));
    }
    assert(size_ == count);
    (void)count;
  }

  /// Empties the table and resets it to the given capacity.
  void reset(std::size_t capacity) {
    if (!std::has_single_bit(capacity) || capacity < 8)
      throw ContractViolation("flat table capacity must be a power of two >= 8");
    if (capacity > max_capacity_) throw CapacityError("table full");
    slots_.assign(capacity, Slot{});
    ctrl_.assign(capacity, ctrl::kEmpty);
    size_ = 0;
  }

 private:
  std::vector<Slot> slots_;
  std::vector<std::uint8_t> ctrl_;
  std::size_t size_ = 0;
  double growth_;
  std::size_t max_capacity_;
};

}  // namespace dtdb
