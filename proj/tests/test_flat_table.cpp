#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "dtdb/flat_table.hpp"
#include "dtdb/indexed_sets.hpp"

using namespace dtdb;

namespace {

// Naive membership oracle: a plain list scanned linearly.
bool list_contains(const std::vector<std::uint64_t>& list, std::uint64_t key) {
  return std::find(list.begin(), list.end(), key) != list.end();
}

template <class Key>
void expect_control_bytes_consistent(const HashIdSet<Key>& set) {
  const auto& t = set.table();
  std::size_t occupied = 0;
  for (std::size_t i = 0; i < t.capacity(); ++i) {
    if (!t.occupied(i)) {
      EXPECT_EQ(t.control(i), ctrl::kEmpty);
      continue;
    }
    ++occupied;
    const std::uint64_t h = SeededHash{set.seed()}(t.slot(i));
    EXPECT_EQ(t.control(i), ctrl::fingerprint(h));
    EXPECT_EQ(t.control(i) & 0x80, 0);
  }
  EXPECT_EQ(occupied, set.size());
}

}  // namespace

TEST(FlatTable, MaxLoadIsSevenEighths) {
  EXPECT_EQ(max_load(8), 7u);
  EXPECT_EQ(max_load(16), 14u);
  EXPECT_EQ(max_load(1024), 896u);
}

TEST(FlatTable, GrownCapacityStaysPowerOfTwo) {
  EXPECT_EQ(grown_capacity(16, 2.0), 32u);
  EXPECT_EQ(grown_capacity(16, 1.5), 32u);
  EXPECT_EQ(grown_capacity(16, 3.0), 64u);
  EXPECT_EQ(grown_capacity(16, 4.0), 64u);
}

TEST(FlatTable, RejectsBadCapacity) {
  EXPECT_THROW(FlatTable<std::uint32_t>(12), ContractViolation);
  EXPECT_THROW(FlatTable<std::uint32_t>(16, 1.0), ContractViolation);
}

TEST(HashIdSet, LookupInEmptyTableIsAbsent) {
  HashIdSet<std::uint64_t> set;
  EXPECT_FALSE(set.find(42).has_value());
  EXPECT_FALSE(set.find(0).has_value());
}

TEST(HashIdSet, ReinsertIsIdempotent) {
  HashIdSet<std::uint64_t> set;
  const auto [id, inserted] = set.insert(7);
  EXPECT_TRUE(inserted);
  const auto [id2, inserted2] = set.insert(7);
  EXPECT_EQ(id2, id);
  EXPECT_FALSE(inserted2);
  EXPECT_EQ(set.key_of(id), 7u);
  EXPECT_EQ(set.size(), 1u);
}

TEST(HashIdSet, GrowsWhenSevenEighthsWouldBeExceeded) {
  HashIdSet<std::uint64_t> set;
  ASSERT_EQ(set.capacity(), 16u);
  for (std::uint64_t k = 0; k < 14; ++k) set.insert(k * 1000 + 1);
  EXPECT_EQ(set.capacity(), 16u);
  EXPECT_EQ(set.size(), 14u);
  set.insert(999999);
  EXPECT_EQ(set.capacity(), 32u);
  for (std::uint64_t k = 0; k < 14; ++k) EXPECT_TRUE(set.find(k * 1000 + 1).has_value());
}

TEST(HashIdSet, KeyOfEmptySlotIsContractViolation) {
  HashIdSet<std::uint64_t> set;
  const auto [id, _] = set.insert(5);
  const std::size_t other = (id + 1) % set.capacity();
  EXPECT_THROW(set.key_of(other), ContractViolation);
  EXPECT_THROW(set.key_of(set.capacity() + 3), ContractViolation);
}

TEST(HashIdSet, TableFullBeyondMaxCapacity) {
  HashIdSet<std::uint64_t> set(16, 2.0, kDefaultSeed, 16);
  for (std::uint64_t k = 0; k < 14; ++k) set.insert(k);
  EXPECT_THROW(set.insert(100), CapacityError);
  EXPECT_FALSE(set.try_insert(100).has_value());
  EXPECT_TRUE(set.try_insert(3).has_value());
}

TEST(HashIdSet, TenThousandRandomKeysMatchListOracle) {
  std::mt19937_64 rng(1);
  HashIdSet<std::uint64_t> set;
  std::vector<std::uint64_t> oracle;
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t key = rng();
    const bool fresh = !list_contains(oracle, key);
    const auto [id, inserted] = set.insert(key);
    EXPECT_EQ(inserted, fresh);
    if (fresh) oracle.push_back(key);
    EXPECT_LE(set.size(), max_load(set.capacity()));
  }
  EXPECT_EQ(set.size(), oracle.size());
  for (std::uint64_t key : oracle) {
    const auto id = set.find(key);
    ASSERT_TRUE(id.has_value());
    EXPECT_EQ(set.key_of(*id), key);
  }
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t probe = rng();
    EXPECT_EQ(set.find(probe).has_value(), list_contains(oracle, probe));
  }
  expect_control_bytes_consistent(set);
}

TEST(HashIdSet, FingerprintCollisionsDoNotAlias) {
  // Find two keys whose hashes agree on the 7 fingerprint bits and on the home
  // slot of a 16-slot table, so they probe the same run.
  const std::uint64_t seed = kDefaultSeed;
  std::mt19937_64 rng(7);
  const std::uint64_t a = rng();
  const std::uint64_t ha = hash_value(a, seed);
  std::uint64_t b = 0;
  for (;;) {
    b = rng();
    const std::uint64_t hb = hash_value(b, seed);
    if (b != a && ctrl::fingerprint(hb) == ctrl::fingerprint(ha) && (hb & 15) == (ha & 15)) break;
  }
  HashIdSet<std::uint64_t> set(16, 2.0, seed);
  const auto ida = set.insert(a).first;
  EXPECT_FALSE(set.find(b).has_value());
  const auto idb = set.insert(b).first;
  EXPECT_NE(ida, idb);
  EXPECT_EQ(set.table().control(ida), set.table().control(idb));
  EXPECT_EQ(set.key_of(*set.find(a)), a);
  EXPECT_EQ(set.key_of(*set.find(b)), b);
}

TEST(HashIdSet, ResizePreservesMembership) {
  std::mt19937_64 rng(3);
  HashIdSet<std::uint64_t> set;
  std::vector<std::uint64_t> oracle;
  const std::size_t start = set.capacity();
  while (set.capacity() == start) {
    const std::uint64_t key = rng() % 1000;
    const auto [id, inserted] = set.insert(key);
    EXPECT_EQ(inserted, !list_contains(oracle, key));
    if (inserted) oracle.push_back(key);
    EXPECT_EQ(set.key_of(id), key);
  }
  EXPECT_EQ(set.size(), oracle.size());
  for (std::uint64_t key : oracle) EXPECT_TRUE(set.find(key).has_value());
  for (std::uint64_t key = 0; key < 1000; ++key) EXPECT_EQ(set.find(key).has_value(), list_contains(oracle, key));
}

TEST(HashIdSet, IdsStableBetweenResizes) {
  HashIdSet<std::uint64_t> set;
  const auto first = set.insert(11).first;
  for (std::uint64_t k = 0; k < 12; ++k) set.insert(100 + k);
  ASSERT_EQ(set.capacity(), 16u);
  EXPECT_EQ(set.find(11), first);
  EXPECT_EQ(set.key_of(first), 11u);
}

TEST(FlatTable, GroupedProbeAgreesWithScalar) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 50; ++round) {
    HashIdSet<std::uint64_t> set(16, 2.0, rng());
    const int n = 1 + static_cast<int>(rng() % 3000);
    std::vector<std::uint64_t> keys;
    for (int i = 0; i < n; ++i) {
      keys.push_back(rng() % 5000);
      set.insert(keys.back());
    }
    const auto& t = set.table();
    const SeededHash h{set.seed()};
    for (int i = 0; i < 500; ++i) {
      const std::uint64_t key = rng() % 6000;
      const auto match = [&](std::uint64_t k) { return k == key; };
      const ProbeResult s = t.probe_scalar(h(key), match);
      const ProbeResult g = t.probe_grouped(h(key), match);
      EXPECT_EQ(s.found, g.found);
      EXPECT_EQ(s.slot, g.slot);
    }
  }
}

TEST(StableIndexedSet, InsertionOrderIndices) {
  StableIndexedSet<std::uint64_t> set;
  EXPECT_EQ(set.insert(10), (std::pair<std::uint32_t, bool>{0, true}));
  EXPECT_EQ(set.insert(20), (std::pair<std::uint32_t, bool>{1, true}));
  EXPECT_EQ(set.insert(10), (std::pair<std::uint32_t, bool>{0, false}));
  EXPECT_EQ(set.key_of(0), 10u);
  EXPECT_EQ(set.key_of(1), 20u);
  EXPECT_THROW(set.key_of(2), ContractViolation);
}

TEST(StableIndexedSet, MatchesAppendIfAbsentListOracle) {
  std::mt19937_64 rng(5);
  StableIndexedSet<std::uint64_t> set;
  std::vector<std::uint64_t> oracle;
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t key = rng() % 4000;
    const auto it = std::find(oracle.begin(), oracle.end(), key);
    const bool fresh = it == oracle.end();
    const std::size_t expected = fresh ? oracle.size() : static_cast<std::size_t>(it - oracle.begin());
    if (fresh) oracle.push_back(key);
    const auto [index, inserted] = set.insert(key);
    EXPECT_EQ(index, expected);
    EXPECT_EQ(inserted, fresh);
  }
  ASSERT_EQ(set.size(), oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) EXPECT_EQ(set.key_of(i), oracle[i]);
  EXPECT_LE(set.index_table().size(), max_load(set.index_table().capacity()));
}

TEST(StableIndexedSet, PayloadGrowsByFactor) {
  StableIndexedSet<std::uint64_t> set(2.0);
  EXPECT_EQ(set.payload_capacity(), 16u);
  for (std::uint64_t k = 0; k < 16; ++k) set.insert(k);
  EXPECT_EQ(set.payload_capacity(), 16u);
  set.insert(16);
  EXPECT_EQ(set.payload_capacity(), 32u);
  EXPECT_EQ(set.allocated_bytes(), 32 * sizeof(std::uint64_t) + set.index_table().capacity() * 5);
}

TEST(StableIndexedSet, RewriteKeysRebuildsIndex) {
  StableIndexedSet<std::uint64_t> set;
  for (std::uint64_t k = 0; k < 100; ++k) set.insert(k);
  set.rewrite_keys([](std::size_t, std::uint64_t& key) { key += 1000; });
  for (std::uint64_t k = 0; k < 100; ++k) {
    EXPECT_EQ(set.find(k + 1000), static_cast<std::uint32_t>(k));
    EXPECT_FALSE(set.find(k).has_value());
  }
  EXPECT_THROW(set.rewrite_keys([](std::size_t, std::uint64_t& key) { key = 1; }), ContractViolation);
}

TEST(StableIndexedSet, IndexSpaceExhaustion) {
  StableIndexedSet<std::uint64_t, std::uint8_t> set;
  for (std::uint64_t k = 0; k < 256; ++k) EXPECT_EQ(set.insert(k).first, static_cast<std::uint8_t>(k));
  EXPECT_THROW(set.insert(999), CapacityError);
  EXPECT_FALSE(set.insert(17).second);
}
