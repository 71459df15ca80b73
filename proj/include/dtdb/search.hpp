#pragma once

// Uniform-cost search (A* with the blind heuristic) over any state set.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "dtdb/backends.hpp"
#include "dtdb/task.hpp"

namespace dtdb {

enum class SearchStatus { Solved, Exhausted, Limit };
std::string_view status_name(SearchStatus s) noexcept;

struct SearchLimits {
  std::uint64_t max_expansions = std::numeric_limits<std::uint64_t>::max();
  std::size_t max_bytes = std::numeric_limits<std::size_t>::max();  // on the state set's rep_bytes
};

struct SearchResult {
  SearchStatus status = SearchStatus::Exhausted;
  std::vector<std::uint32_t> plan;  // action ids
  std::uint64_t plan_cost = 0;
  std::uint64_t expanded = 0;
  std::uint64_t generated = 0;  // successors produced, duplicates included
  std::uint64_t unique_states = 0;
  std::uint64_t peak_open_size = 0;
};

/// Expands states in nondecreasing g, FIFO among equal g, goal test on
/// expansion. Duplicate detection goes through backend.insert only.
SearchResult ucs(const GroundedTask& task, StateSetBackend& backend, const SearchLimits& limits = {});

std::vector<std::string> plan_names(const GroundedTask& task, const SearchResult& result);

}  // namespace dtdb
