#include "dtdb/search.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace dtdb {

namespace {

constexpr std::uint64_t kNoParent = std::numeric_limits<std::uint64_t>::max();

// Per-state bookkeeping kept beside the state set, indexed by state index.
struct SearchNode {
  std::uint64_t g;
  std::uint64_t parent;
  std::uint32_t action;
  bool closed;
};

}  // namespace

std::string_view status_name(SearchStatus s) noexcept {
  switch (s) {
    case SearchStatus::Solved: return "SOLVED";
    case SearchStatus::Exhausted: return "EXHAUSTED";
    case SearchStatus::Limit: return "LIMIT";
  }
  return "?";
}

SearchResult ucs(const GroundedTask& task, StateSetBackend& backend, const SearchLimits& limits) {
  SearchResult result;
  std::vector<SearchNode> nodes;
  std::map<std::uint64_t, std::deque<std::uint64_t>> open;
  std::uint64_t open_size = 0;

  const auto push = [&](std::uint64_t g, std::uint64_t index) {
    open[g].push_back(index);
    result.peak_open_size = std::max(result.peak_open_size, ++open_size);
  };
  const auto finish = [&](SearchStatus status) {
    result.status = status;
    result.unique_states = backend.size();
    return result;
  };

  const auto root = backend.insert(initial_state(task));
  nodes.push_back({0, kNoParent, 0, false});
  push(0, root.index);
  if (backend.rep_bytes() > limits.max_bytes) return finish(SearchStatus::Limit);

  while (!open.empty()) {
    auto bucket = open.begin();
    const std::uint64_t g = bucket->first;
    const std::uint64_t index = bucket->second.front();
    bucket->second.pop_front();
    --open_size;
    if (bucket->second.empty()) open.erase(bucket);
    SearchNode& node = nodes[index];
    if (node.closed || node.g < g) continue;  // stale entry

    const State s = backend.lookup(index);
    if (is_goal(task, s)) {
      for (std::uint64_t i = index; nodes[i].parent != kNoParent; i = nodes[i].parent)
        result.plan.push_back(nodes[i].action);
      std::reverse(result.plan.begin(), result.plan.end());
      result.plan_cost = g;
      return finish(SearchStatus::Solved);
    }
    if (result.expanded >= limits.max_expansions) return finish(SearchStatus::Limit);
    nodes[index].closed = true;
    ++result.expanded;

    for (std::uint32_t a : applicable(task, s)) {
      const State next = succ(task, s, a);
      ++result.generated;
      const std::uint64_t cost = g + task.actions[a].cost;
      const auto [child, is_new] = backend.insert(next);
      if (is_new) {
        nodes.push_back({cost, index, a, false});
        push(cost, child);
      } else if (!nodes[child].closed && cost < nodes[child].g) {
        nodes[child] = {cost, index, a, false};
        push(cost, child);
      }
    }
    if (backend.rep_bytes() > limits.max_bytes) return finish(SearchStatus::Limit);
  }
  return finish(SearchStatus::Exhausted);
}

std::vector<std::string> plan_names(const GroundedTask& task, const SearchResult& result) {
  std::vector<std::string> out;
  out.reserve(result.plan.size());
  for (std::uint32_t a : result.plan) out.push_back(task.actions.at(a).name);
  return out;
}

}  // namespace dtdb
