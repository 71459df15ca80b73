#include <gtest/gtest.h>

#include <map>
#include <queue>
#include <random>
#include <set>

#include "dtdb/generators.hpp"
#include "dtdb/search.hpp"

using namespace dtdb;

namespace {

GroundedTask generated(const std::string& spec) { return parse_task(generate_task(parse_generator_spec(spec))); }

struct OracleResult {
  std::size_t reachable = 0;
  long long cost = -1;
};

// Textbook Dijkstra over the full reachable graph, states keyed by value.
OracleResult dijkstra(const GroundedTask& task) {
  using Key = std::pair<std::vector<std::uint32_t>, std::vector<double>>;
  std::map<Key, long long> dist;
  std::priority_queue<std::pair<long long, Key>, std::vector<std::pair<long long, Key>>, std::greater<>> pq;
  const State s0 = initial_state(task);
  dist[{s0.atoms, s0.numeric}] = 0;
  pq.push({0, {s0.atoms, s0.numeric}});
  OracleResult r;
  while (!pq.empty()) {
    auto [d, key] = pq.top();
    pq.pop();
    if (dist[key] < d) continue;
    const State s{key.first, key.second};
    if (is_goal(task, s) && (r.cost < 0 || d < r.cost)) r.cost = d;
    for (std::size_t a = 0; a < task.actions.size(); ++a) {
      if (!is_applicable(task, s, a)) continue;
      const State n = succ(task, s, a);
      const long long nd = d + static_cast<long long>(task.actions[a].cost);
      Key nk{n.atoms, n.numeric};
      auto it = dist.find(nk);
      if (it == dist.end() || nd < it->second) {
        dist[nk] = nd;
        pq.push({nd, nk});
      }
    }
  }
  r.reachable = dist.size();
  return r;
}

SearchResult run(const GroundedTask& task, BackendKind kind, SearchLimits limits = {}, unsigned w = 32) {
  const StateModel model(task, w);
  BackendConfig config;
  config.word_bits = w;
  auto backend = make_backend(kind, model, config);
  return ucs(task, *backend, limits);
}

void expect_plan_replays(const GroundedTask& task, const SearchResult& r) {
  State s = initial_state(task);
  std::uint64_t cost = 0;
  for (auto a : r.plan) {
    ASSERT_TRUE(is_applicable(task, s, a));
    s = succ(task, s, a);
    cost += task.actions[a].cost;
  }
  EXPECT_TRUE(is_goal(task, s));
  EXPECT_EQ(cost, r.plan_cost);
}

}  // namespace

TEST(Ucs, CounterThree) {
  const GroundedTask t = generated("counter:3");
  const auto r = run(t, BackendKind::DtdbStable);
  EXPECT_EQ(r.status, SearchStatus::Solved);
  EXPECT_EQ(r.plan_cost, 7u);
  EXPECT_EQ(r.unique_states, 8u);
  EXPECT_EQ(plan_names(t, r).front(), "inc_0");
  expect_plan_replays(t, r);
}

TEST(Ucs, UnsatisfiableChainIsExhausted) {
  GroundedTask t = generated("chain:3");
  t.goal.pos = {0, 2};  // cell_0 and cell_2 are never both true
  const auto r = run(t, BackendKind::HashsetSparse);
  EXPECT_EQ(r.status, SearchStatus::Exhausted);
  EXPECT_EQ(r.unique_states, 3u);
  EXPECT_EQ(r.expanded, 3u);
  EXPECT_TRUE(r.plan.empty());
}

TEST(Ucs, MatchesDijkstraOracleOnGenerators) {
  for (const char* spec : {"chain:1", "chain:2", "chain:40", "counter:1", "counter:6", "gripper:1", "gripper:2",
                           "gripper:3", "numeric-counter:5", "paired:3"}) {
    const GroundedTask t = generated(spec);
    const OracleResult o = dijkstra(t);
    const auto r = run(t, BackendKind::DtdbHashId);
    if (o.cost < 0) {
      EXPECT_EQ(r.status, SearchStatus::Exhausted) << spec;
      EXPECT_EQ(r.unique_states, o.reachable) << spec;
    } else {
      ASSERT_EQ(r.status, SearchStatus::Solved) << spec;
      EXPECT_EQ(static_cast<long long>(r.plan_cost), o.cost) << spec;
      expect_plan_replays(t, r);
    }
  }
}

TEST(Ucs, OptimalUnderMixedCosts) {
  // Random action costs (including 0) on gripper: UCS must still be optimal.
  std::mt19937_64 rng(23);
  for (int round = 0; round < 10; ++round) {
    GroundedTask t = generated("gripper:2");
    for (auto& a : t.actions) a.cost = rng() % 4;
    const OracleResult o = dijkstra(t);
    const auto r = run(t, BackendKind::HashsetPacked);
    ASSERT_EQ(r.status, SearchStatus::Solved);
    EXPECT_EQ(static_cast<long long>(r.plan_cost), o.cost);
    expect_plan_replays(t, r);
  }
}

TEST(Ucs, BackendsReportIdenticalCounters) {
  const GroundedTask t = generated("counter:10");
  std::vector<SearchResult> results;
  for (BackendKind k : kAllBackends)
    for (unsigned w : {32u, 64u}) results.push_back(run(t, k, {}, w));
  for (const auto& r : results) {
    EXPECT_EQ(r.status, SearchStatus::Solved);
    EXPECT_EQ(r.unique_states, 1024u);
    EXPECT_EQ(r.plan_cost, 1023u);
    EXPECT_EQ(r.expanded, results[0].expanded);
    EXPECT_EQ(r.generated, results[0].generated);
    EXPECT_EQ(r.peak_open_size, results[0].peak_open_size);
    EXPECT_EQ(r.plan, results[0].plan);
  }
}

TEST(Ucs, ExpansionLimit) {
  const GroundedTask t = generated("counter:10");
  const auto r = run(t, BackendKind::DtdbStable, {.max_expansions = 1});
  EXPECT_EQ(r.status, SearchStatus::Limit);
  EXPECT_EQ(r.expanded, 1u);
}

TEST(Ucs, ByteLimit) {
  const GroundedTask t = generated("counter:12");
  const auto r = run(t, BackendKind::HashsetUnpacked, {.max_bytes = 4096});
  EXPECT_EQ(r.status, SearchStatus::Limit);
  EXPECT_LT(r.unique_states, 4096u);
}

TEST(Ucs, ParentLinksReproduceSuccessors) {
  // Every state reached by the search is a successor of its recorded parent;
  // checked through the plan of each goal in a family of goals on chain.
  const GroundedTask base = generated("chain:12");
  for (std::uint32_t target = 0; target < 12; ++target) {
    GroundedTask t = base;
    t.goal.pos = {target};
    const auto r = run(t, BackendKind::DtdbStable);
    ASSERT_EQ(r.status, SearchStatus::Solved);
    EXPECT_EQ(r.plan_cost, target);
    expect_plan_replays(t, r);
  }
}
