#include <gtest/gtest.h>

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <string>

#include "dtdb/generators.hpp"
#include "dtdb/task.hpp"

using namespace dtdb;

namespace {

GroundedTask generated(const std::string& spec) { return parse_task(generate_task(parse_generator_spec(spec))); }

struct BfsResult {
  std::size_t states = 0;
  long long plan_length = -1;  // -1: no goal reachable
};

// Plain breadth-first search over std::set-represented states, computed
// independently of the search module.
BfsResult bfs(const GroundedTask& task) {
  using Key = std::pair<std::set<std::uint32_t>, std::vector<double>>;
  std::map<Key, long long> dist;
  std::deque<State> queue;
  const State s0 = initial_state(task);
  dist[{std::set<std::uint32_t>(s0.atoms.begin(), s0.atoms.end()), s0.numeric}] = 0;
  queue.push_back(s0);
  BfsResult r;
  while (!queue.empty()) {
    const State s = queue.front();
    queue.pop_front();
    const Key key{std::set<std::uint32_t>(s.atoms.begin(), s.atoms.end()), s.numeric};
    const long long d = dist[key];
    if (r.plan_length < 0 && is_goal(task, s)) r.plan_length = d;
    for (const Action& a : task.actions) {
      bool ok = true;
      for (auto p : a.pre_pos) ok = ok && key.first.count(p);
      for (auto p : a.pre_neg) ok = ok && !key.first.count(p);
      for (const auto& c : a.npre) ok = ok && compare(s.numeric[c.var], c.cmp, c.value);
      if (!ok) continue;
      std::set<std::uint32_t> next = key.first;
      for (auto p : a.del) next.erase(p);
      for (auto p : a.add) next.insert(p);
      std::vector<double> num = s.numeric;
      for (const auto& e : a.neff) {
        if (e.op == NumericOp::Assign) num[e.var] = e.value;
        if (e.op == NumericOp::Increase) num[e.var] += e.value;
        if (e.op == NumericOp::Decrease) num[e.var] -= e.value;
      }
      Key nk{next, num};
      if (dist.emplace(nk, d + 1).second)
        queue.push_back(State{std::vector<std::uint32_t>(next.begin(), next.end()), num});
    }
  }
  r.states = dist.size();
  return r;
}

const char* kMinimal = R"(gtf 1
atom p
init
goal +p
action make 1
add p
end
)";

}  // namespace

TEST(Parser, MinimalTask) {
  const GroundedTask t = parse_task(kMinimal);
  EXPECT_EQ(t.atom_count(), 1u);
  ASSERT_EQ(t.actions.size(), 1u);
  EXPECT_EQ(t.actions[0].name, "make");
  EXPECT_EQ(t.actions[0].add, (std::vector<std::uint32_t>{0}));
  EXPECT_EQ(t.goal.pos, (std::vector<std::uint32_t>{0}));
}

TEST(Parser, CommentsAndFullSyntax) {
  const GroundedTask t = parse_task(R"(# leading comment
gtf 1
atom a b   # two atoms
atom c
mutex a b
numvar n 0.8
numvar m 5.7
init a
goal +c -b ; n >= 5 m < 10
action go 3
pre +a -c
npre n <= 0.8
add b
del a
neff n += 1 n := 2.5 m -= 0.5
end
)");
  EXPECT_EQ(t.atom_count(), 3u);
  EXPECT_EQ(t.mutex_groups, (std::vector<std::vector<std::uint32_t>>{{0, 1}}));
  ASSERT_EQ(t.numeric.size(), 2u);
  EXPECT_EQ(t.numeric[0].initial, 0.8);
  EXPECT_EQ(t.goal.numeric.size(), 2u);
  EXPECT_EQ(t.goal.numeric[1].cmp, Comparison::Less);
  const Action& a = t.actions[0];
  EXPECT_EQ(a.cost, 3u);
  EXPECT_EQ(a.pre_neg, (std::vector<std::uint32_t>{2}));
  ASSERT_EQ(a.neff.size(), 3u);
  EXPECT_EQ(a.neff[1].op, NumericOp::Assign);

  const State s1 = succ(t, initial_state(t), 0);
  EXPECT_EQ(s1.atoms, (std::vector<std::uint32_t>{1}));
  EXPECT_EQ(s1.numeric[0], 2.5);  // += then := in order
  EXPECT_EQ(s1.numeric[1], 5.2);
}

TEST(Parser, ErrorsCarryLocation) {
  try {
    parse_task("gtf 1\natom p\ninit q\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 6u);
  }
  EXPECT_THROW(parse_task("atom p\n"), ParseError);
  EXPECT_THROW(parse_task("gtf 2\n"), ParseError);
  EXPECT_THROW(parse_task("gtf 1\natom p\natom p\n"), ParseError);
  EXPECT_THROW(parse_task("gtf 1\nnumvar n 1\nnumvar n 2\n"), ParseError);
  EXPECT_THROW(parse_task("gtf 1\natom p\naction a 1\nend\naction a 1\nend\n"), ParseError);
  EXPECT_THROW(parse_task("gtf 1\natom p\naction a 1\nadd p\n"), ParseError);
  EXPECT_THROW(parse_task("gtf 1\natom p\naction a 1\nadd p\ndel p\nend\n"), ParseError);
  EXPECT_THROW(parse_task("gtf 1\natom p\naction a -1\nend\n"), ParseError);
  EXPECT_THROW(parse_task("gtf 1\nnumvar n x\n"), ParseError);
  EXPECT_THROW(parse_task("gtf 1\nnumvar n inf\n"), ParseError);
  EXPECT_THROW(parse_task("gtf 1\nnumvar n 1\ngoal ; n >> 2\n"), ParseError);
  EXPECT_THROW(parse_task("gtf 1\nbogus\n"), ParseError);
}

TEST(Parser, OverlappingMutexGroupsNamesBoth) {
  try {
    parse_task("gtf 1\natom p q r\nmutex p q\nmutex r q\n");
    FAIL();
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("group 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("group 0"), std::string::npos) << msg;
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(Parser, MutexViolationInInit) {
  EXPECT_THROW(parse_task("gtf 1\natom p q\nmutex p q\ninit p q\n"), ParseError);
}

TEST(Parser, PrintParseRoundTrip) {
  for (const char* spec : {"chain:5", "counter:4", "gripper:3", "numeric-counter:3", "paired:4"}) {
    const GroundedTask t = generated(spec);
    const std::string text = print_task(t);
    EXPECT_EQ(parse_task(text), t) << spec;
    EXPECT_EQ(print_task(parse_task(text)), text) << spec;
  }
  const GroundedTask t = parse_task("gtf 1\nnumvar n 0.1\nnumvar m -0\ngoal ; n = 0.30000000000000004\n");
  EXPECT_EQ(parse_task(print_task(t)), t);
  EXPECT_TRUE(std::signbit(parse_task(print_task(t)).numeric[1].initial));
}

TEST(Generators, Deterministic) {
  EXPECT_EQ(generate_task({"gripper", 4}), generate_task({"gripper", 4}));
  EXPECT_THROW(generate_task({"chain", 0}), ValidationError);
  EXPECT_THROW(generate_task({"spiral", 3}), ValidationError);
  EXPECT_THROW(parse_generator_spec("counter"), ValidationError);
  EXPECT_THROW(parse_generator_spec("counter:-1"), ValidationError);
  EXPECT_EQ(parse_generator_spec("counter:10").param, 10u);
}

TEST(Generators, CounterThreeMatchesBfs) {
  const auto r = bfs(generated("counter:3"));
  EXPECT_EQ(r.states, 8u);
  EXPECT_EQ(r.plan_length, 7);
}

TEST(Generators, ChainFiveMatchesBfs) {
  const auto r = bfs(generated("chain:5"));
  EXPECT_EQ(r.states, 5u);
  EXPECT_EQ(r.plan_length, 4);
}

TEST(Generators, GripperTwoMatchesBfs) {
  const auto r = bfs(generated("gripper:2"));
  EXPECT_EQ(r.plan_length, 5);
}

TEST(Generators, ClosedFormStateCounts) {
  for (std::uint64_t b = 1; b <= 8; ++b) {
    EXPECT_EQ(bfs(generated("counter:" + std::to_string(b))).states, std::size_t{1} << b);
    const auto n = bfs(generated("numeric-counter:" + std::to_string(b)));
    EXPECT_EQ(n.states, std::size_t{1} << b);
    EXPECT_EQ(n.plan_length, (1 << b) - 1);
  }
  for (std::uint64_t l = 1; l <= 30; ++l) EXPECT_EQ(bfs(generated("chain:" + std::to_string(l))).states, l);
  const auto p = bfs(generated("paired:3"));
  EXPECT_EQ(p.states, 27u);
  EXPECT_EQ(p.plan_length, -1);
}

TEST(Semantics, CounterInitHasOnlyFirstIncrement) {
  const GroundedTask t = generated("counter:5");
  const auto app = applicable(t, initial_state(t));
  ASSERT_EQ(app.size(), 1u);
  EXPECT_EQ(t.actions[app[0]].name, "inc_0");
}

TEST(Semantics, ChainMoveAdvancesToken) {
  const GroundedTask t = generated("chain:6");
  State s = initial_state(t);
  for (std::uint32_t i = 0; i + 1 < 6; ++i) {
    const auto app = applicable(t, s);
    ASSERT_EQ(app.size(), 1u);
    EXPECT_EQ(t.actions[app[0]].name, "move_" + std::to_string(i));
    s = succ(t, s, app[0]);
    EXPECT_EQ(s.atoms, (std::vector<std::uint32_t>{i + 1}));
  }
  EXPECT_TRUE(is_goal(t, s));
  EXPECT_THROW(succ(t, initial_state(t), 3), ContractViolation);
}

TEST(Semantics, NegativeAndNumericPreconditions) {
  const GroundedTask t = parse_task(R"(gtf 1
atom p q
numvar n 5
init p
goal +q
action blocked 1
pre -p
add q
end
action boundary 1
npre n >= 5
add q
end
action strict 1
npre n > 5
add q
end
action bump 1
neff n += 1
end
)");
  const State s0 = initial_state(t);
  EXPECT_EQ(applicable(t, s0), (std::vector<std::uint32_t>{1, 3}));
  const State s1 = succ(t, s0, 3);
  EXPECT_EQ(s1.numeric[0], 6.0);
  EXPECT_EQ(applicable(t, s1), (std::vector<std::uint32_t>{1, 2, 3}));
  State f{{}, {0.8}};
  const GroundedTask inc = parse_task("gtf 1\nnumvar n 0.8\naction a 1\nneff n += 1\nend\n");
  EXPECT_EQ(succ(inc, f, 0).numeric[0], 1.8);
}

TEST(Semantics, SuccMatchesSetOracleOnRandomActions) {
  std::mt19937_64 rng(17);
  GroundedTask t;
  for (int i = 0; i < 40; ++i) t.atoms.push_back("a" + std::to_string(i));
  for (int round = 0; round < 2000; ++round) {
    std::set<std::uint32_t> state, add, del;
    for (std::uint32_t p = 0; p < 40; ++p) {
      if (rng() % 3 == 0) state.insert(p);
      const auto r = rng() % 4;
      if (r == 0) add.insert(p);
      else if (r == 1) del.insert(p);
    }
    Action a;
    a.name = "r";
    a.add.assign(add.begin(), add.end());
    a.del.assign(del.begin(), del.end());
    t.actions = {a};
    const State s{std::vector<std::uint32_t>(state.begin(), state.end()), {}};
    std::set<std::uint32_t> expected = state;
    for (auto p : del) expected.erase(p);
    for (auto p : add) expected.insert(p);
    EXPECT_EQ(succ(t, s, 0).atoms, std::vector<std::uint32_t>(expected.begin(), expected.end()));
  }
}

TEST(Semantics, GeneratorsRespectMutexGroups) {
  for (const char* spec : {"gripper:3", "paired:3"}) {
    const GroundedTask t = generated(spec);
    std::set<std::vector<std::uint32_t>> seen;
    std::deque<State> queue{initial_state(t)};
    seen.insert(queue.front().atoms);
    while (!queue.empty()) {
      const State s = queue.front();
      queue.pop_front();
      EXPECT_NO_THROW(check_mutex(t, s));
      for (auto a : applicable(t, s)) {
        State n = succ(t, s, a);
        if (seen.insert(n.atoms).second) queue.push_back(std::move(n));
      }
    }
  }
}

TEST(Fdr, GroupsAndSingletons) {
  const GroundedTask t = parse_task(R"(gtf 1
atom p0 p1 p2 p3 p4 p5
mutex p0 p1 p2
mutex p3 p4
)");
  const FdrCompilation fdr(t);
  ASSERT_EQ(fdr.size(), 3u);
  EXPECT_EQ(fdr.domains(), (std::vector<std::uint32_t>{4, 3, 2}));
  EXPECT_EQ(fdr.var_of(4), 1u);
  EXPECT_EQ(fdr.value_of(4), 1u);
  const std::vector<std::uint32_t> atoms{1, 5};
  const auto values = fdr.values(atoms);
  EXPECT_EQ(values, (std::vector<std::uint32_t>{1, 2, 0}));  // (p1, none, p5)
  EXPECT_EQ(fdr.atoms(values), atoms);
  EXPECT_THROW(fdr.values(std::vector<std::uint32_t>{0, 2}), ValidationError);
  EXPECT_EQ(bitwidth(4) + bitwidth(3) + bitwidth(2), 5u);
}

TEST(Fdr, VariablesOrderedBySmallestAtom) {
  const GroundedTask t = parse_task("gtf 1\natom a b c d\nmutex b d\n");
  const FdrCompilation fdr(t);
  ASSERT_EQ(fdr.size(), 3u);
  EXPECT_EQ(fdr.variable(0).atoms, (std::vector<std::uint32_t>{0}));
  EXPECT_EQ(fdr.variable(1).atoms, (std::vector<std::uint32_t>{1, 3}));
  EXPECT_EQ(fdr.variable(2).atoms, (std::vector<std::uint32_t>{2}));
}

TEST(Fdr, Bitwidth) {
  EXPECT_EQ(bitwidth(1), 0u);
  EXPECT_EQ(bitwidth(2), 1u);
  EXPECT_EQ(bitwidth(3), 2u);
  EXPECT_EQ(bitwidth(4), 2u);
  EXPECT_EQ(bitwidth(5), 3u);
}
