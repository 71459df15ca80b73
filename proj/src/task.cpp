#include "dtdb/task.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <iterator>
#include <optional>
#include <unordered_map>
#include <unordered_set>

namespace dtdb {

namespace {

struct Token {
  std::string_view text;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == ';') {
      out.push_back({line.substr(i, 1), i + 1});
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '#' &&
           line[i] != ';')
      ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

void sort_unique(std::vector<std::uint32_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

const char* comparison_text(Comparison c) {
  switch (c) {
    case Comparison::Less: return "<";
    case Comparison::LessEqual: return "<=";
    case Comparison::Equal: return "=";
    case Comparison::GreaterEqual: return ">=";
    case Comparison::Greater: return ">";
  }
  return "?";
}

const char* numeric_op_text(NumericOp op) {
  switch (op) {
    case NumericOp::Assign: return ":=";
    case NumericOp::Increase: return "+=";
    case NumericOp::Decrease: return "-=";
  }
  return "?";
}

class Parser {
 public:
  GroundedTask run(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t nl = text.find('\n', pos);
      const std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
      ++line_no;
      line_ = line_no;
      handle(tokenize(line));
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    if (!header_) fail(1, 1, "missing 'gtf 1' header");
    if (in_action_) fail(action_line_, 1, "action '" + task_.actions.back().name + "' lacks 'end'");
    State s0{task_.init, {}};
    try {
      check_mutex(task_, s0);
    } catch (const ValidationError& e) {
      fail(init_line_ ? init_line_ : 1, 1, e.what());
    }
    return std::move(task_);
  }

 private:
  [[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& msg) const {
    throw ParseError(line, column, msg);
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const { fail(line_, t.column, msg); }

  void expect_args(const std::vector<Token>& t, std::size_t n) const {
    if (t.size() != n + 1)
      fail(t[0], "'" + std::string(t[0].text) + "' expects " + std::to_string(n) + " argument(s)");
  }

  std::uint32_t atom(const Token& t) const {
    const auto it = atom_index_.find(std::string(t.text));
    if (it == atom_index_.end()) fail(t, "unknown atom '" + std::string(t.text) + "'");
    return it->second;
  }

  std::uint32_t numvar(const Token& t) const {
    const auto it = numvar_index_.find(std::string(t.text));
    if (it == numvar_index_.end()) fail(t, "unknown numeric variable '" + std::string(t.text) + "'");
    return it->second;
  }

  double number(const Token& t) const {
    double x = 0;
    const auto* end = t.text.data() + t.text.size();
    const auto r = std::from_chars(t.text.data(), end, x);
    if (r.ec != std::errc{} || r.ptr != end) fail(t, "malformed number '" + std::string(t.text) + "'");
    if (!std::isfinite(x)) fail(t, "numeric constants must be finite");
    return x;
  }

  std::uint64_t cost(const Token& t) const {
    std::uint64_t x = 0;
    const auto* end = t.text.data() + t.text.size();
    const auto r = std::from_chars(t.text.data(), end, x);
    if (r.ec != std::errc{} || r.ptr != end) fail(t, "action cost must be a nonnegative integer");
    return x;
  }

  void check_name(const Token& t) const {
    const char c = t.text.front();
    if (c == '+' || c == '-' || t.text == ";") fail(t, "names may not start with '+' or '-'");
  }

  Comparison comparison(const Token& t) const {
    if (t.text == "<") return Comparison::Less;
    if (t.text == "<=") return Comparison::LessEqual;
    if (t.text == "=") return Comparison::Equal;
    if (t.text == ">=") return Comparison::GreaterEqual;
    if (t.text == ">") return Comparison::Greater;
    fail(t, "expected one of < <= = >= >");
  }

  NumericOp numeric_op(const Token& t) const {
    if (t.text == ":=") return NumericOp::Assign;
    if (t.text == "+=") return NumericOp::Increase;
    if (t.text == "-=") return NumericOp::Decrease;
    fail(t, "expected one of := += -=");
  }

  template <class T, class Make>
  void triples(const std::vector<Token>& t, std::size_t from, std::vector<T>& out, Make make) const {
    if ((t.size() - from) % 3 != 0) fail(t.back(), "expected <numvar> <op> <number> triples");
    for (std::size_t i = from; i < t.size(); i += 3) out.push_back(make(t[i], t[i + 1], t[i + 2]));
  }

  void literals(const std::vector<Token>& t, std::size_t from, std::size_t to, std::vector<std::uint32_t>& pos,
                std::vector<std::uint32_t>& neg) const {
    for (std::size_t i = from; i < to; ++i) {
      std::string_view name = t[i].text;
      bool positive = true;
      if (name.front() == '+' || name.front() == '-') {
        positive = name.front() == '+';
        name.remove_prefix(1);
      }
      if (name.empty()) fail(t[i], "empty literal");
      const auto it = atom_index_.find(std::string(name));
      if (it == atom_index_.end()) fail(t[i], "unknown atom '" + std::string(name) + "'");
      (positive ? pos : neg).push_back(it->second);
    }
    sort_unique(pos);
    sort_unique(neg);
  }

  void handle(const std::vector<Token>& t) {
    if (t.empty()) return;
    const std::string_view kw = t[0].text;
    if (!header_) {
      if (kw != "gtf" || t.size() != 2 || t[1].text != "1") fail(t[0], "expected 'gtf 1' header");
      header_ = true;
      return;
    }
    if (in_action_) return handle_action_line(t);

    if (kw == "atom") {
      if (t.size() < 2) fail(t[0], "'atom' expects a name");
      for (std::size_t i = 1; i < t.size(); ++i) {
        check_name(t[i]);
        const auto id = static_cast<std::uint32_t>(task_.atoms.size());
        if (!atom_index_.emplace(std::string(t[i].text), id).second)
          fail(t[i], "duplicate atom '" + std::string(t[i].text) + "'");
        task_.atoms.emplace_back(t[i].text);
        group_of_.push_back(std::nullopt);
      }
    } else if (kw == "mutex") {
      if (t.size() < 2) fail(t[0], "'mutex' expects atoms");
      const std::size_t g = task_.mutex_groups.size();
      std::vector<std::uint32_t> group;
      for (std::size_t i = 1; i < t.size(); ++i) {
        const std::uint32_t a = atom(t[i]);
        if (const auto other = group_of_[a]) {
          if (*other == g) fail(t[i], "atom '" + task_.atoms[a] + "' listed twice in one mutex group");
          fail(t[i], "mutex group " + std::to_string(g) + " (line " + std::to_string(line_) +
                         ") overlaps mutex group " + std::to_string(*other) + " (line " +
                         std::to_string(group_lines_[*other]) + ") on atom '" + task_.atoms[a] + "'");
        }
        group_of_[a] = g;
        group.push_back(a);
      }
      std::sort(group.begin(), group.end());
      task_.mutex_groups.push_back(std::move(group));
      group_lines_.push_back(line_);
    } else if (kw == "numvar") {
      expect_args(t, 2);
      check_name(t[1]);
      const auto id = static_cast<std::uint32_t>(task_.numeric.size());
      if (!numvar_index_.emplace(std::string(t[1].text), id).second)
        fail(t[1], "duplicate numeric variable '" + std::string(t[1].text) + "'");
      task_.numeric.push_back({std::string(t[1].text), number(t[2])});
    } else if (kw == "init") {
      if (init_line_) fail(t[0], "duplicate 'init' line");
      init_line_ = line_;
      for (std::size_t i = 1; i < t.size(); ++i) task_.init.push_back(atom(t[i]));
      sort_unique(task_.init);
    } else if (kw == "goal") {
      if (goal_seen_) fail(t[0], "duplicate 'goal' line");
      goal_seen_ = true;
      std::size_t split = 1;
      while (split < t.size() && t[split].text != ";") ++split;
      literals(t, 1, split, task_.goal.pos, task_.goal.neg);
      if (split < t.size()) triples(t, split + 1, task_.goal.numeric, [&](auto& v, auto& c, auto& x) {
        return NumericCondition{numvar(v), comparison(c), number(x)};
      });
    } else if (kw == "action") {
      expect_args(t, 2);
      const std::string name(t[1].text);
      if (!action_names_.insert(name).second) fail(t[1], "duplicate action '" + name + "'");
      Action a;
      a.name = name;
      a.cost = cost(t[2]);
      task_.actions.push_back(std::move(a));
      in_action_ = true;
      action_line_ = line_;
    } else {
      fail(t[0], "unknown keyword '" + std::string(kw) + "'");
    }
  }

  void handle_action_line(const std::vector<Token>& t) {
    Action& a = task_.actions.back();
    const std::string_view kw = t[0].text;
    if (kw == "pre") {
      literals(t, 1, t.size(), a.pre_pos, a.pre_neg);
    } else if (kw == "add" || kw == "del") {
      auto& list = kw == "add" ? a.add : a.del;
      for (std::size_t i = 1; i < t.size(); ++i) list.push_back(atom(t[i]));
      sort_unique(list);
    } else if (kw == "npre") {
      triples(t, 1, a.npre, [&](auto& v, auto& c, auto& x) {
        return NumericCondition{numvar(v), comparison(c), number(x)};
      });
    } else if (kw == "neff") {
      triples(t, 1, a.neff, [&](auto& v, auto& op, auto& x) {
        return NumericEffect{numvar(v), numeric_op(op), number(x)};
      });
    } else if (kw == "end") {
      expect_args(t, 0);
      std::vector<std::uint32_t> both;
      std::set_intersection(a.add.begin(), a.add.end(), a.del.begin(), a.del.end(), std::back_inserter(both));
      if (!both.empty())
        fail(t[0], "action '" + a.name + "' both adds and deletes '" + task_.atoms[both.front()] + "'");
      in_action_ = false;
    } else {
      fail(t[0], "unknown action keyword '" + std::string(kw) + "'");
    }
  }

  GroundedTask task_;
  std::unordered_map<std::string, std::uint32_t> atom_index_;
  std::unordered_map<std::string, std::uint32_t> numvar_index_;
  std::unordered_set<std::string> action_names_;
  std::vector<std::optional<std::size_t>> group_of_;
  std::vector<std::size_t> group_lines_;
  std::size_t line_ = 0;
  std::size_t init_line_ = 0;
  std::size_t action_line_ = 0;
  bool header_ = false;
  bool goal_seen_ = false;
  bool in_action_ = false;
};

bool holds(const GroundedTask&, const State& s, std::span<const std::uint32_t> pos,
           std::span<const std::uint32_t> neg, std::span<const NumericCondition> numeric) {
  for (std::uint32_t p : pos)
    if (!std::binary_search(s.atoms.begin(), s.atoms.end(), p)) return false;
  for (std::uint32_t p : neg)
    if (std::binary_search(s.atoms.begin(), s.atoms.end(), p)) return false;
  for (const auto& c : numeric)
    if (!compare(s.numeric[c.var], c.cmp, c.value)) return false;
  return true;
}

}  // namespace

GroundedTask parse_task(std::string_view text) { return Parser{}.run(text); }

std::string print_task(const GroundedTask& task) {
  std::string out = "gtf 1\n";
  const auto names = [&](std::span<const std::uint32_t> ids, const char* prefix = "") {
    std::string s;
    for (std::uint32_t id : ids) s += " " + std::string(prefix) + task.atoms[id];
    return s;
  };
  const auto conditions = [&](std::span<const NumericCondition> cs) {
    std::string s;
    for (const auto& c : cs)
      s += " " + task.numeric[c.var].name + " " + comparison_text(c.cmp) + " " + format_double(c.value);
    return s;
  };
  for (const auto& a : task.atoms) out += "atom " + a + "\n";
  for (const auto& g : task.mutex_groups) out += "mutex" + names(g) + "\n";
  for (const auto& v : task.numeric) out += "numvar " + v.name + " " + format_double(v.initial) + "\n";
  out += "init" + names(task.init) + "\n";
  out += "goal" + names(task.goal.pos, "+") + names(task.goal.neg, "-");
  if (!task.goal.numeric.empty()) out += " ;" + conditions(task.goal.numeric);
  out += "\n";
  for (const auto& a : task.actions) {
    out += "action " + a.name + " " + std::to_string(a.cost) + "\n";
    if (!a.pre_pos.empty() || !a.pre_neg.empty()) out += "pre" + names(a.pre_pos, "+") + names(a.pre_neg, "-") + "\n";
    if (!a.npre.empty()) out += "npre" + conditions(a.npre) + "\n";
    if (!a.add.empty()) out += "add" + names(a.add) + "\n";
    if (!a.del.empty()) out += "del" + names(a.del) + "\n";
    if (!a.neff.empty()) {
      out += "neff";
      for (const auto& e : a.neff)
        out += " " + task.numeric[e.var].name + " " + numeric_op_text(e.op) + " " + format_double(e.value);
      out += "\n";
    }
    out += "end\n";
  }
  return out;
}

void check_mutex(const GroundedTask& task, const State& s) {
  for (std::size_t g = 0; g < task.mutex_groups.size(); ++g) {
    const auto& group = task.mutex_groups[g];
    std::size_t n = 0;
    for (std::uint32_t p : group) n += std::binary_search(s.atoms.begin(), s.atoms.end(), p);
    if (n > 1) throw ValidationError("state violates mutex group " + std::to_string(g));
  }
}

bool compare(double lhs, Comparison cmp, double rhs) noexcept {
  switch (cmp) {
    case Comparison::Less: return lhs < rhs;
    case Comparison::LessEqual: return lhs <= rhs;
    case Comparison::Equal: return lhs == rhs;
    case Comparison::GreaterEqual: return lhs >= rhs;
    case Comparison::Greater: return lhs > rhs;
  }
  return false;
}

State initial_state(const GroundedTask& task) {
  State s{task.init, {}};
  s.numeric.reserve(task.numeric.size());
  for (const auto& v : task.numeric) s.numeric.push_back(v.initial);
  return s;
}

bool is_goal(const GroundedTask& task, const State& s) {
  return holds(task, s, task.goal.pos, task.goal.neg, task.goal.numeric);
}

bool is_applicable(const GroundedTask& task, const State& s, std::size_t action) {
  const Action& a = task.actions.at(action);
  return holds(task, s, a.pre_pos, a.pre_neg, a.npre);
}

std::vector<std::uint32_t> applicable(const GroundedTask& task, const State& s) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < task.actions.size(); ++i)
    if (is_applicable(task, s, i)) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

State succ(const GroundedTask& task, const State& s, std::size_t action) {
  if (!is_applicable(task, s, action))
    throw ContractViolation("succ: action '" + task.actions.at(action).name + "' is not applicable");
  const Action& a = task.actions.at(action);
  State next;
  std::vector<std::uint32_t> kept;
  kept.reserve(s.atoms.size());
  std::set_difference(s.atoms.begin(), s.atoms.end(), a.del.begin(), a.del.end(), std::back_inserter(kept));
  next.atoms.reserve(kept.size() + a.add.size());
  std::set_union(kept.begin(), kept.end(), a.add.begin(), a.add.end(), std::back_inserter(next.atoms));
  next.numeric = s.numeric;
  for (const auto& e : a.neff) {
    double& x = next.numeric[e.var];
    switch (e.op) {
      case NumericOp::Assign: x = e.value; break;
      case NumericOp::Increase: x += e.value; break;
      case NumericOp::Decrease: x -= e.value; break;
    }
  }
#ifndef NDEBUG
  check_mutex(task, next);
#endif
  return next;
}

FdrCompilation::FdrCompilation(const GroundedTask& task)
    : var_of_(task.atom_count()), value_of_(task.atom_count()) {
  std::vector<bool> grouped(task.atom_count(), false);
  for (const auto& g : task.mutex_groups) {
    vars_.push_back({g});
    for (std::uint32_t p : g) grouped[p] = true;
  }
  for (std::uint32_t p = 0; p < task.atom_count(); ++p)
    if (!grouped[p]) vars_.push_back({{p}});
  std::stable_sort(vars_.begin(), vars_.end(),
                   [](const Variable& a, const Variable& b) { return a.atoms.front() < b.atoms.front(); });
  for (std::uint32_t v = 0; v < vars_.size(); ++v) {
    for (std::uint32_t i = 0; i < vars_[v].atoms.size(); ++i) {
      var_of_[vars_[v].atoms[i]] = v;
      value_of_[vars_[v].atoms[i]] = i;
    }
  }
}

std::vector<std::uint32_t> FdrCompilation::domains() const {
  std::vector<std::uint32_t> out;
  out.reserve(vars_.size());
  for (const auto& v : vars_) out.push_back(v.domain());
  return out;
}

std::vector<std::uint32_t> FdrCompilation::values(std::span<const std::uint32_t> atoms) const {
  std::vector<std::uint32_t> out(vars_.size());
  values_into(atoms, out);
  return out;
}

void FdrCompilation::values_into(std::span<const std::uint32_t> atoms, std::span<std::uint32_t> out) const {
  for (std::size_t v = 0; v < vars_.size(); ++v) out[v] = vars_[v].none();
  for (std::uint32_t p : atoms) {
    const std::uint32_t v = var_of_.at(p);
    if (out[v] != vars_[v].none()) throw ValidationError("state violates mutex group of atom " + std::to_string(p));
    out[v] = value_of_[p];
  }
}

std::vector<std::uint32_t> FdrCompilation::atoms(std::span<const std::uint32_t> values) const {
  if (values.size() != vars_.size()) throw ContractViolation("fdr: wrong number of values");
  std::vector<std::uint32_t> out;
  for (std::size_t v = 0; v < vars_.size(); ++v) {
    if (values[v] > vars_[v].none()) throw ValidationError("fdr: value out of domain");
    if (values[v] != vars_[v].none()) out.push_back(vars_[v].atoms[values[v]]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint32_t bitwidth(std::uint64_t m) noexcept {
  return m <= 1 ? 0 : static_cast<std::uint32_t>(std::bit_width(m - 1));
}

}  // namespace dtdb
