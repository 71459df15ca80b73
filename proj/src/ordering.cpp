#include "dtdb/ordering.hpp"

#include <algorithm>
#include <string>

namespace dtdb {

namespace {

std::size_t variable_count(const GroundedTask& task, const FdrCompilation& fdr) {
  return fdr.size() + task.numeric_count();
}

void check_widths(const FdrCompilation& fdr, unsigned capacity_bits) {
  if (capacity_bits == 0 || capacity_bits > 64) throw ValidationError("ordering: bin capacity must be 1..64 bits");
  for (std::size_t v = 0; v < fdr.size(); ++v)
    if (bitwidth(fdr.variable(v).domain()) > capacity_bits)
      throw ValidationError("ordering: variable " + std::to_string(v) + " is wider than a bin");
}

VariableOrdering finish(std::vector<std::vector<std::uint32_t>> bins, const GroundedTask& task,
                        const FdrCompilation& fdr) {
  VariableOrdering o;
  o.bins = std::move(bins);
  o.position.assign(variable_count(task, fdr), 0);
  std::uint32_t next = 0;
  for (const auto& bin : o.bins)
    for (std::uint32_t v : bin) o.position[v] = next++;
  for (std::size_t n = 0; n < task.numeric_count(); ++n) o.position[fdr.size() + n] = next++;
  return o;
}

}  // namespace

std::vector<std::uint32_t> effect_variables(const FdrCompilation& fdr, const Action& action) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t p : action.add) out.push_back(fdr.var_of(p));
  for (std::uint32_t p : action.del) out.push_back(fdr.var_of(p));
  for (const auto& e : action.neff) out.push_back(static_cast<std::uint32_t>(fdr.size() + e.var));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::uint64_t AffinityMatrix::row_sum(std::size_t a) const {
  std::uint64_t s = 0;
  for (std::size_t b = 0; b < n_; ++b) s += cells_[a * n_ + b];
  return s;
}

AffinityMatrix affinity(const GroundedTask& task, const FdrCompilation& fdr) {
  AffinityMatrix m(variable_count(task, fdr));
  for (const Action& a : task.actions) {
    const auto eff = effect_variables(fdr, a);
    for (std::size_t i = 0; i < eff.size(); ++i)
      for (std::size_t j = i + 1; j < eff.size(); ++j) m.bump(eff[i], eff[j]);
  }
  return m;
}

std::vector<std::uint32_t> VariableOrdering::sequence() const {
  std::vector<std::uint32_t> out(position.size());
  for (std::uint32_t v = 0; v < position.size(); ++v) out[position[v]] = v;
  return out;
}

std::string_view ordering_name(OrderingKind k) noexcept { return k == OrderingKind::Input ? "input" : "affinity"; }

OrderingKind parse_ordering(std::string_view name) {
  if (name == "input") return OrderingKind::Input;
  if (name == "affinity") return OrderingKind::Affinity;
  throw ValidationError("unknown ordering '" + std::string(name) + "' (input, affinity)");
}

VariableOrdering input_ordering(const GroundedTask& task, const FdrCompilation& fdr, unsigned capacity_bits) {
  check_widths(fdr, capacity_bits);
  return finish(FdrLayout::sequential(fdr.domains(), 64, capacity_bits).bins(), task, fdr);
}

VariableOrdering greedy_pack(const GroundedTask& task, const FdrCompilation& fdr, unsigned capacity_bits) {
  check_widths(fdr, capacity_bits);
  const AffinityMatrix aff = affinity(task, fdr);
  const std::size_t f = fdr.size();
  std::vector<bool> packed(f, false);
  std::vector<std::uint64_t> gain(f, 0);
  std::vector<std::uint64_t> total(f);
  for (std::uint32_t v = 0; v < f; ++v) total[v] = aff.row_sum(v);
  std::size_t remaining = f;

  // True when (g, v) beats the current best (best_gain, best).
  const auto better = [&](std::uint64_t g, std::uint32_t v, std::uint64_t best_gain, std::uint32_t best) {
    if (g != best_gain) return g > best_gain;
    const auto dv = fdr.variable(v).domain(), db = fdr.variable(best).domain();
    if (dv != db) return dv > db;
    return v < best;
  };

  std::vector<std::vector<std::uint32_t>> bins;
  while (remaining > 0) {
    std::uint32_t seed = 0;
    std::uint64_t seed_gain = 0;
    bool found = false;
    for (std::uint32_t v = 0; v < f; ++v) {
      if (packed[v]) continue;
      const std::uint64_t g = total[v];
      if (!found || better(g, v, seed_gain, seed)) {
        seed = v;
        seed_gain = g;
        found = true;
      }
    }
    std::vector<std::uint32_t> bin;
    unsigned used = 0;
    std::fill(gain.begin(), gain.end(), 0);
    for (std::uint32_t v = seed;;) {
      bin.push_back(v);
      packed[v] = true;
      --remaining;
      used += bitwidth(fdr.variable(v).domain());
      for (std::uint32_t u = 0; u < f; ++u) gain[u] += aff(u, v);

      bool any = false;
      std::uint32_t best = 0;
      for (std::uint32_t u = 0; u < f; ++u) {
        if (packed[u] || used + bitwidth(fdr.variable(u).domain()) > capacity_bits) continue;
        if (!any || better(gain[u], u, gain[best], best)) {
          best = u;
          any = true;
        }
      }
      if (!any) break;
      v = best;
    }
    bins.push_back(std::move(bin));
  }
  return finish(std::move(bins), task, fdr);
}

VariableOrdering make_ordering(OrderingKind kind, const GroundedTask& task, const FdrCompilation& fdr,
                               unsigned capacity_bits) {
  return kind == OrderingKind::Input ? input_ordering(task, fdr, capacity_bits)
                                     : greedy_pack(task, fdr, capacity_bits);
}

std::uint64_t objective(const VariableOrdering& ordering, const GroundedTask& task, const FdrCompilation& fdr) {
  std::uint64_t total = 0;
  std::vector<std::uint32_t> leaves;
  for (const Action& a : task.actions) {
    leaves.clear();
    for (std::uint32_t v : effect_variables(fdr, a)) leaves.push_back(ordering.position.at(v) / 2);
    std::sort(leaves.begin(), leaves.end());
    total += static_cast<std::uint64_t>(std::unique(leaves.begin(), leaves.end()) - leaves.begin());
  }
  return total;
}

FdrLayout layout_for(const VariableOrdering& ordering, const FdrCompilation& fdr, unsigned word_bits) {
  return FdrLayout(fdr.domains(), ordering.bins, word_bits);
}

}  // namespace dtdb
