// Benchmark harness: generate tasks, run searches over a chosen state set,
// and report measurements as CSV or JSON lines.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "dtdb/backends.hpp"
#include "dtdb/generators.hpp"
#include "dtdb/metrics.hpp"
#include "dtdb/ordering.hpp"
#include "dtdb/search.hpp"

using namespace dtdb;

namespace {

enum Exit { kSolved = 0, kExhausted = 1, kLimit = 2, kUsage = 3, kInternal = 4 };

struct Options {
  std::string task_path;
  std::string gen_spec;
  std::string backend = "dtdb-s";
  std::string baseline;
  std::string ordering = "input";
  std::string codec = "fdr";
  unsigned word_bits = 32;
  unsigned bin_bits = 0;
  double resize_factor = 2.0;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t max_expansions = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t max_bytes = std::numeric_limits<std::uint64_t>::max();
  double memory_limit = kDefaultMemoryLimit;
  std::string format = "csv";
};

struct LoadedTask {
  std::string id;
  GroundedTask task;
};

LoadedTask load_task(const Options& o) {
  if (o.task_path.empty() == o.gen_spec.empty()) throw CLI::ValidationError("exactly one of --task and --gen is required");
  if (!o.gen_spec.empty()) return {"gen:" + o.gen_spec, parse_task(generate_task(parse_generator_spec(o.gen_spec)))};
  std::ifstream in(o.task_path);
  if (!in) throw std::runtime_error("cannot open task file '" + o.task_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return {o.task_path, parse_task(buf.str())};
}

struct Run {
  RunRecord record;
  SearchResult result;
};

Run run_once(const Options& o, const LoadedTask& t, const std::string& backend_id) {
  const BackendKind kind = parse_backend(backend_id);
  const OrderingKind ordering = parse_ordering(o.ordering);
  const FdrCompilation fdr(t.task);
  const unsigned capacity = o.bin_bits == 0 ? o.word_bits : o.bin_bits;
  if (capacity > o.word_bits) throw ValidationError("--bin-bits may not exceed --word-bits");
  const VariableOrdering order = make_ordering(ordering, t.task, fdr, capacity);
  const StateModel model(t.task, layout_for(order, fdr, o.word_bits));
  BackendConfig config;
  config.word_bits = o.word_bits;
  config.growth = o.resize_factor;
  config.seed = o.seed;
  config.codec = parse_codec(o.codec);
  auto backend = make_backend(kind, model, config);

  SearchLimits limits;
  limits.max_expansions = o.max_expansions;
  limits.max_bytes = o.max_bytes;
  const auto start = std::chrono::steady_clock::now();
  const SearchResult r = ucs(t.task, *backend, limits);
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;

  RunRecord rec;
  rec.task = t.id;
  rec.backend = std::string(backend_name(kind));
  rec.ordering = std::string(ordering_name(ordering));
  rec.codec = std::string(codec_name(config.codec));
  rec.word_bits = o.word_bits;
  rec.resize_factor = o.resize_factor;
  rec.seed = o.seed;
  rec.wall_seconds = wall.count();
  rec.status = std::string(status_name(r.status));
  rec.plan_length = r.plan.size();
  rec.plan_cost = r.plan_cost;
  rec.expanded = r.expanded;
  rec.generated = r.generated;
  rec.unique_states = r.unique_states;
  rec.peak_open_size = r.peak_open_size;
  rec.rep_bytes = backend->rep_bytes();
  rec.peak_rep_bytes = backend->peak_rep_bytes();
  rec.node_count = backend->node_count();
  rec.memory_score = memory_score(static_cast<double>(rec.peak_rep_bytes), o.memory_limit);
  rec.memory_score_raw = raw_memory_score(static_cast<double>(rec.peak_rep_bytes), o.memory_limit);
  return {rec, r};
}

void emit(const Options& o, const std::vector<RunRecord>& records) {
  if (o.format == "csv") {
    std::cout << csv_header() << '\n';
    for (const auto& r : records) std::cout << to_csv(r) << '\n';
  } else {
    for (const auto& r : records) std::cout << to_json(r) << '\n';
  }
}

int exit_for(SearchStatus s) {
  switch (s) {
    case SearchStatus::Solved: return kSolved;
    case SearchStatus::Exhausted: return kExhausted;
    case SearchStatus::Limit: return kLimit;
  }
  return kInternal;
}

bool same_counters(const SearchResult& a, const SearchResult& b) {
  return a.status == b.status && a.plan == b.plan && a.plan_cost == b.plan_cost && a.expanded == b.expanded &&
         a.generated == b.generated && a.unique_states == b.unique_states && a.peak_open_size == b.peak_open_size;
}

int cmd_gen(const std::string& spec, const std::string& kind, std::uint64_t param, const std::string& out) {
  GeneratorSpec g = spec.empty() ? GeneratorSpec{kind, param} : parse_generator_spec(spec);
  const std::string text = generate_task(g);
  if (out.empty() || out == "-") {
    std::cout << text;
    return kSolved;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f || !(f << text)) throw std::runtime_error("cannot write '" + out + "'");
  return kSolved;
}

int cmd_solve(const Options& o) {
  const LoadedTask t = load_task(o);
  Run main = run_once(o, t, o.backend);
  if (!o.baseline.empty()) {
    const Run base = run_once(o, t, o.baseline);
    main.record.compression_ratio =
        compression_ratio(static_cast<double>(base.record.rep_bytes), static_cast<double>(main.record.rep_bytes));
  }
  emit(o, {main.record});
  return exit_for(main.result.status);
}

int cmd_compare(const Options& o) {
  if (o.baseline.empty()) throw CLI::ValidationError("compare requires --baseline");
  const LoadedTask t = load_task(o);
  Run base = run_once(o, t, o.baseline);
  Run main = run_once(o, t, o.backend);
  main.record.compression_ratio =
      compression_ratio(static_cast<double>(base.record.rep_bytes), static_cast<double>(main.record.rep_bytes));
  emit(o, {base.record, main.record});
  if (!same_counters(base.result, main.result)) {
    std::cerr << "error: search counters differ between " << o.baseline << " and " << o.backend << '\n';
    return kInternal;
  }
  return exit_for(main.result.status);
}

int cmd_stats(const Options& o) {
  const LoadedTask t = load_task(o);
  const FdrCompilation fdr(t.task);
  const unsigned capacity = o.bin_bits == 0 ? o.word_bits : o.bin_bits;
  const auto input = input_ordering(t.task, fdr, capacity);
  const auto affine = greedy_pack(t.task, fdr, capacity);
  const FdrLayout in_layout = layout_for(input, fdr, o.word_bits);
  const FdrLayout aff_layout = layout_for(affine, fdr, o.word_bits);
  std::vector<std::pair<std::string, std::string>> fields = {
      {"task", t.id},
      {"atoms", std::to_string(t.task.atom_count())},
      {"mutex_groups", std::to_string(t.task.mutex_groups.size())},
      {"fdr_variables", std::to_string(fdr.size())},
      {"numeric_variables", std::to_string(t.task.numeric_count())},
      {"actions", std::to_string(t.task.actions.size())},
      {"payload_bits", std::to_string(in_layout.payload_bits())},
      {"words_input", std::to_string(in_layout.word_count())},
      {"words_affinity", std::to_string(aff_layout.word_count())},
      {"objective_input", std::to_string(objective(input, t.task, fdr))},
      {"objective_affinity", std::to_string(objective(affine, t.task, fdr))},
  };
  if (o.format == "csv") {
    std::string head, row;
    for (const auto& [k, v] : fields) {
      head += (head.empty() ? "" : ",") + k;
      row += (row.empty() ? "" : ",") + (v.find(',') == std::string::npos ? v : "\"" + v + "\"");
    }
    std::cout << head << '\n' << row << '\n';
  } else {
    std::cout << '{';
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const bool text = i == 0;
      std::cout << (i ? "," : "") << '"' << fields[i].first << "\":";
      if (text) {
        std::string escaped;
        for (char c : fields[i].second) {
          if (c == '"' || c == '\\') escaped += '\\';
          escaped += c;
        }
        std::cout << '"' << escaped << '"';
      } else {
        std::cout << fields[i].second;
      }
    }
    std::cout << "}\n";
  }
  return kSolved;
}

void add_task_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--task", o.task_path, "Task file in gtf format");
  cmd->add_option("--gen", o.gen_spec, "Generated task, KIND:PARAM (chain, counter, gripper, numeric-counter, paired)");
  cmd->add_option("--word-bits", o.word_bits, "Word size w")->check(CLI::IsMember({32, 64}));
  cmd->add_option("--bin-bits", o.bin_bits, "Bits per packed word for variable packing (default: word size)");
  cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
}

void add_run_options(CLI::App* cmd, Options& o) {
  add_task_options(cmd, o);
  cmd->add_option("--backend", o.backend, "State set: hashset-unpacked, hashset-packed, hashset-sparse, dtdb-s, dtdb-h");
  cmd->add_option("--ordering", o.ordering, "Variable ordering")->check(CLI::IsMember({"input", "affinity"}));
  cmd->add_option("--codec", o.codec, "Tree database state codec")->check(CLI::IsMember({"fdr", "sparse"}));
  cmd->add_option("--resize-factor", o.resize_factor, "Growth factor for arrays and tables")
      ->check(CLI::Range(1.0 + 1e-9, 1e9));
  cmd->add_option("--seed", o.seed, "Hash seed");
  cmd->add_option("--max-expansions", o.max_expansions, "Stop with LIMIT after this many expansions");
  cmd->add_option("--max-bytes", o.max_bytes, "Stop with LIMIT once the state set exceeds this many bytes");
  cmd->add_option("--memory-limit", o.memory_limit, "Memory limit U for the memory score, in bytes");
  cmd->add_option("--baseline", o.baseline, "Baseline backend for the compression ratio");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree database state-set benchmarks"};
  app.require_subcommand(1);
  Options o;

  std::string gen_spec, gen_kind, gen_out;
  std::uint64_t gen_param = 0;
  auto* gen = app.add_subcommand("gen", "Write a generated task");
  gen->add_option("--gen", gen_spec, "KIND:PARAM");
  gen->add_option("kind", gen_kind, "chain, counter, gripper, numeric-counter or paired");
  gen->add_option("param", gen_param, "Size parameter");
  gen->add_option("-o,--out", gen_out, "Output path (default: stdout)");

  auto* solve = app.add_subcommand("solve", "Run uniform-cost search and report one record");
  add_run_options(solve, o);
  auto* compare = app.add_subcommand("compare", "Run --baseline and --backend on the same task");
  add_run_options(compare, o);
  auto* stats = app.add_subcommand("stats", "Describe a task's encoding and orderings");
  add_task_options(stats, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (gen->parsed()) {
      if (gen_spec.empty() && gen_kind.empty()) throw CLI::ValidationError("gen needs KIND PARAM or --gen KIND:PARAM");
      return cmd_gen(gen_spec, gen_kind, gen_param, gen_out);
    }
    if (solve->parsed()) return cmd_solve(o);
    if (compare->parsed()) return cmd_compare(o);
    return cmd_stats(o);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}
