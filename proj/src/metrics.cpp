#include "dtdb/metrics.hpp"

#include <charconv>
#include <cmath>
#include <nlohmann/json.hpp>

#include "dtdb/errors.hpp"

namespace dtdb {

namespace {

std::string number(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

double compression_ratio(double baseline_bytes, double compressed_bytes) {
  if (!(baseline_bytes > 0) || !(compressed_bytes > 0))
    throw ContractViolation("compression ratio: sizes must be positive");
  return baseline_bytes / compressed_bytes;
}

double memory_score(double bytes, double limit) {
  const double floor = 2 * kMiB;
  if (!(bytes > 0) || !(limit > floor)) throw ContractViolation("memory score: need m > 0 and U > 2 MiB");
  if (bytes <= floor) return 1.0;
  if (bytes >= limit) return 0.0;
  return 1.0 - std::log(bytes / floor) / std::log(limit / floor);
}

double raw_memory_score(double bytes, double limit) {
  if (!(bytes > 0) || !(limit > 1)) throw ContractViolation("memory score: need m > 0 and U > 1");
  return 1.0 - std::log(bytes) / std::log(limit);
}

std::string csv_header() {
  return "task,backend,ordering,codec,word_bits,resize_factor,seed,wall_seconds,status,plan_length,plan_cost,"
         "expanded,generated,unique_states,peak_open_size,rep_bytes,peak_rep_bytes,node_count,compression_ratio,"
         "memory_score,memory_score_raw";
}

std::string to_csv(const RunRecord& r) {
  std::string out;
  const auto add = [&](const std::string& s) {
    if (!out.empty()) out += ',';
    out += s;
  };
  add(csv_field(r.task));
  add(csv_field(r.backend));
  add(csv_field(r.ordering));
  add(csv_field(r.codec));
  add(std::to_string(r.word_bits));
  add(number(r.resize_factor));
  add(std::to_string(r.seed));
  add(number(r.wall_seconds));
  add(r.status);
  for (std::uint64_t v : {r.plan_length, r.plan_cost, r.expanded, r.generated, r.unique_states, r.peak_open_size,
                          r.rep_bytes, r.peak_rep_bytes, r.node_count})
    add(std::to_string(v));
  add(number(r.compression_ratio));
  add(number(r.memory_score));
  add(number(r.memory_score_raw));
  return out;
}

std::string to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["task"] = r.task;
  j["backend"] = r.backend;
  j["ordering"] = r.ordering;
  j["codec"] = r.codec;
  j["word_bits"] = r.word_bits;
  j["resize_factor"] = r.resize_factor;
  j["seed"] = r.seed;
  j["wall_seconds"] = r.wall_seconds;
  j["status"] = r.status;
  j["plan_length"] = r.plan_length;
  j["plan_cost"] = r.plan_cost;
  j["expanded"] = r.expanded;
  j["generated"] = r.generated;
  j["unique_states"] = r.unique_states;
  j["peak_open_size"] = r.peak_open_size;
  j["rep_bytes"] = r.rep_bytes;
  j["peak_rep_bytes"] = r.peak_rep_bytes;
  j["node_count"] = r.node_count;
  j["compression_ratio"] = r.compression_ratio;
  j["memory_score"] = r.memory_score;
  j["memory_score_raw"] = r.memory_score_raw;
  return j.dump();
}

}  // namespace dtdb
