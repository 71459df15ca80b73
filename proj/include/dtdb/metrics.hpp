#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace dtdb {

inline constexpr double kMiB = 1024.0 * 1024.0;
inline constexpr double kDefaultMemoryLimit = 8.0 * 1024.0 * kMiB;

/// baseline / compressed; both must be positive.
double compression_ratio(double baseline_bytes, double compressed_bytes);

/// 1 up to 2 MiB, 0 from the limit on, log-interpolated in between.
double memory_score(double bytes, double limit = kDefaultMemoryLimit);

/// The uninterpolated 1 - ln(m) / ln(U), m and U in bytes.
double raw_memory_score(double bytes, double limit = kDefaultMemoryLimit);

/// One measured run. Field order is the CSV column order.
struct RunRecord {
  std::string task;
  std::string backend;
  std::string ordering;
  std::string codec;
  unsigned word_bits = 32;
  double resize_factor = 2.0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::string status;
  std::uint64_t plan_length = 0;
  std::uint64_t plan_cost = 0;
  std::uint64_t expanded = 0;
  std::uint64_t generated = 0;
  std::uint64_t unique_states = 0;
  std::uint64_t peak_open_size = 0;
  std::uint64_t rep_bytes = 0;
  std::uint64_t peak_rep_bytes = 0;
  std::uint64_t node_count = 0;
  double compression_ratio = 1.0;
  double memory_score = 0.0;
  double memory_score_raw = 0.0;
};

std::string csv_header();
std::string to_csv(const RunRecord& r);
/// One JSON object on a single line.
std::string to_json(const RunRecord& r);

}  // namespace dtdb
