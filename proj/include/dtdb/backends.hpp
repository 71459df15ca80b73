#pragma once

// Five interchangeable state-set representations behind one interface.
//
//   hashset-unpacked  one w-bit word per FDR variable, 64 bits per numeric
//   hashset-packed    the FDR layout words, 64 bits per numeric
//   hashset-sparse    sparse atom list followed by dense numerics
//   dtdb-s / dtdb-h   word sequences in a stable / hash-id tree database
//
// The hashsets keep records in a bit arena addressed by state index and
// deduplicate through a flat table of indices. Byte counts are capacity based.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string_view>

#include "dtdb/encoding.hpp"
#include "dtdb/hash.hpp"
#include "dtdb/task.hpp"

namespace dtdb {

enum class BackendKind { HashsetUnpacked, HashsetPacked, HashsetSparse, DtdbStable, DtdbHashId };

inline constexpr BackendKind kAllBackends[] = {BackendKind::HashsetUnpacked, BackendKind::HashsetPacked,
                                               BackendKind::HashsetSparse, BackendKind::DtdbStable,
                                               BackendKind::DtdbHashId};

std::string_view backend_name(BackendKind kind) noexcept;
BackendKind parse_backend(std::string_view name);

struct BackendConfig {
  unsigned word_bits = 32;
  double growth = kDefaultGrowth;
  std::uint64_t seed = kDefaultSeed;
  Codec codec = Codec::FdrWords;  // tree databases only
};

struct BackendInsert {
  std::uint64_t index;
  bool is_new;
  friend bool operator==(const BackendInsert&, const BackendInsert&) = default;
};

class StateSetBackend {
 public:
  virtual ~StateSetBackend() = default;

  /// Indices are dense from 0 in first-insertion order.
  virtual BackendInsert insert(const State& s) = 0;
  virtual State lookup(std::uint64_t index) const = 0;
  virtual std::size_t size() const noexcept = 0;

  /// Current representation size in bytes, and its maximum so far.
  virtual std::size_t rep_bytes() const noexcept = 0;
  virtual std::size_t peak_rep_bytes() const noexcept = 0;

  /// Stored tree nodes; 0 for the hashsets.
  virtual std::size_t node_count() const noexcept { return 0; }

  BackendKind kind() const noexcept { return kind_; }

 protected:
  explicit StateSetBackend(BackendKind kind) : kind_(kind) {}

 private:
  BackendKind kind_;
};

/// The model must outlive the backend.
std::unique_ptr<StateSetBackend> make_backend(BackendKind kind, const StateModel& model, BackendConfig config = {});

}  // namespace dtdb
