#pragma once

// State encodings: packed FDR words, sparse atom lists, dense binary64
// numerics, and the state <-> word-sequence codecs used by tree databases.

#include <algorithm>
#include <bit>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dtdb/errors.hpp"
#include "dtdb/task.hpp"
#include "dtdb/tree_database.hpp"

namespace dtdb {

constexpr std::uint64_t low_mask(unsigned n) noexcept { return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

/// Writes the low n bits of value at bit position pos (LSB-first). n <= 64.
template <std::unsigned_integral Word>
void put_bits(std::span<Word> words, std::size_t pos, std::uint64_t value, unsigned n) noexcept {
  constexpr unsigned W = 8 * sizeof(Word);
  value &= low_mask(n);
  while (n > 0) {
    const std::size_t wi = pos / W;
    const unsigned off = pos % W;
    const unsigned take = std::min(W - off, n);
    const std::uint64_t m = low_mask(take) << off;
    words[wi] = static_cast<Word>((words[wi] & ~m) | ((value << off) & m));
    value = take >= 64 ? 0 : value >> take;
    n -= take;
    pos += take;
  }
}

template <std::unsigned_integral Word>
std::uint64_t get_bits(std::span<const Word> words, std::size_t pos, unsigned n) noexcept {
  constexpr unsigned W = 8 * sizeof(Word);
  std::uint64_t v = 0;
  unsigned got = 0;
  while (got < n) {
    const std::size_t wi = pos / W;
    const unsigned off = pos % W;
    const unsigned take = std::min(W - off, n - got);
    v |= ((static_cast<std::uint64_t>(words[wi]) >> off) & low_mask(take)) << got;
    got += take;
    pos += take;
  }
  return v;
}

/// Append-only bit string over 64-bit words. Unused high bits stay zero.
class BitWriter {
 public:
  void put(std::uint64_t value, unsigned n) {
    if (n == 0) return;
    const std::size_t need = (bits_ + n + 63) / 64;
    if (words_.size() < need) words_.resize(need, 0);
    put_bits<std::uint64_t>(words_, bits_, value, n);
    bits_ += n;
  }
  void clear() noexcept {
    words_.clear();
    bits_ = 0;
  }
  std::size_t bits() const noexcept { return bits_; }
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t bits_ = 0;
};

class BitReader {
 public:
  BitReader(std::span<const std::uint64_t> words, std::size_t bits) : words_(words), bits_(bits) {}
  std::uint64_t get(unsigned n) {
    if (pos_ + n > bits_) throw CorruptionError("bit reader: read past end of record");
    const std::uint64_t v = get_bits<std::uint64_t>(words_, pos_, n);
    pos_ += n;
    return v;
  }
  std::size_t position() const noexcept { return pos_; }

 private:
  std::span<const std::uint64_t> words_;
  std::size_t bits_;
  std::size_t pos_ = 0;
};

/// Assignment of FDR variables to bit fields inside w-bit words. Each bin is
/// one word; no variable crosses a word boundary.
class FdrLayout {
 public:
  struct Field {
    std::uint32_t word = 0;
    std::uint32_t offset = 0;
    std::uint32_t width = 0;
  };

  FdrLayout() = default;
  /// bins[i] lists the variables packed, in order, into word i.
  FdrLayout(std::vector<std::uint32_t> domains, const std::vector<std::vector<std::uint32_t>>& bins,
            unsigned word_bits);

  /// Next-fit packing in variable order with at most bin_bits bits per word.
  static FdrLayout sequential(std::vector<std::uint32_t> domains, unsigned word_bits, unsigned bin_bits = 0);

  std::size_t variable_count() const noexcept { return domains_.size(); }
  std::size_t word_count() const noexcept { return word_count_; }
  unsigned word_bits() const noexcept { return word_bits_; }
  std::size_t payload_bits() const noexcept { return payload_bits_; }
  const Field& field(std::size_t var) const { return fields_.at(var); }
  const std::vector<std::uint32_t>& domains() const noexcept { return domains_; }
  const std::vector<std::vector<std::uint32_t>>& bins() const noexcept { return bins_; }

  /// out must hold word_count() words; each receives at most word_bits() bits.
  void pack(std::span<const std::uint32_t> values, std::span<std::uint64_t> out) const;
  std::vector<std::uint64_t> pack(std::span<const std::uint32_t> values) const;
  void unpack(std::span<const std::uint64_t> words, std::span<std::uint32_t> out) const;
  std::vector<std::uint32_t> unpack(std::span<const std::uint64_t> words) const;

 private:
  std::vector<std::uint32_t> domains_;
  std::vector<std::vector<std::uint32_t>> bins_;
  std::vector<Field> fields_;
  std::size_t word_count_ = 0;
  std::size_t payload_bits_ = 0;
  unsigned word_bits_ = 32;
};

/// Width per atom index: b = max(1, bit_width(max(count, largest index))).
unsigned sparse_index_bits(std::span<const std::uint32_t> atoms) noexcept;

/// Header byte b, then the count in b bits, then each index in b bits.
/// Total length is 8 + b * (1 + count).
void encode_sparse(std::span<const std::uint32_t> atoms, BitWriter& out);
std::vector<std::uint32_t> decode_sparse(BitReader& in);

/// binary64 bit patterns, 64 bits per variable in task order.
void encode_numeric(std::span<const double> values, BitWriter& out);
std::vector<double> decode_numeric(BitReader& in, std::size_t count);

/// Everything a backend needs to know about the task's state space.
struct StateModel {
  FdrCompilation fdr;
  FdrLayout layout;
  std::size_t atom_count = 0;
  std::size_t numeric_count = 0;

  /// Layout defaults to next-fit packing of the FDR variables in order.
  StateModel(const GroundedTask& task, unsigned word_bits);
  StateModel(const GroundedTask& task, FdrLayout layout);
};

enum class Codec { FdrWords, SparseAtoms };

std::string_view codec_name(Codec c) noexcept;
Codec parse_codec(std::string_view name);

/// FDR codec: the packed layout words. Sparse codec: the ascending atom
/// indices. Both followed by one numeric leaf id per numeric variable.
template <std::unsigned_integral Word>
void state_to_sequence(const StateModel& model, Codec codec, const State& s, NumericLeafStore<Word>& numeric,
                       std::vector<Word>& out);

template <std::unsigned_integral Word>
State sequence_to_state(const StateModel& model, Codec codec, std::span<const Word> sequence,
                        const NumericLeafStore<Word>& numeric);

}  // namespace dtdb
