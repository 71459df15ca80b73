#include "dtdb/backends.hpp"

#include <limits>
#include <string>

#include "dtdb/flat_table.hpp"
#include "dtdb/indexed_sets.hpp"
#include "dtdb/tree_database.hpp"

namespace dtdb {

namespace {

/// Deduplicated bit-string records in one arena of w-bit words. Fixed-width
/// records sit at index * width; variable-width ones need an (offset, length)
/// directory entry each.
template <std::unsigned_integral Word>
class RecordSet {
 public:
  static constexpr unsigned W = 8 * sizeof(Word);

  RecordSet(std::size_t fixed_bits, double growth, std::uint64_t seed)
      : fixed_bits_(fixed_bits), growth_(growth), seed_(seed), index_(kInitialCapacity, growth) {
    arena_capacity_ = kInitialCapacity;
    arena_.reserve(arena_capacity_);
    if (!fixed()) {
      directory_capacity_ = kInitialCapacity;
      directory_.reserve(directory_capacity_);
    }
  }

  bool fixed() const noexcept { return fixed_bits_ != std::numeric_limits<std::size_t>::max(); }

  std::pair<std::uint64_t, bool> insert(const BitWriter& record) {
    const std::size_t bits = record.bits();
    if (fixed() && bits != fixed_bits_) throw ContractViolation("record set: record width mismatch");
    const std::uint64_t h = hash_record(record.words(), bits);
    auto r = index_.probe(h, [&](Word i) { return equals(i, record.words(), bits); });
    if (r.found) return {index_.slot(r.slot), false};
    const std::size_t next = count_;
    if (next > std::numeric_limits<Word>::max()) throw CapacityError("record set: index space exhausted");
    if (index_.at_max_load()) {
      index_.rebuild(index_.next_capacity(), [&](Word i) {
        extract(i, scratch_);
        return hash_record(scratch_, bit_length(i));
      });
      r = index_.probe(h, [](Word) { return false; });
    }
    append(record.words(), bits);
    index_.emplace_at(r.slot, h, static_cast<Word>(next));
    ++count_;
    return {next, true};
  }

  /// Copies record i into out (zero padded 64-bit words); returns its bit length.
  std::size_t extract(std::uint64_t i, std::vector<std::uint64_t>& out) const {
    const std::size_t bits = bit_length(i);
    const std::size_t pos = bit_offset(i);
    out.assign((bits + 63) / 64, 0);
    for (std::size_t k = 0; k < out.size(); ++k) {
      const auto n = static_cast<unsigned>(std::min<std::size_t>(64, bits - 64 * k));
      out[k] = get_bits<Word>(arena_, pos + 64 * k, n);
    }
    return bits;
  }

  std::size_t size() const noexcept { return count_; }

  std::size_t bytes() const noexcept {
    return arena_capacity_ * sizeof(Word) + directory_capacity_ * 2 * sizeof(Word) + index_.allocated_bytes();
  }

 private:
  std::size_t bit_offset(std::uint64_t i) const {
    return fixed() ? static_cast<std::size_t>(i) * fixed_bits_ : directory_[i].first;
  }
  std::size_t bit_length(std::uint64_t i) const { return fixed() ? fixed_bits_ : directory_[i].second; }

  std::uint64_t hash_record(std::span<const std::uint64_t> words, std::size_t bits) const noexcept {
    return hash_words<std::uint64_t>(words.first((bits + 63) / 64), seed_ ^ bits);
  }

  bool equals(Word i, std::span<const std::uint64_t> words, std::size_t bits) const {
    if (bit_length(i) != bits) return false;
    const std::size_t pos = bit_offset(i);
    for (std::size_t k = 0; 64 * k < bits; ++k) {
      const auto n = static_cast<unsigned>(std::min<std::size_t>(64, bits - 64 * k));
      if (get_bits<Word>(arena_, pos + 64 * k, n) != words[k]) return false;
    }
    return true;
  }

  void append(std::span<const std::uint64_t> words, std::size_t bits) {
    const std::size_t pos = used_bits_;
    const std::size_t need = (pos + bits + W - 1) / W;
    while (need > arena_capacity_) arena_capacity_ = grown_array_capacity(arena_capacity_, growth_);
    arena_.reserve(arena_capacity_);
    if (arena_.size() < need) arena_.resize(need, 0);
    for (std::size_t k = 0; 64 * k < bits; ++k) {
      const auto n = static_cast<unsigned>(std::min<std::size_t>(64, bits - 64 * k));
      put_bits<Word>(arena_, pos + 64 * k, words[k], n);
    }
    used_bits_ += bits;
    if (!fixed()) {
      if (pos > std::numeric_limits<Word>::max() || bits > std::numeric_limits<Word>::max())
        throw CapacityError("record set: arena offset exceeds the word size");
      if (directory_.size() == directory_capacity_) {
        directory_capacity_ = grown_array_capacity(directory_capacity_, growth_);
        directory_.reserve(directory_capacity_);
      }
      directory_.emplace_back(static_cast<Word>(pos), static_cast<Word>(bits));
    }
  }

  std::size_t fixed_bits_;
  double growth_;
  std::uint64_t seed_;
  std::vector<Word> arena_;
  std::size_t arena_capacity_ = 0;
  std::size_t used_bits_ = 0;
  std::vector<std::pair<Word, Word>> directory_;
  std::size_t directory_capacity_ = 0;
  FlatTable<Word> index_;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> scratch_;
};

template <std::unsigned_integral Word>
class HashsetBackend final : public StateSetBackend {
 public:
  static constexpr unsigned W = 8 * sizeof(Word);

  HashsetBackend(BackendKind kind, const StateModel& model, const BackendConfig& config)
      : StateSetBackend(kind), model_(model), records_(record_bits(kind, model), config.growth, config.seed) {
    peak_ = records_.bytes();
  }

  BackendInsert insert(const State& s) override {
    encode(s);
    const auto [index, inserted] = records_.insert(writer_);
    peak_ = std::max(peak_, records_.bytes());
    return {index, inserted};
  }

  State lookup(std::uint64_t index) const override {
    if (index >= records_.size())
      throw ContractViolation("state set: index " + std::to_string(index) + " out of range");
    std::vector<std::uint64_t> words;
    const std::size_t bits = records_.extract(index, words);
    BitReader in(words, bits);
    State s;
    switch (kind()) {
      case BackendKind::HashsetUnpacked: {
        std::vector<std::uint32_t> values(model_.fdr.size());
        for (auto& v : values) v = static_cast<std::uint32_t>(in.get(W));
        s.atoms = model_.fdr.atoms(values);
        break;
      }
      case BackendKind::HashsetPacked: {
        std::vector<std::uint64_t> layout_words(model_.layout.word_count());
        for (auto& w : layout_words) w = in.get(W);
        s.atoms = model_.fdr.atoms(model_.layout.unpack(layout_words));
        break;
      }
      default:
        s.atoms = decode_sparse(in);
        break;
    }
    s.numeric = decode_numeric(in, model_.numeric_count);
    return s;
  }

  std::size_t size() const noexcept override { return records_.size(); }
  std::size_t rep_bytes() const noexcept override { return records_.bytes(); }
  std::size_t peak_rep_bytes() const noexcept override { return peak_; }

 private:
  static std::size_t record_bits(BackendKind kind, const StateModel& model) {
    const std::size_t numeric = 64 * model.numeric_count;
    if (kind == BackendKind::HashsetUnpacked) return model.fdr.size() * W + numeric;
    if (kind == BackendKind::HashsetPacked) return model.layout.word_count() * W + numeric;
    return std::numeric_limits<std::size_t>::max();
  }

  void encode(const State& s) {
    if (s.numeric.size() != model_.numeric_count) throw ContractViolation("state: wrong numeric variable count");
    writer_.clear();
    switch (kind()) {
      case BackendKind::HashsetUnpacked:
        values_.resize(model_.fdr.size());
        model_.fdr.values_into(s.atoms, values_);
        for (std::uint32_t v : values_) writer_.put(v, W);
        break;
      case BackendKind::HashsetPacked:
        values_.resize(model_.fdr.size());
        model_.fdr.values_into(s.atoms, values_);
        layout_words_.resize(model_.layout.word_count());
        model_.layout.pack(values_, layout_words_);
        for (std::uint64_t w : layout_words_) writer_.put(w, W);
        break;
      default:
        encode_sparse(s.atoms, writer_);
        break;
    }
    encode_numeric(s.numeric, writer_);
  }

  const StateModel& model_;
  RecordSet<Word> records_;
  BitWriter writer_;
  std::vector<std::uint32_t> values_;
  std::vector<std::uint64_t> layout_words_;
  std::size_t peak_ = 0;
};

template <std::unsigned_integral Word>
class TreeBackend final : public StateSetBackend {
 public:
  TreeBackend(BackendKind kind, const StateModel& model, const BackendConfig& config)
      : StateSetBackend(kind),
        model_(model),
        codec_(config.codec),
        db_(kind == BackendKind::DtdbStable ? TreeVariant::Stable : TreeVariant::HashId,
            TreeConfig{config.growth, config.seed}) {}

  BackendInsert insert(const State& s) override {
    state_to_sequence<Word>(model_, codec_, s, db_.numeric(), sequence_);
    const auto r = db_.insert(sequence_);
    return {r.index, r.inserted};
  }

  State lookup(std::uint64_t index) const override {
    std::vector<Word> seq;
    db_.lookup_into(index, seq);
    return sequence_to_state<Word>(model_, codec_, seq, db_.numeric());
  }

  std::size_t size() const noexcept override { return db_.size(); }
  std::size_t rep_bytes() const noexcept override { return db_.allocated_bytes(); }
  std::size_t peak_rep_bytes() const noexcept override { return db_.stats().peak_allocated_bytes; }
  std::size_t node_count() const noexcept override { return db_.node_count(); }

 private:
  const StateModel& model_;
  Codec codec_;
  TreeDatabase<Word> db_;
  std::vector<Word> sequence_;
};

template <std::unsigned_integral Word>
std::unique_ptr<StateSetBackend> make_for_word(BackendKind kind, const StateModel& model, const BackendConfig& config) {
  if (kind == BackendKind::DtdbStable || kind == BackendKind::DtdbHashId)
    return std::make_unique<TreeBackend<Word>>(kind, model, config);
  return std::make_unique<HashsetBackend<Word>>(kind, model, config);
}

}  // namespace

std::string_view backend_name(BackendKind kind) noexcept {
  switch (kind) {
    case BackendKind::HashsetUnpacked: return "hashset-unpacked";
    case BackendKind::HashsetPacked: return "hashset-packed";
    case BackendKind::HashsetSparse: return "hashset-sparse";
    case BackendKind::DtdbStable: return "dtdb-s";
    case BackendKind::DtdbHashId: return "dtdb-h";
  }
  return "?";
}

BackendKind parse_backend(std::string_view name) {
  for (BackendKind k : kAllBackends)
    if (backend_name(k) == name) return k;
  throw ValidationError("unknown backend '" + std::string(name) +
                        "' (hashset-unpacked, hashset-packed, hashset-sparse, dtdb-s, dtdb-h)");
}

std::unique_ptr<StateSetBackend> make_backend(BackendKind kind, const StateModel& model, BackendConfig config) {
  if (config.word_bits != model.layout.word_bits())
    throw ContractViolation("backend word size must match the state model layout");
  if (config.word_bits == 32) return make_for_word<std::uint32_t>(kind, model, config);
  if (config.word_bits == 64) return make_for_word<std::uint64_t>(kind, model, config);
  throw ValidationError("word size must be 32 or 64");
}

}  // namespace dtdb
