#include "dtdb/encoding.hpp"

#include <string>

namespace dtdb {

FdrLayout::FdrLayout(std::vector<std::uint32_t> domains, const std::vector<std::vector<std::uint32_t>>& bins,
                     unsigned word_bits)
    : domains_(std::move(domains)), bins_(bins), fields_(domains_.size()), word_bits_(word_bits) {
  if (word_bits != 32 && word_bits != 64) throw ContractViolation("fdr layout: word size must be 32 or 64");
  std::vector<bool> placed(domains_.size(), false);
  for (std::size_t w = 0; w < bins_.size(); ++w) {
    std::uint32_t offset = 0;
    for (std::uint32_t v : bins_[w]) {
      if (v >= domains_.size() || placed[v]) throw ValidationError("fdr layout: bins must list each variable once");
      if (domains_[v] == 0) throw ValidationError("fdr layout: empty domain");
      placed[v] = true;
      const std::uint32_t width = bitwidth(domains_[v]);
      if (offset + width > word_bits) throw ValidationError("fdr layout: bin " + std::to_string(w) + " overflows a word");
      fields_[v] = {static_cast<std::uint32_t>(w), offset, width};
      offset += width;
      payload_bits_ += width;
    }
  }
  if (std::find(placed.begin(), placed.end(), false) != placed.end())
    throw ValidationError("fdr layout: bins must list each variable once");
  word_count_ = bins_.size();
}

FdrLayout FdrLayout::sequential(std::vector<std::uint32_t> domains, unsigned word_bits, unsigned bin_bits) {
  if (bin_bits == 0) bin_bits = word_bits;
  if (bin_bits > word_bits) throw ValidationError("fdr layout: bin capacity exceeds the word size");
  std::vector<std::vector<std::uint32_t>> bins;
  unsigned used = bin_bits;  // forces a first bin
  for (std::uint32_t v = 0; v < domains.size(); ++v) {
    const unsigned width = bitwidth(domains[v]);
    if (width > bin_bits) throw ValidationError("fdr layout: variable " + std::to_string(v) + " wider than a bin");
    if (bins.empty() || used + width > bin_bits) {
      bins.emplace_back();
      used = 0;
    }
    bins.back().push_back(v);
    used += width;
  }
  return FdrLayout(std::move(domains), bins, word_bits);
}

void FdrLayout::pack(std::span<const std::uint32_t> values, std::span<std::uint64_t> out) const {
  if (values.size() != domains_.size() || out.size() < word_count_)
    throw ContractViolation("fdr layout: size mismatch in pack");
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(word_count_), 0);
  for (std::size_t v = 0; v < domains_.size(); ++v) {
    if (values[v] >= domains_[v])
      throw ValidationError("fdr layout: value " + std::to_string(values[v]) + " outside domain of variable " +
                            std::to_string(v));
    const Field& f = fields_[v];
    out[f.word] |= static_cast<std::uint64_t>(values[v]) << f.offset;
  }
}

std::vector<std::uint64_t> FdrLayout::pack(std::span<const std::uint32_t> values) const {
  std::vector<std::uint64_t> out(word_count_);
  pack(values, out);
  return out;
}

void FdrLayout::unpack(std::span<const std::uint64_t> words, std::span<std::uint32_t> out) const {
  if (words.size() < word_count_ || out.size() != domains_.size())
    throw ContractViolation("fdr layout: size mismatch in unpack");
  for (std::size_t v = 0; v < domains_.size(); ++v) {
    const Field& f = fields_[v];
    const auto x = static_cast<std::uint32_t>((words[f.word] >> f.offset) & low_mask(f.width));
    if (x >= domains_[v]) throw CorruptionError("fdr layout: decoded value outside domain");
    out[v] = x;
  }
}

std::vector<std::uint32_t> FdrLayout::unpack(std::span<const std::uint64_t> words) const {
  std::vector<std::uint32_t> out(domains_.size());
  unpack(words, out);
  return out;
}

unsigned sparse_index_bits(std::span<const std::uint32_t> atoms) noexcept {
  std::uint64_t m = atoms.size();
  if (!atoms.empty()) m = std::max<std::uint64_t>(m, atoms.back());
  return std::max(1u, static_cast<unsigned>(std::bit_width(m)));
}

void encode_sparse(std::span<const std::uint32_t> atoms, BitWriter& out) {
  for (std::size_t i = 1; i < atoms.size(); ++i)
    if (atoms[i - 1] >= atoms[i]) throw ValidationError("sparse encoding: atom indices must be strictly ascending");
  const unsigned b = sparse_index_bits(atoms);
  out.put(b, 8);
  out.put(atoms.size(), b);
  for (std::uint32_t a : atoms) out.put(a, b);
}

std::vector<std::uint32_t> decode_sparse(BitReader& in) {
  const auto b = static_cast<unsigned>(in.get(8));
  if (b == 0 || b > 64) throw CorruptionError("sparse encoding: bad header");
  const std::uint64_t count = in.get(b);
  std::vector<std::uint32_t> atoms;
  atoms.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) atoms.push_back(static_cast<std::uint32_t>(in.get(b)));
  return atoms;
}

void encode_numeric(std::span<const double> values, BitWriter& out) {
  for (double x : values) out.put(std::bit_cast<std::uint64_t>(x), 64);
}

std::vector<double> decode_numeric(BitReader& in, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(std::bit_cast<double>(in.get(64)));
  return out;
}

StateModel::StateModel(const GroundedTask& task, unsigned word_bits)
    : StateModel(task, FdrLayout::sequential(FdrCompilation(task).domains(), word_bits)) {}

StateModel::StateModel(const GroundedTask& task, FdrLayout l)
    : fdr(task), layout(std::move(l)), atom_count(task.atom_count()), numeric_count(task.numeric_count()) {
  if (layout.domains() != fdr.domains()) throw ContractViolation("state model: layout does not match the task");
}

std::string_view codec_name(Codec c) noexcept { return c == Codec::FdrWords ? "fdr" : "sparse"; }

Codec parse_codec(std::string_view name) {
  if (name == "fdr") return Codec::FdrWords;
  if (name == "sparse") return Codec::SparseAtoms;
  throw ValidationError("unknown codec '" + std::string(name) + "' (fdr, sparse)");
}

template <std::unsigned_integral Word>
void state_to_sequence(const StateModel& model, Codec codec, const State& s, NumericLeafStore<Word>& numeric,
                       std::vector<Word>& out) {
  out.clear();
  if (codec == Codec::FdrWords) {
    const auto words = model.layout.pack(model.fdr.values(s.atoms));
    for (std::uint64_t w : words) out.push_back(static_cast<Word>(w));
  } else {
    for (std::uint32_t a : s.atoms) out.push_back(static_cast<Word>(a));
  }
  if (s.numeric.size() != model.numeric_count) throw ContractViolation("state: wrong numeric variable count");
  for (double x : s.numeric) out.push_back(numeric.intern(x));
}

template <std::unsigned_integral Word>
State sequence_to_state(const StateModel& model, Codec codec, std::span<const Word> sequence,
                        const NumericLeafStore<Word>& numeric) {
  if (sequence.size() < model.numeric_count) throw CorruptionError("sequence shorter than its numeric suffix");
  const std::size_t prefix = sequence.size() - model.numeric_count;
  State s;
  if (codec == Codec::FdrWords) {
    if (prefix != model.layout.word_count()) throw CorruptionError("sequence length does not match the layout");
    const std::vector<std::uint64_t> words(sequence.begin(), sequence.begin() + static_cast<std::ptrdiff_t>(prefix));
    s.atoms = model.fdr.atoms(model.layout.unpack(words));
  } else {
    s.atoms.assign(sequence.begin(), sequence.begin() + static_cast<std::ptrdiff_t>(prefix));
  }
  for (std::size_t i = prefix; i < sequence.size(); ++i) s.numeric.push_back(numeric.value(sequence[i]));
  return s;
}

template void state_to_sequence<std::uint32_t>(const StateModel&, Codec, const State&, NumericLeafStore<std::uint32_t>&,
                                               std::vector<std::uint32_t>&);
template void state_to_sequence<std::uint64_t>(const StateModel&, Codec, const State&, NumericLeafStore<std::uint64_t>&,
                                               std::vector<std::uint64_t>&);
template State sequence_to_state<std::uint32_t>(const StateModel&, Codec, std::span<const std::uint32_t>,
                                                const NumericLeafStore<std::uint32_t>&);
template State sequence_to_state<std::uint64_t>(const StateModel&, Codec, std::span<const std::uint64_t>,
                                                const NumericLeafStore<std::uint64_t>&);

}  // namespace dtdb
