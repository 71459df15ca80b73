#include "dtdb/tree_database.hpp"

namespace dtdb {

namespace {

template <std::unsigned_integral Word>
constexpr std::size_t hashid_max_capacity() {
  if constexpr (sizeof(Word) < sizeof(std::size_t))
    return std::size_t{1} << (8 * sizeof(Word));
  else
    return std::size_t{1} << (8 * sizeof(std::size_t) - 1);
}

}  // namespace

template <std::unsigned_integral Word>
TreeDatabase<Word>::TreeDatabase(TreeVariant variant, TreeConfig config)
    : variant_(variant),
      config_(config),
      nodes_(variant == TreeVariant::Stable
                 ? std::variant<StableNodes, HashIdNodes>(std::in_place_type<StableNodes>,
                                                          config.growth, config.seed)
                 : std::variant<StableNodes, HashIdNodes>(std::in_place_type<HashIdNodes>,
                                                          kInitialCapacity, config.growth, config.seed,
                                                          hashid_max_capacity<Word>())),
      roots_(config.growth, config.seed),
      numeric_(config.growth, config.seed) {
  peak_bytes_ = allocated_bytes();
}

template <std::unsigned_integral Word>
typename TreeDatabase<Word>::InsertResult TreeDatabase<Word>::insert(std::span<const Word> sequence) {
  const std::uint64_t k = sequence.size();
  if (k > std::numeric_limits<Word>::max())
    throw ContractViolation("tree database: sequence length does not fit in a word");
  RootEntry<Word> entry{0, static_cast<Word>(k)};
  if (k == 1) {
    entry.root = sequence[0];
  } else if (k >= 2) {
    // A HashId insert that hits the load bound relocates and starts over; the
    // partial tree from the failed attempt is unreachable and gets dropped.
    for (;;) {
      if (auto root = build(sequence, root_leaf_count(k))) {
        entry.root = *root;
        break;
      }
      relocate();
    }
  }
  const auto [index, inserted] = roots_.insert(entry);
  note_peak(allocated_bytes());
  return {index, inserted};
}

template <std::unsigned_integral Word>
std::optional<Word> TreeDatabase<Word>::build(std::span<const Word> elements, std::uint64_t leaves) {
  if (leaves == 1) {
    if (elements.size() == 1) return elements[0];
    return intern(NodeType{elements[0], elements[1]});
  }
  const ShapeSplit split = shape_split(leaves);
  const auto left = build(elements.first(2 * split.left), split.left);
  if (!left) return std::nullopt;
  const auto right = build(elements.subspan(2 * split.left), split.right);
  if (!right) return std::nullopt;
  return intern(NodeType{*left, *right});
}

template <std::unsigned_integral Word>
std::optional<Word> TreeDatabase<Word>::intern(const NodeType& n) {
  if (variant_ == TreeVariant::Stable) return stable_nodes().insert(n).first;
  const auto r = hashid_nodes().try_insert(n);
  if (!r) return std::nullopt;
  return static_cast<Word>(r->first);
}

template <std::unsigned_integral Word>
const typename TreeDatabase<Word>::NodeType& TreeDatabase<Word>::node(std::size_t id) const {
  if (const auto* s = std::get_if<StableNodes>(&nodes_)) return s->key_of(id);
  return std::get_if<HashIdNodes>(&nodes_)->key_of(id);
}

template <std::unsigned_integral Word>
std::size_t TreeDatabase<Word>::node_count() const noexcept {
  return std::visit([](const auto& store) { return store.size(); }, nodes_);
}

template <std::unsigned_integral Word>
std::vector<Word> TreeDatabase<Word>::lookup(std::size_t index) const {
  std::vector<Word> out;
  lookup_into(index, out);
  return out;
}

template <std::unsigned_integral Word>
void TreeDatabase<Word>::lookup_into(std::size_t index, std::vector<Word>& out) const {
  const RootEntry<Word>& entry = roots_.key_of(index);
  out.clear();
  const std::uint64_t k = entry.length;
  if (k == 0) return;
  if (k == 1) {
    out.push_back(entry.root);
    return;
  }
  out.reserve(k);
  decode(entry.root, root_leaf_count(k), k, out);
}

template <std::unsigned_integral Word>
void TreeDatabase<Word>::decode(Word ref, std::uint64_t leaves, std::uint64_t count,
                                std::vector<Word>& out) const {
  if (leaves == 1) {
    if (count == 1) {
      out.push_back(ref);
      return;
    }
    const NodeType& n = node(ref);
    out.push_back(n.left);
    out.push_back(n.right);
    return;
  }
  const ShapeSplit split = shape_split(leaves);
  const NodeType n = node(ref);
  decode(n.left, split.left, 2 * split.left, out);
  decode(n.right, split.right, count - 2 * split.left, out);
}

template <std::unsigned_integral Word>
std::optional<Word> TreeDatabase<Word>::copy_tree(const HashIdNodes& from, HashIdNodes& to, Word ref,
                                                  std::uint64_t leaves, std::uint64_t count) {
  if (leaves == 1) {
    if (count == 1) return ref;
    const auto r = to.try_insert(from.key_of(ref));
    if (!r) return std::nullopt;
    return static_cast<Word>(r->first);
  }
  const ShapeSplit split = shape_split(leaves);
  const NodeType n = from.key_of(ref);
  const auto left = copy_tree(from, to, n.left, split.left, 2 * split.left);
  if (!left) return std::nullopt;
  const auto right = copy_tree(from, to, n.right, split.right, count - 2 * split.left);
  if (!right) return std::nullopt;
  const auto r = to.try_insert(NodeType{*left, *right});
  if (!r) return std::nullopt;
  return static_cast<Word>(r->first);
}

template <std::unsigned_integral Word>
void TreeDatabase<Word>::relocate() {
  if (variant_ != TreeVariant::HashId) throw ContractViolation("relocate: only hash-id tree databases relocate");
  HashIdNodes& old = hashid_nodes();
  std::size_t capacity = old.next_capacity();
  std::vector<Word> new_roots(roots_.size());
  for (;;) {
    HashIdNodes fresh = old.empty_like(capacity);
    bool fits = true;
    for (std::size_t i = 0; i < roots_.size() && fits; ++i) {
      const RootEntry<Word>& e = roots_.key_of(i);
      if (e.length < 2) {
        new_roots[i] = e.root;
        continue;
      }
      const auto moved = copy_tree(old, fresh, e.root, root_leaf_count(e.length), e.length);
      if (moved) new_roots[i] = *moved;
      else fits = false;
    }
    note_peak(allocated_bytes() + fresh.allocated_bytes() + new_roots.size() * sizeof(Word));
    if (!fits) {
      // Rebuilding can un-share nodes that served as both leaf and inner node,
      // so in rare cases the live set outgrows one growth step.
      capacity = fresh.next_capacity();
      continue;
    }
    roots_.rewrite_keys([&](std::size_t i, RootEntry<Word>& e) { e.root = new_roots[i]; });
    old = std::move(fresh);
    ++relocations_;
    note_peak(allocated_bytes());
    return;
  }
}

template <std::unsigned_integral Word>
std::size_t TreeDatabase<Word>::allocated_bytes() const noexcept {
  const std::size_t node_bytes = std::visit([](const auto& s) { return s.allocated_bytes(); }, nodes_);
  return node_bytes + roots_.allocated_bytes() + numeric_.allocated_bytes();
}

template <std::unsigned_integral Word>
TreeStats TreeDatabase<Word>::stats() const {
  TreeStats s;
  s.node_count = node_count();
  if (const auto* st = std::get_if<StableNodes>(&nodes_)) s.node_capacity = st->payload_capacity();
  else s.node_capacity = std::get_if<HashIdNodes>(&nodes_)->capacity();
  s.root_count = roots_.size();
  s.numeric_count = numeric_.size();
  s.allocated_bytes = allocated_bytes();
  s.payload_bytes = std::visit([](const auto& st) { return st.payload_bytes(); }, nodes_) +
                    roots_.payload_bytes() + numeric_.payload_bytes();
  s.peak_allocated_bytes = std::max(peak_bytes_, s.allocated_bytes);
  s.relocations = relocations_;
  return s;
}

template class TreeDatabase<std::uint32_t>;
template class TreeDatabase<std::uint64_t>;

}  // namespace dtdb
