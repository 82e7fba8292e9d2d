#include "fraudring/cycles.hpp"

#include <algorithm>
#include <iterator>
#include <limits>
#include <thread>

#include "fraudring/error.hpp"

namespace fraudring {

std::string_view to_string(CycleSource s) {
  switch (s) {
    case CycleSource::BreadthFirst: return "bfs";
    case CycleSource::DepthFirst: return "dfs";
    case CycleSource::Oracle: return "oracle";
  }
  return "?";
}

CycleSource source_of(TraversalStrategy s) {
  return s == TraversalStrategy::BreadthFirst ? CycleSource::BreadthFirst : CycleSource::DepthFirst;
}

std::string_view to_string(RootMode m) {
  return m == RootMode::AllRoots ? "all-roots" : "single-root";
}

std::optional<RootMode> parse_root_mode(std::string_view s) {
  if (s == "all-roots" || s == "all") return RootMode::AllRoots;
  if (s == "single-root" || s == "single") return RootMode::SingleRootPerComponent;
  return std::nullopt;
}

void canonicalize_into(std::span<const NodeId> v, std::vector<NodeId>& out) {
  out.clear();
  const std::size_t n = v.size();
  if (n == 0) return;
  const auto p = std::min_element(v.begin(), v.end());
  // Vertices are distinct, so the neighbor after the minimum decides the orientation.
  const NodeId next = p + 1 == v.end() ? v.front() : *(p + 1);
  const NodeId prev = p == v.begin() ? v.back() : *(p - 1);
  if (n < 3 || next < prev) {
    out.insert(out.end(), p, v.end());
    out.insert(out.end(), v.begin(), p);
  } else {
    out.insert(out.end(), std::make_reverse_iterator(p + 1), v.rend());
    out.insert(out.end(), v.rbegin(), std::make_reverse_iterator(p + 1));
  }
}

CanonicalKey canonical_key(std::span<const NodeId> vertices) {
  CanonicalKey k;
  canonicalize_into(vertices, k.seq);
  return k;
}

namespace {

std::uint32_t pack(const Witness& w) {
  return (w.root << 1) | (w.strategy == TraversalStrategy::DepthFirst ? 1u : 0u);
}

Witness unpack(std::uint32_t p) {
  return Witness{p >> 1, (p & 1u) ? TraversalStrategy::DepthFirst : TraversalStrategy::BreadthFirst};
}

}  // namespace

void Provenance::add(const Witness& w) {
  if (w.root > (std::numeric_limits<std::uint32_t>::max() >> 1)) {
    throw DomainError("witness root id exceeds 2^31 - 1");
  }
  ++count_;
  const std::uint32_t p = pack(w);
  auto* first = slots_.data();
  auto* last = first + stored_;
  auto* it = std::lower_bound(first, last, p);
  if (it != last && *it == p) return;
  if (stored_ == kMaxWitnesses) {
    if (it == last) return;
    --last;  // drop the largest
  } else {
    ++stored_;
  }
  std::move_backward(it, last, last + 1);
  *it = p;
}

void Provenance::merge(const Provenance& other) {
  std::array<std::uint32_t, 2 * kMaxWitnesses> merged{};
  auto end = std::set_union(slots_.begin(), slots_.begin() + stored_, other.slots_.begin(),
                            other.slots_.begin() + other.stored_, merged.begin());
  stored_ = static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(end - merged.begin(), kMaxWitnesses));
  std::copy_n(merged.begin(), stored_, slots_.begin());
  count_ += other.count_;
}

std::vector<Witness> Provenance::witnesses() const {
  std::vector<Witness> out;
  out.reserve(stored_);
  for (std::uint32_t i = 0; i < stored_; ++i) out.push_back(unpack(slots_[i]));
  return out;
}

std::optional<Witness> Provenance::smallest() const {
  if (stored_ == 0) return std::nullopt;
  return unpack(slots_[0]);
}

namespace {

std::uint64_t hash_key(std::span<const NodeId> key) {
  std::uint64_t h = 0x9E3779B97F4A7C15ull ^ key.size();
  for (NodeId v : key) {
    h ^= v;
    h *= 0xBF58476D1CE4E5B9ull;
    h ^= h >> 31;
  }
  return h;
}

bool key_less(std::span<const NodeId> a, std::span<const NodeId> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

std::span<const NodeId> CycleSet::EntryRef::vertices() const { return set_->key_of(index_); }
std::size_t CycleSet::EntryRef::length() const { return set_->meta_[index_].length; }
EdgeId CycleSet::EntryRef::closing_edge() const { return set_->meta_[index_].closing_edge; }
CycleSource CycleSet::EntryRef::source() const { return set_->meta_[index_].source; }
const Provenance& CycleSet::EntryRef::provenance() const { return set_->meta_[index_].provenance; }
Cycle CycleSet::EntryRef::cycle() const {
  const auto v = vertices();
  return Cycle{{v.begin(), v.end()}, closing_edge(), source()};
}

namespace {

constexpr std::uint64_t kRefMask = 0xFFFF'FFFFull;

std::uint64_t tag_of(std::uint64_t hash) { return hash & ~kRefMask; }

}  // namespace

// Slots come from the top bits of the hash and the tag keeps the top 32
// bits, so growing the table never rehashes keys.
std::optional<std::uint32_t> CycleSet::lookup(std::span<const NodeId> key, std::uint64_t hash) const {
  if (table_.empty()) return std::nullopt;
  const std::size_t mask = table_.size() - 1;
  const std::uint64_t tag = tag_of(hash);
  for (std::size_t slot = tag >> table_shift_;; slot = (slot + 1) & mask) {
    const std::uint64_t cell = table_[slot];
    if (cell == 0) return std::nullopt;
    if (tag_of(cell) != tag) continue;
    const auto index = static_cast<std::uint32_t>((cell & kRefMask) - 1);
    if (std::ranges::equal(key, key_of(index))) return index;
  }
}

void CycleSet::place(std::uint64_t cell) {
  const std::size_t mask = table_.size() - 1;
  std::size_t slot = tag_of(cell) >> table_shift_;
  while (table_[slot] != 0) slot = (slot + 1) & mask;
  table_[slot] = cell;
}

void CycleSet::rebuild_table(std::size_t capacity) {
  std::size_t cap = 64;
  unsigned bits = 6;
  while (cap < capacity) {
    cap *= 2;
    ++bits;
  }
  if (bits > 32) throw SizeLimitError("cycle set hash table exceeds 2^32 slots");
  std::vector<std::uint64_t> old = std::move(table_);
  table_.assign(cap, 0);
  table_shift_ = 64 - bits;
  if (!old.empty()) {
    for (std::uint64_t cell : old) {
      if (cell != 0) place(cell);
    }
  } else {
    for (std::uint32_t i = 0; i < meta_.size(); ++i) place(tag_of(hash_key(key_of(i))) | (i + 1ull));
  }
}

void CycleSet::append(std::span<const NodeId> key, const Meta& meta) {
  if (meta_.size() >= kRefMask - 1) throw SizeLimitError("cycle set exceeds 2^32 - 2 entries");
  Meta m = meta;
  m.offset = arena_.size();
  m.length = static_cast<std::uint32_t>(key.size());
  meta_.push_back(m);
  arena_.insert(arena_.end(), key.begin(), key.end());
}

void CycleSet::upsert(std::span<const NodeId> key, EdgeId closing_edge, CycleSource source,
                      const Provenance& provenance, bool* inserted) {
  upsert_hashed(key, hash_key(key), closing_edge, source, provenance, inserted);
}

void CycleSet::upsert_hashed(std::span<const NodeId> key, std::uint64_t h, EdgeId closing_edge,
                             CycleSource source, const Provenance& provenance, bool* inserted) {
  if (auto idx = lookup(key, h)) {
    Meta& m = meta_[*idx];
    // The representative (closing edge, source) follows the smallest witness.
    const auto mine = m.provenance.smallest();
    const auto theirs = provenance.smallest();
    const bool take = theirs && (!mine || *theirs < *mine || (*theirs == *mine && closing_edge < m.closing_edge));
    if (take) {
      m.closing_edge = closing_edge;
      m.source = source;
    }
    m.provenance.merge(provenance);
    if (inserted) *inserted = false;
    return;
  }
  if ((meta_.size() + 1) * 2 > table_.size()) rebuild_table(2 * table_.size());
  append(key, Meta{0, 0, closing_edge, source, provenance});
  place(tag_of(h) | meta_.size());
  ordered_ = false;
  if (inserted) *inserted = true;
}

bool CycleSet::insert(std::span<const NodeId> vertices, EdgeId closing_edge, CycleSource source,
                      std::optional<Witness> witness) {
  canonicalize_into(vertices, scratch_);
  Provenance p;
  if (witness) p.add(*witness);
  bool inserted = false;
  upsert(scratch_, closing_edge, source, p, &inserted);
  return inserted;
}

void CycleSet::insert_batch(std::span<const NodeId> flat, std::span<const std::size_t> offsets,
                            std::span<const EdgeId> closing_edges, CycleSource source,
                            std::optional<Witness> witness) {
  if (offsets.empty()) return;
  const std::size_t count = offsets.size() - 1;
  if (closing_edges.size() != count) throw DomainError("insert_batch: closing edge count mismatch");
  Provenance p;
  if (witness) p.add(*witness);

  batch_keys_.resize(flat.size());
  batch_hashes_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto raw = flat.subspan(offsets[i], offsets[i + 1] - offsets[i]);
    canonicalize_into(raw, scratch_);
    std::copy(scratch_.begin(), scratch_.end(), batch_keys_.begin() + static_cast<std::ptrdiff_t>(offsets[i]));
    batch_hashes_[i] = hash_key(scratch_);
  }
  auto key = [&](std::size_t i) {
    return std::span<const NodeId>(batch_keys_).subspan(offsets[i], offsets[i + 1] - offsets[i]);
  };

  constexpr std::size_t kGroup = 32;
  for (std::size_t lo = 0; lo < count; lo += kGroup) {
    const std::size_t hi = std::min(count, lo + kGroup);
    if (!table_.empty()) {
      for (std::size_t i = lo; i < hi; ++i) __builtin_prefetch(&table_[tag_of(batch_hashes_[i]) >> table_shift_]);
      for (std::size_t i = lo; i < hi; ++i) {
        const std::uint64_t cell = table_[tag_of(batch_hashes_[i]) >> table_shift_];
        if (cell != 0 && tag_of(cell) == tag_of(batch_hashes_[i])) __builtin_prefetch(&meta_[(cell & kRefMask) - 1]);
      }
      for (std::size_t i = lo; i < hi; ++i) {
        const std::uint64_t cell = table_[tag_of(batch_hashes_[i]) >> table_shift_];
        if (cell != 0 && tag_of(cell) == tag_of(batch_hashes_[i])) {
          __builtin_prefetch(arena_.data() + meta_[(cell & kRefMask) - 1].offset);
        }
      }
    }
    for (std::size_t i = lo; i < hi; ++i) {
      upsert_hashed(key(i), batch_hashes_[i], closing_edges[i], source, p, nullptr);
    }
  }
}

bool CycleSet::insert(const Cycle& c, std::optional<Witness> witness) {
  return insert(c.vertices, c.closing_edge, c.source, witness);
}

void CycleSet::merge(const CycleSet& other) {
  for (std::uint32_t i = 0; i < other.meta_.size(); ++i) {
    const Meta& m = other.meta_[i];
    upsert(other.key_of(i), m.closing_edge, m.source, m.provenance, nullptr);
  }
}

std::optional<CycleSet::EntryRef> CycleSet::find(std::span<const NodeId> vertices) const {
  std::vector<NodeId> key;
  canonicalize_into(vertices, key);
  if (auto idx = lookup(key, hash_key(key))) return EntryRef(this, *idx);
  return std::nullopt;
}

void CycleSet::ensure_order() const {
  if (ordered_ && order_.size() == meta_.size()) return;
  // Sort on a packed prefix of (vertex + 1) values, 0 marking the end of a
  // short key, so that only ties need to read the arena.
  NodeId top = 0;
  for (NodeId v : arena_) top = std::max(top, v);
  unsigned bits = 1;
  while (bits < 32 && (std::uint64_t{1} << bits) <= std::uint64_t{top} + 1) ++bits;
  const unsigned per_word = 64 / bits;
  struct Item {
    std::uint64_t hi;
    std::uint64_t lo;
    std::uint32_t index;
  };
  std::vector<Item> items(meta_.size());
  for (std::uint32_t i = 0; i < items.size(); ++i) {
    const auto k = key_of(i);
    std::uint64_t words[2] = {0, 0};
    for (unsigned w = 0; w < 2; ++w) {
      for (unsigned j = 0; j < per_word; ++j) {
        const std::size_t pos = w * per_word + j;
        words[w] = (words[w] << bits) | (pos < k.size() ? k[pos] + std::uint64_t{1} : 0);
      }
    }
    items[i] = Item{words[0], words[1], i};
  }
  const std::size_t covered = 2 * per_word;
  std::sort(items.begin(), items.end(), [this, covered](const Item& x, const Item& y) {
    if (x.hi != y.hi) return x.hi < y.hi;
    if (x.lo != y.lo) return x.lo < y.lo;
    const auto a = key_of(x.index);
    const auto b = key_of(y.index);
    if (a.size() <= covered || b.size() <= covered) return a.size() < b.size();
    return key_less(a.subspan(covered), b.subspan(covered));
  });
  order_.resize(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) order_[i] = items[i].index;
  ordered_ = true;
}

CycleSet::EntryRef CycleSet::at(std::size_t position) const {
  ensure_order();
  if (position >= order_.size()) throw DomainError("CycleSet::at: position out of range");
  return EntryRef(this, order_[position]);
}

CycleSet::const_iterator CycleSet::begin() const {
  ensure_order();
  return const_iterator(this, 0);
}

CycleSet::const_iterator CycleSet::end() const {
  ensure_order();
  return const_iterator(this, order_.size());
}

bool operator==(const CycleSet& a, const CycleSet& b) {
  if (a.size() != b.size()) return false;
  return std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) {
    return std::ranges::equal(x.vertices(), y.vertices()) && x.closing_edge() == y.closing_edge() &&
           x.source() == y.source() && x.provenance() == y.provenance();
  });
}

namespace {

void check_tree_matches(const UndirectedMultigraph& g, const SpanningTree& t) {
  if (t.graph_node_count() != g.node_count()) {
    throw DomainError("fundamental_cycles: spanning tree was built on a different graph");
  }
  for (NodeId v : t.order()) {
    const auto link = t.parent(v);
    if (!link) continue;
    if (link->via_edge >= g.edge_count()) {
      throw DomainError("fundamental_cycles: tree edge not present in graph");
    }
    const Edge& e = g.edge(link->via_edge);
    if (!((e.u == v && e.v == link->parent) || (e.v == v && e.u == link->parent))) {
      throw DomainError("fundamental_cycles: tree edge endpoints disagree with graph");
    }
  }
}

// Calls emit(path, closing_edge) for every non-tree edge of the tree's
// component whose cycle stays under max_nodes; returns the number dropped.
template <typename Emit>
std::uint64_t for_each_fundamental(const UndirectedMultigraph& g, const SpanningTree& t,
                                   std::size_t max_nodes, std::vector<NodeId>& path, Emit&& emit) {
  std::uint64_t dropped = 0;
  for (NodeId x : t.order()) {
    for (const Incidence& inc : g.incidences(x)) {
      if (inc.neighbor < x) continue;
      if (t.is_tree_edge(inc.edge, g.edge(inc.edge))) continue;
      if (!bounded_tree_path(t, x, inc.neighbor, max_nodes, path)) {
        ++dropped;
        continue;
      }
      emit(path, inc.edge);
    }
  }
  return dropped;
}

struct Shard {
  CycleSet cycles;
  EnumerationStats stats;
};

Shard enumerate_roots(const UndirectedMultigraph& g, std::span<const NodeId> roots,
                      const EnumerationOptions& opt) {
  Shard shard;
  SpanningTree tree;
  std::vector<NodeId> path;
  std::vector<NodeId> flat;
  std::vector<std::size_t> offsets;
  std::vector<EdgeId> closing;
  const std::size_t max_nodes = opt.max_length_exclusive.value_or(std::numeric_limits<std::size_t>::max());
  const CycleSource source = source_of(opt.strategy);
  for (NodeId root : roots) {
    ++shard.stats.roots;
    grow_spanning_tree(tree, g, root, opt.strategy);
    flat.clear();
    offsets.assign(1, 0);
    closing.clear();
    shard.stats.dropped_too_long +=
        for_each_fundamental(g, tree, max_nodes, path, [&](const std::vector<NodeId>& p, EdgeId e) {
          flat.insert(flat.end(), p.begin(), p.end());
          offsets.push_back(flat.size());
          closing.push_back(e);
        });
    shard.stats.emitted += closing.size();
    shard.cycles.insert_batch(flat, offsets, closing, source, Witness{root, opt.strategy});
  }
  return shard;
}

}  // namespace

std::vector<Cycle> fundamental_cycles(const UndirectedMultigraph& g, const SpanningTree& t) {
  check_tree_matches(g, t);
  std::vector<Cycle> out;
  std::vector<NodeId> path;
  const CycleSource source = source_of(t.strategy());
  for_each_fundamental(g, t, std::numeric_limits<std::size_t>::max(), path,
                       [&](const std::vector<NodeId>& p, EdgeId e) { out.push_back(Cycle{p, e, source}); });
  return out;
}

CycleSet enumerate_cycles(const UndirectedMultigraph& g, const EnumerationOptions& opt,
                          EnumerationStats* stats) {
  std::vector<NodeId> roots;
  if (opt.root_mode == RootMode::AllRoots) {
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (!g.incidences(v).empty()) roots.push_back(v);
    }
  } else {
    for (const auto& comp : connected_components(g)) {
      if (comp.size() > 1) roots.push_back(comp.front());
    }
  }

  const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(roots.size())));
  std::vector<Shard> shards(threads);
  if (threads == 1) {
    shards[0] = enumerate_roots(g, roots, opt);
  } else {
    // Strided split balances components of uneven size better than blocks.
    std::vector<std::vector<NodeId>> parts(threads);
    for (std::size_t i = 0; i < roots.size(); ++i) parts[i % threads].push_back(roots[i]);
    std::vector<std::jthread> workers;
    for (unsigned i = 0; i < threads; ++i) {
      workers.emplace_back([&, i] { shards[i] = enumerate_roots(g, parts[i], opt); });
    }
  }

  CycleSet out = std::move(shards[0].cycles);
  EnumerationStats total = shards[0].stats;
  for (unsigned i = 1; i < threads; ++i) {
    out.merge(shards[i].cycles);
    total.roots += shards[i].stats.roots;
    total.emitted += shards[i].stats.emitted;
    total.dropped_too_long += shards[i].stats.dropped_too_long;
  }
  if (stats) *stats = total;
  static_cast<void>(out.begin());  // build the key order before the set is shared
  return out;
}

CycleSet filter_by_size(const CycleSet& cs, std::size_t min_exclusive, std::size_t max_exclusive) {
  if (min_exclusive == 0 || min_exclusive >= max_exclusive) {
    throw DomainError("filter_by_size: need 0 < min_exclusive < max_exclusive (got " +
                      std::to_string(min_exclusive) + ", " + std::to_string(max_exclusive) + ")");
  }
  CycleSet out;
  cs.ensure_order();
  for (std::uint32_t i : cs.order_) {
    const std::size_t n = cs.meta_[i].length;
    if (n > min_exclusive && n < max_exclusive) out.append(cs.key_of(i), cs.meta_[i]);
  }
  // Appended in key order, so the order is the identity.
  out.table_.clear();
  out.rebuild_table(2 * out.meta_.size() + 2);
  out.order_.resize(out.meta_.size());
  for (std::uint32_t i = 0; i < out.order_.size(); ++i) out.order_[i] = i;
  out.ordered_ = true;
  return out;
}

SizeBands size_bands(const CycleSet& cs) {
  SizeBands b;
  for (const auto e : cs) {
    const std::size_t n = e.length();
    ++b.total;
    if (n == 2) ++b.length_2;
    if (n == 3) ++b.length_3;
    if (n > 3 && n < 50) ++b.over_3_under_50;
    if (n > 5 && n < 10) ++b.over_5_under_10;
    if (n >= 10 && n < 50) ++b.from_10_under_50;
    if (n >= 50) ++b.at_least_50;
    if (n >= 100) ++b.at_least_100;
    if (n >= 150) ++b.at_least_150;
    if (n >= 200) ++b.at_least_200;
    if (n >= 500) ++b.at_least_500;
  }
  return b;
}

SetDifference compare_keys(const CycleSet& a, const CycleSet& b) {
  SetDifference d;
  auto ia = a.begin();
  auto ib = b.begin();
  auto less = [](const auto& x, const auto& y) { return key_less(x.vertices(), y.vertices()); };
  while (ia != a.end() && ib != b.end()) {
    if (less(*ia, *ib)) {
      ++d.only_in_first;
      ++ia;
    } else if (less(*ib, *ia)) {
      ++d.only_in_second;
      ++ib;
    } else {
      ++ia;
      ++ib;
    }
  }
  d.only_in_first += static_cast<std::size_t>(std::distance(ia, a.end()));
  d.only_in_second += static_cast<std::size_t>(std::distance(ib, b.end()));
  return d;
}

CycleSet brute_force_simple_cycles(const UndirectedMultigraph& g) {
  const std::size_t n = g.node_count();
  if (n > kBruteForceNodeLimit) {
    throw SizeLimitError("brute_force_simple_cycles: " + std::to_string(n) + " nodes exceeds limit of " +
                         std::to_string(kBruteForceNodeLimit));
  }
  // Simple-graph view: smallest edge id per unordered pair, plus multiplicity.
  std::vector<std::vector<std::pair<NodeId, EdgeId>>> nbrs(n);
  std::vector<std::vector<int>> mult(n, std::vector<int>(n, 0));
  for (const Edge& e : g.edges()) {
    if (mult[e.u][e.v]++ == 0) {
      nbrs[e.u].emplace_back(e.v, e.id);
      nbrs[e.v].emplace_back(e.u, e.id);
    }
    mult[e.v][e.u] = mult[e.u][e.v];
  }
  for (auto& l : nbrs) std::sort(l.begin(), l.end());

  CycleSet out;
  for (const Edge& e : g.edges()) {
    if (mult[e.u][e.v] >= 2) out.insert(Cycle{{e.u, e.v}, e.id, CycleSource::Oracle});
  }

  std::vector<NodeId> path;
  std::vector<bool> on_path(n, false);
  // Cycles whose smallest vertex is `start`: extend through larger vertices only.
  auto extend = [&](auto&& self, NodeId start, NodeId x) -> void {
    for (const auto& [y, eid] : nbrs[x]) {
      if (y == start && path.size() >= 3) {
        out.insert(Cycle{path, eid, CycleSource::Oracle});
      } else if (y > start && !on_path[y]) {
        on_path[y] = true;
        path.push_back(y);
        self(self, start, y);
        path.pop_back();
        on_path[y] = false;
      }
    }
  };
  for (NodeId s = 0; s < n; ++s) {
    path.assign(1, s);
    on_path[s] = true;
    extend(extend, s, s);
    on_path[s] = false;
  }
  static_cast<void>(out.begin());
  return out;
}

}  // namespace fraudring
