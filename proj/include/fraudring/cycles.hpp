#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <iterator>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fraudring/graph.hpp"

namespace fraudring {

enum class CycleSource { BreadthFirst, DepthFirst, Oracle };

[[nodiscard]] std::string_view to_string(CycleSource s);
[[nodiscard]] CycleSource source_of(TraversalStrategy s);

/// Simple cycle as a closed vertex walk; the last vertex links back to the
/// first. A length-2 cycle is a pair of parallel edges.
struct Cycle {
  std::vector<NodeId> vertices;
  EdgeId closing_edge = 0;
  CycleSource source = CycleSource::Oracle;

  [[nodiscard]] std::size_t length() const { return vertices.size(); }
};

/// Rotation- and reflection-minimal vertex sequence of a cycle.
struct CanonicalKey {
  std::vector<NodeId> seq;

  friend auto operator<=>(const CanonicalKey&, const CanonicalKey&) = default;
};

[[nodiscard]] CanonicalKey canonical_key(std::span<const NodeId> vertices);
/// Allocation-free variant writing into `out`.
void canonicalize_into(std::span<const NodeId> vertices, std::vector<NodeId>& out);

enum class RootMode { AllRoots, SingleRootPerComponent };

[[nodiscard]] std::string_view to_string(RootMode m);
[[nodiscard]] std::optional<RootMode> parse_root_mode(std::string_view s);

/// A (root, strategy) pair whose spanning tree produced a cycle.
struct Witness {
  NodeId root = 0;
  TraversalStrategy strategy = TraversalStrategy::BreadthFirst;

  friend auto operator<=>(const Witness&, const Witness&) = default;
};

/// Witnesses for one cycle. Only the kMaxWitnesses smallest are kept inline;
/// `count` is the number of times the cycle was emitted.
class Provenance {
 public:
  static constexpr std::size_t kMaxWitnesses = 4;

  void add(const Witness& w);
  void merge(const Provenance& other);

  /// Ascending.
  [[nodiscard]] std::vector<Witness> witnesses() const;
  [[nodiscard]] std::optional<Witness> smallest() const;
  [[nodiscard]] std::size_t witness_count() const { return stored_; }
  [[nodiscard]] std::uint64_t count() const { return count_; }

  friend bool operator==(const Provenance& a, const Provenance& b) {
    return a.count_ == b.count_ && a.stored_ == b.stored_ &&
           std::equal(a.slots_.begin(), a.slots_.begin() + a.stored_, b.slots_.begin());
  }

 private:
  // root << 1 | strategy, so packed order equals Witness order.
  std::array<std::uint32_t, kMaxWitnesses> slots_{};
  std::uint32_t stored_ = 0;
  std::uint64_t count_ = 0;
};

/// Deduplicated cycles keyed by canonical vertex order.
///
/// Vertices live in one flat arena with a hash index over canonical keys.
/// Iteration is in ascending key order; the order is built on first
/// iteration after a mutation, so iterate once before sharing a set between
/// threads (sets returned by this module are already ordered).
class CycleSet {
 public:
  class EntryRef {
   public:
    [[nodiscard]] std::span<const NodeId> vertices() const;
    [[nodiscard]] std::size_t length() const;
    [[nodiscard]] EdgeId closing_edge() const;
    [[nodiscard]] CycleSource source() const;
    [[nodiscard]] const Provenance& provenance() const;
    [[nodiscard]] Cycle cycle() const;
    [[nodiscard]] CanonicalKey key() const { return CanonicalKey{{vertices().begin(), vertices().end()}}; }

   private:
    friend class CycleSet;
    EntryRef(const CycleSet* set, std::uint32_t index) : set_(set), index_(index) {}
    const CycleSet* set_;
    std::uint32_t index_;
  };

  class const_iterator {
   public:
    using value_type = EntryRef;
    using difference_type = std::ptrdiff_t;
    using iterator_category = std::forward_iterator_tag;

    const_iterator() = default;
    EntryRef operator*() const { return EntryRef(set_, set_->order_[pos_]); }
    const_iterator& operator++() {
      ++pos_;
      return *this;
    }
    const_iterator operator++(int) {
      auto old = *this;
      ++pos_;
      return old;
    }
    friend bool operator==(const const_iterator& a, const const_iterator& b) { return a.pos_ == b.pos_; }

   private:
    friend class CycleSet;
    const_iterator(const CycleSet* set, std::size_t pos) : set_(set), pos_(pos) {}
    const CycleSet* set_ = nullptr;
    std::size_t pos_ = 0;
  };

  /// Inserts a cycle (any rotation/orientation). Returns true when new.
  bool insert(const Cycle& c, std::optional<Witness> witness = std::nullopt);
  bool insert(std::span<const NodeId> vertices, EdgeId closing_edge, CycleSource source,
              std::optional<Witness> witness = std::nullopt);
  /// Inserts cycle i = flat[offsets[i] .. offsets[i + 1]) closed by
  /// closing_edges[i], all with one source and witness. Same result as
  /// inserting them one by one, but overlaps the memory accesses.
  void insert_batch(std::span<const NodeId> flat, std::span<const std::size_t> offsets,
                    std::span<const EdgeId> closing_edges, CycleSource source,
                    std::optional<Witness> witness = std::nullopt);
  /// Union; provenance of shared keys is merged.
  void merge(const CycleSet& other);

  [[nodiscard]] bool contains(std::span<const NodeId> vertices) const { return find(vertices).has_value(); }
  [[nodiscard]] bool contains(const CanonicalKey& key) const { return contains(std::span<const NodeId>(key.seq)); }
  [[nodiscard]] std::optional<EntryRef> find(std::span<const NodeId> vertices) const;

  [[nodiscard]] std::size_t size() const { return meta_.size(); }
  [[nodiscard]] bool empty() const { return meta_.empty(); }
  /// Entry at `position` in key order.
  [[nodiscard]] EntryRef at(std::size_t position) const;
  [[nodiscard]] const_iterator begin() const;
  [[nodiscard]] const_iterator end() const;

  friend bool operator==(const CycleSet& a, const CycleSet& b);
  friend CycleSet filter_by_size(const CycleSet& cs, std::size_t min_exclusive, std::size_t max_exclusive);

 private:
  struct Meta {
    std::uint64_t offset;
    std::uint32_t length;
    EdgeId closing_edge;
    CycleSource source;
    Provenance provenance;
  };

  // Index of the canonical key in meta_, or nullopt.
  [[nodiscard]] std::optional<std::uint32_t> lookup(std::span<const NodeId> key, std::uint64_t hash) const;
  void upsert(std::span<const NodeId> key, EdgeId closing_edge, CycleSource source,
              const Provenance& provenance, bool* inserted);
  void upsert_hashed(std::span<const NodeId> key, std::uint64_t hash, EdgeId closing_edge,
                     CycleSource source, const Provenance& provenance, bool* inserted);
  // Appends a key known to be absent; the caller rebuilds the table.
  void append(std::span<const NodeId> key, const Meta& meta);
  void rebuild_table(std::size_t capacity);
  void place(std::uint64_t cell);
  void ensure_order() const;
  [[nodiscard]] std::span<const NodeId> key_of(std::uint32_t index) const {
    const Meta& m = meta_[index];
    return std::span<const NodeId>(arena_).subspan(m.offset, m.length);
  }

  std::vector<NodeId> arena_;
  std::vector<Meta> meta_;
  // High 32 bits: hash tag; low 32 bits: meta index + 1, 0 is empty.
  std::vector<std::uint64_t> table_;
  unsigned table_shift_ = 64;
  std::vector<NodeId> scratch_;
  std::vector<NodeId> batch_keys_;
  std::vector<std::uint64_t> batch_hashes_;
  mutable std::vector<std::uint32_t> order_;
  mutable bool ordered_ = true;
};

/// One cycle per non-tree edge of the tree's component: the tree path
/// between the edge's endpoints closed by that edge. Emits exactly
/// (component edges) - (component nodes) + 1 cycles.
[[nodiscard]] std::vector<Cycle> fundamental_cycles(const UndirectedMultigraph& g,
                                                    const SpanningTree& t);

struct EnumerationOptions {
  TraversalStrategy strategy = TraversalStrategy::BreadthFirst;
  RootMode root_mode = RootMode::AllRoots;
  /// When set, cycles with at least this many vertices are dropped as soon as
  /// the tree walk proves it, without being materialized.
  std::optional<std::size_t> max_length_exclusive;
  unsigned threads = 1;
};

struct EnumerationStats {
  std::uint64_t roots = 0;
  std::uint64_t emitted = 0;           // fundamental cycles materialized (with repeats)
  std::uint64_t dropped_too_long = 0;  // emissions cut by max_length_exclusive

  friend bool operator==(const EnumerationStats&, const EnumerationStats&) = default;
};

/// Union of fundamental cycles over the chosen roots, deduplicated.
/// AllRoots uses every node as a root; SingleRootPerComponent roots each
/// component at its smallest node id. Output is independent of `threads`.
[[nodiscard]] CycleSet enumerate_cycles(const UndirectedMultigraph& g,
                                        const EnumerationOptions& options,
                                        EnumerationStats* stats = nullptr);

/// Keeps cycles with min_exclusive < length < max_exclusive.
[[nodiscard]] CycleSet filter_by_size(const CycleSet& cs, std::size_t min_exclusive = 3,
                                      std::size_t max_exclusive = 50);

/// Cycle-length histogram in the bands used for reporting.
struct SizeBands {
  std::size_t total = 0;
  std::size_t length_2 = 0;       // parallel-edge pairs
  std::size_t length_3 = 0;
  std::size_t over_3_under_50 = 0;
  std::size_t over_5_under_10 = 0;
  std::size_t from_10_under_50 = 0;
  std::size_t at_least_50 = 0;
  std::size_t at_least_100 = 0;
  std::size_t at_least_150 = 0;
  std::size_t at_least_200 = 0;
  std::size_t at_least_500 = 0;

  friend bool operator==(const SizeBands&, const SizeBands&) = default;
};

[[nodiscard]] SizeBands size_bands(const CycleSet& cs);

struct SetDifference {
  std::size_t only_in_first = 0;
  std::size_t only_in_second = 0;
  [[nodiscard]] std::size_t symmetric() const { return only_in_first + only_in_second; }

  friend bool operator==(const SetDifference&, const SetDifference&) = default;
};

[[nodiscard]] SetDifference compare_keys(const CycleSet& a, const CycleSet& b);

inline constexpr std::size_t kBruteForceNodeLimit = 16;

/// Every simple cycle of `g` by exhaustive path extension (test oracle).
/// Includes length-2 cycles for parallel pairs. Refuses graphs above
/// kBruteForceNodeLimit nodes with SizeLimitError.
[[nodiscard]] CycleSet brute_force_simple_cycles(const UndirectedMultigraph& g);

}  // namespace fraudring
