#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fraudring/cycles.hpp"
#include "fraudring/graph.hpp"
#include "fraudring/scoring.hpp"

namespace fraudring {

using CommunityId = std::uint32_t;

/// Total node -> community assignment with dense ids 0..k-1.
struct Partition {
  std::vector<CommunityId> assignment;
  std::size_t community_count = 0;

  /// Relabels arbitrary labels densely in order of first appearance.
  template <typename Label>
  static Partition from_labels(std::span<const Label> labels);

  [[nodiscard]] std::vector<std::vector<NodeId>> members() const;
};

/// Throws DomainError unless the partition covers exactly `node_count` nodes
/// with dense ids.
void validate_partition(const Partition& p, std::size_t node_count);

/// Newman modularity, parallel edges counted with multiplicity.
/// Throws DomainError on an edgeless graph.
[[nodiscard]] double modularity(const UndirectedMultigraph& g, const Partition& p);

enum class CommunityAlgorithm { Multilevel, FastGreedy };

[[nodiscard]] std::string_view to_string(CommunityAlgorithm a);
[[nodiscard]] std::optional<CommunityAlgorithm> parse_community_algorithm(std::string_view s);

struct CommunityResult {
  Partition partition;
  double modularity = 0.0;
  /// Multilevel: Q of the singleton start, then after every aggregation pass.
  std::vector<double> pass_modularity;
  /// FastGreedy: modularity gain of every accepted merge, in order.
  std::vector<double> merge_gains;
  /// Adjacent community pairs merged afterwards because the merge leaves Q
  /// exactly unchanged (equal-Q ties go to the coarser partition).
  std::size_t tie_merges = 0;
};

/// Multilevel: local moves in ascending node order plus aggregation until no
/// move improves Q. FastGreedy: repeatedly merge the pair of communities with
/// the largest positive gain. Both then merge adjacent communities whose
/// union has exactly zero gain. Both are deterministic.
[[nodiscard]] CommunityResult detect_communities(const UndirectedMultigraph& g,
                                                 CommunityAlgorithm algorithm);

/// Reads `node_external_key,community_id` (header required). Keys unknown to
/// the graph are skipped and counted; graph nodes missing from the file are
/// an error.
[[nodiscard]] Partition read_partition(std::istream& in, const UndirectedMultigraph& g,
                                       std::size_t* unknown_keys = nullptr);
void write_partition(std::ostream& out, const UndirectedMultigraph& g, const Partition& p);

struct PairRow {
  std::string algorithm;
  CommunityId community_id = 0;
  std::size_t community_size = 0;
  double community_score = 0.0;
  std::size_t cycle_id = 0;  // position of the cycle in key order
  std::size_t cycle_size = 0;
  double cycle_score = 0.0;

  friend bool operator==(const PairRow&, const PairRow&) = default;
};

struct GroupCount {
  std::string algorithm;
  std::size_t communities = 0;
  double modularity = 0.0;
  /// Cycles wholly inside their majority community.
  std::size_t paired_cycles = 0;
  /// Cycles whose majority community does not contain all of their nodes.
  std::size_t split_cycles = 0;
  /// Means over paired cycles; 0 when there are none.
  double mean_cycle_score = 0.0;
  double mean_community_score = 0.0;

  friend bool operator==(const GroupCount&, const GroupCount&) = default;
};

struct ComparisonReport {
  std::size_t cycle_count = 0;
  std::vector<GroupCount> group_counts;
  std::vector<PairRow> pairs;
  /// Pair rows counted in the means but not kept in `pairs`.
  std::size_t pairs_omitted = 0;

  friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

struct CompareOptions {
  unsigned threads = 1;
  /// Keep at most this many pair rows (lowest cycle ids first, per algorithm
  /// in map order).
  std::optional<std::size_t> max_pair_rows;
  /// Precomputed cycle scores in key order; computed when empty.
  std::span<const double> cycle_scores;
};

/// Pairs each cycle with its majority community (ties: smallest id) under
/// every partition, scoring both with the same registry. Rows are emitted only
/// when the community contains the whole cycle. Throws DomainError when a
/// partition or cycle does not fit the context graph.
[[nodiscard]] ComparisonReport compare(const CycleSet& cycles,
                                       const std::map<std::string, Partition>& partitions,
                                       std::span<const Indicator> registry,
                                       const ScoringContext& ctx, const CompareOptions& options = {});

void write_comparison_csv(std::ostream& out, const ComparisonReport& report);

template <typename Label>
Partition Partition::from_labels(std::span<const Label> labels) {
  Partition p;
  std::map<Label, CommunityId> dense;
  p.assignment.reserve(labels.size());
  for (const Label& l : labels) {
    auto [it, inserted] = dense.try_emplace(l, static_cast<CommunityId>(dense.size()));
    p.assignment.push_back(it->second);
  }
  p.community_count = dense.size();
  return p;
}

}  // namespace fraudring
