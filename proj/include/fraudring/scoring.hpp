#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fraudring/cycles.hpp"
#include "fraudring/graph.hpp"
#include "fraudring/ingestion.hpp"

namespace fraudring {

enum class IndicatorKind {
  InducedDensity,      // 2m / (n(n-1)) on the group's induced subgraph
  ChordCount,          // m - n
  RepeatPairCount,     // node pairs joined by two or more internal edges
  MeanExternalDegree,  // mean count of edges leaving the group, per node
  SizeBandScore,       // 1 when 4 <= n <= 20, else 0
  TemporalSpanDays,    // max - min collision date over internal edges
  External,            // supplied by ScoringContext::external
};

enum class Direction { HigherSuspicious, LowerSuspicious };

[[nodiscard]] std::string_view to_string(IndicatorKind k);
[[nodiscard]] std::string_view to_string(Direction d);
[[nodiscard]] std::optional<IndicatorKind> parse_indicator_kind(std::string_view s);
[[nodiscard]] std::optional<Direction> parse_direction(std::string_view s);

struct Indicator {
  std::string id;
  IndicatorKind kind = IndicatorKind::InducedDensity;
  Direction direction = Direction::HigherSuspicious;
  double threshold = 0.0;
  double weight = 1.0;

  friend bool operator==(const Indicator&, const Indicator&) = default;
};

/// Throws DomainError on a negative/non-finite weight or a duplicate id.
void validate_registry(std::span<const Indicator> registry);

/// Built-in indicators with their default thresholds and unit weights.
[[nodiscard]] std::vector<Indicator> default_registry();

/// Raw indicator value; nullopt means "unavailable" (never flags).
using RawValue = std::optional<double>;

/// Everything measure() may read besides the group itself.
struct ScoringContext {
  const UndirectedMultigraph* graph = nullptr;
  /// Per-edge collision dates; may be empty.
  std::span<const std::optional<Date>> edge_dates;
  /// Source for External indicators: (indicator, sorted group nodes) -> value.
  std::function<RawValue(const Indicator&, std::span<const NodeId>)> external;

  explicit ScoringContext(const UndirectedMultigraph& g) : graph(&g) {}
  explicit ScoringContext(const CollisionNetwork& net) : graph(&net.graph), edge_dates(net.edge_date) {}
};

/// Structural facts about a node group shared by all indicators.
struct GroupProfile {
  std::vector<NodeId> nodes;  // sorted
  std::vector<EdgeId> internal_edges;
  std::size_t n = 0;
  std::size_t m = 0;
  double density = 0.0;
};

[[nodiscard]] GroupProfile profile_group(const UndirectedMultigraph& g, std::span<const NodeId> nodes);

/// 2m / (n(n-1)); 0 for fewer than two nodes.
[[nodiscard]] double induced_density(std::size_t n, std::size_t m);

[[nodiscard]] RawValue measure(const Indicator& ind, const GroupProfile& group,
                               const ScoringContext& ctx);
[[nodiscard]] RawValue measure(const Indicator& ind, const Cycle& c, const ScoringContext& ctx);

/// 1 when the raw value is on the suspicious side of the threshold (inclusive).
[[nodiscard]] int flag(const Indicator& ind, RawValue raw);

struct CycleAssessment {
  CanonicalKey cycle_key;
  std::size_t n = 0;
  std::size_t m = 0;
  double density = 0.0;
  /// Only possible through parallel edges; reported, not clamped.
  bool density_above_simple_bound = false;
  std::vector<RawValue> raw_values;
  std::vector<int> flags;
  double score = 0.0;
};

/// Weighted score: sum of weight_i * flag_i.
[[nodiscard]] double weighted_score(std::span<const Indicator> registry, std::span<const int> flags);

/// Assesses an arbitrary node group (used for cycles and for communities).
[[nodiscard]] CycleAssessment score_group(std::span<const Indicator> registry,
                                          std::span<const NodeId> nodes, const ScoringContext& ctx);
[[nodiscard]] CycleAssessment score(std::span<const Indicator> registry, const Cycle& c,
                                    const ScoringContext& ctx);
[[nodiscard]] CycleAssessment score(std::span<const Indicator> registry,
                                    std::span<const NodeId> cycle_vertices, const ScoringContext& ctx);

/// Descending score, then descending density, then ascending cycle key.
[[nodiscard]] std::vector<CycleAssessment> rank(std::vector<CycleAssessment> assessments);

/// Assesses every cycle of the set (parallel over `threads`), keeping set order.
[[nodiscard]] std::vector<CycleAssessment> score_all(std::span<const Indicator> registry,
                                                     const CycleSet& cycles,
                                                     const ScoringContext& ctx, unsigned threads = 1);

/// Compact per-cycle result for large sets; `cycle_id` is the position of
/// the cycle in the set's key order.
struct ScoreSummary {
  std::uint32_t cycle_id = 0;
  std::uint32_t n = 0;
  std::uint32_t m = 0;
  double density = 0.0;
  double score = 0.0;

  friend bool operator==(const ScoreSummary&, const ScoreSummary&) = default;
};

[[nodiscard]] std::vector<ScoreSummary> score_summaries(std::span<const Indicator> registry,
                                                        const CycleSet& cycles,
                                                        const ScoringContext& ctx, unsigned threads = 1);

/// Same order as rank(): key order and cycle id order coincide.
void rank_summaries(std::vector<ScoreSummary>& summaries);

}  // namespace fraudring
