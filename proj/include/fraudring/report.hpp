#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fraudring/community.hpp"
#include "fraudring/cycles.hpp"
#include "fraudring/ingestion.hpp"
#include "fraudring/scoring.hpp"

namespace fraudring {

struct IngestionStats {
  ParseReport parse;
  std::size_t collisions = 0;
  DegreeSummary before_pruning;
  std::size_t components_before = 0;
  DegreeSummary after_pruning;
  std::size_t components_after = 0;

  friend bool operator==(const IngestionStats&, const IngestionStats&) = default;
};

struct EnumerationSummary {
  TraversalStrategy strategy = TraversalStrategy::BreadthFirst;
  RootMode root_mode = RootMode::AllRoots;
  /// Cap used while enumerating; longer cycles are not materialized, so the
  /// bands at or above it read 0.
  std::optional<std::size_t> max_length_exclusive;
  EnumerationStats stats;
  SizeBands bands;
  /// Cycles kept by the size filter.
  std::size_t filtered = 0;

  friend bool operator==(const EnumerationSummary&, const EnumerationSummary&) = default;
};

/// Filtered cycle sets of the two strategies under the same root mode.
struct CrossCheck {
  TraversalStrategy first = TraversalStrategy::BreadthFirst;
  TraversalStrategy second = TraversalStrategy::DepthFirst;
  std::size_t first_count = 0;
  std::size_t second_count = 0;
  SetDifference difference;

  [[nodiscard]] bool identical() const { return difference.symmetric() == 0; }
  friend bool operator==(const CrossCheck&, const CrossCheck&) = default;
};

struct RankedEntry {
  std::size_t rank = 0;  // 1-based
  std::size_t cycle_id = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  double density = 0.0;
  double score = 0.0;
  std::vector<std::string> node_keys;  // canonical cycle order
  std::vector<RawValue> raw_values;
  std::vector<int> flags;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

/// Wall-clock and environment facts; kept apart so the rest of the report is
/// byte-identical across runs.
struct RunMetadata {
  std::string started_at;  // UTC, ISO 8601
  unsigned threads = 1;
  std::map<std::string, double> stage_seconds;

  friend bool operator==(const RunMetadata&, const RunMetadata&) = default;
};

struct RunReport {
  std::string input;
  std::size_t min_exclusive = 3;
  std::size_t max_exclusive = 50;
  std::vector<Indicator> indicators;
  IngestionStats ingestion;
  /// Primary strategy first, then the cross-check strategy if run.
  std::vector<EnumerationSummary> enumerations;
  std::optional<CrossCheck> cross_check;
  std::size_t cycle_count = 0;
  /// Top `ranked.size()` of `cycle_count` ranked cycles.
  std::vector<RankedEntry> ranked;
  std::optional<ComparisonReport> comparison;
  RunMetadata metadata;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

/// Throws DomainError when counts contradict each other (e.g. more nodes
/// after pruning than before).
void check_consistency(const RunReport& report);

/// Pretty-printed JSON. Raw values that are unavailable are written as null.
void write_report_json(std::ostream& out, const RunReport& report, bool include_metadata);
void write_metadata_json(std::ostream& out, const RunMetadata& metadata);
/// Inverse of write_report_json; a missing metadata block reads as default.
[[nodiscard]] RunReport read_report_json(std::istream& in);

/// Short human-readable summary: ingestion, cycle bands, cross-check, baselines.
void write_summary(std::ostream& out, const RunReport& report);

}  // namespace fraudring
