#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fraudring/graph.hpp"

namespace fraudring {

using Date = std::chrono::sys_days;

/// Parses a strict ISO 8601 calendar date (YYYY-MM-DD).
[[nodiscard]] std::optional<Date> parse_date(std::string_view text);
[[nodiscard]] std::string format_date(Date d);

struct CollisionRecord {
  std::string collision_id;
  std::vector<std::string> driver_keys;  // pairwise distinct, first-seen order
  std::optional<Date> occurred_on;
};

struct CollisionDataset {
  std::vector<CollisionRecord> records;  // unique collision ids, first-seen order
};

/// Row-level bookkeeping from parse_collisions.
struct ParseReport {
  std::uint64_t rows = 0;              // data rows read (header excluded)
  std::uint64_t accepted = 0;          // rows that contributed a driver
  std::uint64_t missing_driver = 0;    // empty driver_id
  std::uint64_t malformed = 0;         // wrong field count, empty collision_id, bad quoting
  std::uint64_t bad_date = 0;          // unparseable date; row kept, date dropped
  std::uint64_t duplicate_pairs = 0;   // repeated (collision_id, driver_id)

  friend bool operator==(const ParseReport&, const ParseReport&) = default;
};

struct ParsedCollisions {
  CollisionDataset dataset;
  ParseReport report;
};

inline constexpr std::string_view kCollisionHeader = "collision_id,driver_id,vehicle_id,date";

/// Reads the collision CSV (header `collision_id,driver_id,vehicle_id,date`).
/// Throws IoError on a stream failure and FormatError on a bad header.
[[nodiscard]] ParsedCollisions parse_collisions(std::istream& in);
[[nodiscard]] ParsedCollisions parse_collisions_file(const std::string& path);

/// Writes a dataset back in the ingestion CSV format (vehicle_id left empty).
void write_collisions(std::ostream& out, const CollisionDataset& ds);

/// Driver network plus per-edge provenance side tables.
struct CollisionNetwork {
  UndirectedMultigraph graph;
  std::vector<std::string> edge_collision;         // indexed by EdgeId
  std::vector<std::optional<Date>> edge_date;      // indexed by EdgeId
};

/// One node per driver, one edge per driver pair per collision.
[[nodiscard]] CollisionNetwork build_collision_network(const CollisionDataset& ds);

struct PrunedGraph {
  UndirectedMultigraph graph;
  std::vector<NodeId> original_node;  // new id -> id in the input graph
  std::vector<EdgeId> original_edge;  // new id -> id in the input graph
};

/// 2-core: repeatedly removes nodes of degree 0 or 1 until none remain.
/// Surviving nodes and edges keep their relative order.
[[nodiscard]] PrunedGraph prune_to_cycle_core(const UndirectedMultigraph& g);

/// prune_to_cycle_core with the side tables carried along.
[[nodiscard]] CollisionNetwork prune_network(const CollisionNetwork& net);

struct DegreeSummary {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t min_degree = 0;
  std::size_t max_degree = 0;

  friend bool operator==(const DegreeSummary&, const DegreeSummary&) = default;
};

[[nodiscard]] DegreeSummary summarize(const UndirectedMultigraph& g);

}  // namespace fraudring
