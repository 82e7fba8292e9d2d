#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fraudring/cycles.hpp"
#include "fraudring/graph.hpp"
#include "fraudring/ingestion.hpp"
#include "fraudring/report.hpp"
#include "fraudring/scoring.hpp"

namespace fraudring {

inline constexpr const char* kRankedHeader = "rank,cycle_id,n,m,density,score,node_external_keys";
inline constexpr const char* kCyclesHeader = "cycle_id,length,node_external_keys";

/// Node keys joined by ';'.
[[nodiscard]] std::string join_keys(const UndirectedMultigraph& g, std::span<const NodeId> nodes);

/// Ranked CSV from ranked summaries over `cycles` (ids are key-order positions).
void write_ranked_csv(std::ostream& out, std::span<const ScoreSummary> ranked, const CycleSet& cycles,
                      const UndirectedMultigraph& g);
/// Ranked CSV from report rows.
void write_ranked_csv(std::ostream& out, std::span<const RankedEntry> ranked);

/// Cycle file: one canonical cycle per row in key order.
void write_cycles_csv(std::ostream& out, const CycleSet& cycles, const UndirectedMultigraph& g);
/// Reads a cycle file against `g`. Throws FormatError on a bad header or row
/// and DomainError when a key is unknown or consecutive nodes are not adjacent.
[[nodiscard]] CycleSet read_cycles_csv(std::istream& in, const UndirectedMultigraph& g);

/// A node group's induced subgraph ready for GraphML/DOT.
struct ComponentView {
  std::string name;
  std::vector<std::string> node_keys;
  /// Whether the node belongs to the scored group.
  std::vector<bool> score_member;
  struct EdgeView {
    std::size_t source = 0;  // index into node_keys
    std::size_t target = 0;
    std::string collision_id;
  };
  std::vector<EdgeView> edges;
  double score = 0.0;
};

/// Induced subgraph of `members` in `net`, every node flagged as a member.
[[nodiscard]] ComponentView component_view(const CollisionNetwork& net, std::span<const NodeId> members,
                                           std::string name, double score);

void write_graphml(std::ostream& out, const ComponentView& view);
void write_dot(std::ostream& out, const ComponentView& view);

}  // namespace fraudring
