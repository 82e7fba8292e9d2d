#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fraudring {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
  NodeId u;
  NodeId v;
  EdgeId id;

  [[nodiscard]] NodeId other(NodeId x) const { return x == u ? v : u; }
};

struct Incidence {
  NodeId neighbor;
  EdgeId edge;

  friend bool operator==(const Incidence&, const Incidence&) = default;
};

/// Bijection between dense node ids and external driver keys.
class NodeRegistry {
 public:
  /// Returns the id of `key`, registering it if unseen.
  NodeId intern(std::string_view key);
  [[nodiscard]] std::optional<NodeId> find(std::string_view key) const;
  [[nodiscard]] const std::string& key(NodeId id) const;
  [[nodiscard]] std::size_t size() const { return keys_.size(); }

 private:
  std::vector<std::string> keys_;
  std::unordered_map<std::string, NodeId> ids_;
};

/// Immutable undirected multigraph. Self-loops are never present, parallel
/// edges are. Adjacency is stored in CSR form with each node's incidences
/// sorted by (neighbor, edge id).
class UndirectedMultigraph {
 public:
  UndirectedMultigraph() = default;

  /// Test/utility constructor: nodes are keyed by their decimal id.
  static UndirectedMultigraph from_edges(std::size_t node_count,
                                         std::span<const std::pair<NodeId, NodeId>> edges);

  [[nodiscard]] std::size_t node_count() const { return registry_.size(); }
  [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
  [[nodiscard]] bool contains(NodeId v) const { return v < node_count(); }

  [[nodiscard]] std::span<const Edge> edges() const { return edges_; }
  [[nodiscard]] const Edge& edge(EdgeId e) const;
  [[nodiscard]] std::span<const Incidence> incidences(NodeId v) const;

  [[nodiscard]] const NodeRegistry& registry() const { return registry_; }
  [[nodiscard]] const std::string& key(NodeId v) const { return registry_.key(v); }

 private:
  friend class GraphBuilder;

  NodeRegistry registry_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Incidence> adjacency_;
};

/// Single-writer construction of an UndirectedMultigraph.
class GraphBuilder {
 public:
  NodeId add_node(std::string_view key) { return registry_.intern(key); }
  /// Adds an undirected edge; throws DomainError on a self-loop or unknown id.
  EdgeId add_edge(NodeId u, NodeId v);
  [[nodiscard]] std::size_t node_count() const { return registry_.size(); }

  [[nodiscard]] UndirectedMultigraph finalize() &&;

 private:
  NodeRegistry registry_;
  std::vector<Edge> edges_;
};

/// Number of edge endpoints at `v`; parallel edges count with multiplicity.
[[nodiscard]] std::size_t degree(const UndirectedMultigraph& g, NodeId v);

/// Maximal connected node sets, each sorted ascending, ordered by smallest member.
[[nodiscard]] std::vector<std::vector<NodeId>> connected_components(const UndirectedMultigraph& g);

enum class TraversalStrategy { BreadthFirst, DepthFirst };

[[nodiscard]] std::string_view to_string(TraversalStrategy s);
/// Accepts "bfs"/"dfs" and "breadth-first"/"depth-first".
[[nodiscard]] std::optional<TraversalStrategy> parse_strategy(std::string_view s);

struct TreeLink {
  NodeId parent;
  EdgeId via_edge;
};

/// Spanning tree of the root's connected component.
///
/// Storage is sized to the whole graph so one instance can be regrown from
/// many roots; regrowing only clears the nodes the previous tree covered.
class SpanningTree {
 public:
  SpanningTree() = default;

  [[nodiscard]] NodeId root() const { return root_; }
  [[nodiscard]] TraversalStrategy strategy() const { return strategy_; }
  [[nodiscard]] bool covers(NodeId v) const { return v < depth_.size() && depth_[v] >= 0; }
  /// Absent for the root and for uncovered nodes.
  [[nodiscard]] std::optional<TreeLink> parent(NodeId v) const;
  /// -1 for uncovered nodes.
  [[nodiscard]] std::int32_t depth(NodeId v) const { return depth_.at(v); }
  /// Covered nodes in discovery order (BFS order or DFS preorder).
  [[nodiscard]] std::span<const NodeId> order() const { return order_; }
  [[nodiscard]] std::size_t graph_node_count() const { return depth_.size(); }
  [[nodiscard]] bool is_tree_edge(EdgeId e, const Edge& edge) const {
    return (covers(edge.u) && parent_edge_[edge.u] == e) || (covers(edge.v) && parent_edge_[edge.v] == e);
  }

 private:
  friend void grow_spanning_tree(SpanningTree&, const UndirectedMultigraph&, NodeId,
                                 TraversalStrategy);
  friend bool bounded_tree_path(const SpanningTree&, NodeId, NodeId, std::size_t, std::vector<NodeId>&);

  NodeId root_ = 0;
  TraversalStrategy strategy_ = TraversalStrategy::BreadthFirst;
  std::vector<NodeId> parent_node_;
  std::vector<EdgeId> parent_edge_;
  std::vector<std::int32_t> depth_;
  std::vector<NodeId> order_;
  // DFS scratch: per-node cursor into its incidence list.
  std::vector<std::size_t> cursor_;
};

/// Builds the BFS or DFS tree of `root`'s component. Neighbors are visited in
/// ascending (neighbor id, edge id) order.
[[nodiscard]] SpanningTree spanning_tree(const UndirectedMultigraph& g, NodeId root,
                                         TraversalStrategy strategy);

/// Regrows `tree` in place from a new root, reusing its storage.
void grow_spanning_tree(SpanningTree& tree, const UndirectedMultigraph& g, NodeId root,
                        TraversalStrategy strategy);

/// Unique tree path u .. v (both inclusive) through the lowest common ancestor.
[[nodiscard]] std::vector<NodeId> tree_path(const SpanningTree& t, NodeId u, NodeId v);

/// Like tree_path but gives up (returns false) once the path would reach
/// `max_nodes` vertices. On success `out` holds the path.
bool bounded_tree_path(const SpanningTree& t, NodeId u, NodeId v, std::size_t max_nodes,
                       std::vector<NodeId>& out);

struct InducedSubgraph {
  std::vector<NodeId> nodes;  // sorted, unique
  std::vector<EdgeId> edges;  // sorted
};

/// Edges of `g` with both endpoints in `nodes`. Cost is proportional to the
/// summed degree of `nodes`, not to the graph size.
[[nodiscard]] InducedSubgraph induced_subgraph(const UndirectedMultigraph& g,
                                               std::span<const NodeId> nodes);

}  // namespace fraudring
