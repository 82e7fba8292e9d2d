#include "fraudring/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "fraudring/error.hpp"

namespace fraudring {

namespace {

constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();

void require_node(const UndirectedMultigraph& g, NodeId v, const char* what) {
  if (!g.contains(v)) {
    throw DomainError(std::string(what) + ": node id " + std::to_string(v) + " out of range (" +
                      std::to_string(g.node_count()) + " nodes)");
  }
}

}  // namespace

NodeId NodeRegistry::intern(std::string_view key) {
  auto it = ids_.find(std::string(key));
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<NodeId>(keys_.size());
  keys_.emplace_back(key);
  ids_.emplace(keys_.back(), id);
  return id;
}

std::optional<NodeId> NodeRegistry::find(std::string_view key) const {
  auto it = ids_.find(std::string(key));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& NodeRegistry::key(NodeId id) const {
  if (id >= keys_.size()) throw DomainError("registry: unknown node id " + std::to_string(id));
  return keys_[id];
}

UndirectedMultigraph UndirectedMultigraph::from_edges(
    std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges) {
  GraphBuilder b;
  for (std::size_t i = 0; i < node_count; ++i) b.add_node(std::to_string(i));
  for (const auto& [u, v] : edges) b.add_edge(u, v);
  return std::move(b).finalize();
}

const Edge& UndirectedMultigraph::edge(EdgeId e) const {
  if (e >= edges_.size()) throw DomainError("edge id " + std::to_string(e) + " out of range");
  return edges_[e];
}

std::span<const Incidence> UndirectedMultigraph::incidences(NodeId v) const {
  require_node(*this, v, "incidences");
  return std::span<const Incidence>(adjacency_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
}

EdgeId GraphBuilder::add_edge(NodeId u, NodeId v) {
  if (u >= registry_.size() || v >= registry_.size()) {
    throw DomainError("add_edge: unknown endpoint");
  }
  if (u == v) {
    throw DomainError("add_edge: self-loop on '" + registry_.key(u) + "'");
  }
  const auto id = static_cast<EdgeId>(edges_.size());
  edges_.push_back(Edge{u, v, id});
  return id;
}

UndirectedMultigraph GraphBuilder::finalize() && {
  UndirectedMultigraph g;
  const std::size_t n = registry_.size();
  g.registry_ = std::move(registry_);
  g.edges_ = std::move(edges_);

  g.offsets_.assign(n + 1, 0);
  for (const Edge& e : g.edges_) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];

  g.adjacency_.resize(g.offsets_[n]);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const Edge& e : g.edges_) {
    g.adjacency_[fill[e.u]++] = Incidence{e.v, e.id};
    g.adjacency_[fill[e.v]++] = Incidence{e.u, e.id};
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]),
              [](const Incidence& a, const Incidence& b) {
                return a.neighbor != b.neighbor ? a.neighbor < b.neighbor : a.edge < b.edge;
              });
  }
  return g;
}

std::size_t degree(const UndirectedMultigraph& g, NodeId v) {
  require_node(g, v, "degree");
  return g.incidences(v).size();
}

std::vector<std::vector<NodeId>> connected_components(const UndirectedMultigraph& g) {
  std::vector<std::vector<NodeId>> out;
  std::vector<bool> seen(g.node_count(), false);
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (seen[s]) continue;
    std::vector<NodeId> comp;
    seen[s] = true;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId x = stack.back();
      stack.pop_back();
      comp.push_back(x);
      for (const Incidence& inc : g.incidences(x)) {
        if (!seen[inc.neighbor]) {
          seen[inc.neighbor] = true;
          stack.push_back(inc.neighbor);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::string_view to_string(TraversalStrategy s) {
  return s == TraversalStrategy::BreadthFirst ? "bfs" : "dfs";
}

std::optional<TraversalStrategy> parse_strategy(std::string_view s) {
  if (s == "bfs" || s == "breadth-first") return TraversalStrategy::BreadthFirst;
  if (s == "dfs" || s == "depth-first") return TraversalStrategy::DepthFirst;
  return std::nullopt;
}

std::optional<TreeLink> SpanningTree::parent(NodeId v) const {
  if (!covers(v) || v == root_) return std::nullopt;
  return TreeLink{parent_node_[v], parent_edge_[v]};
}

void grow_spanning_tree(SpanningTree& t, const UndirectedMultigraph& g, NodeId root,
                        TraversalStrategy strategy) {
  require_node(g, root, "spanning_tree");
  const std::size_t n = g.node_count();
  if (t.depth_.size() != n) {
    t.parent_node_.assign(n, kNoNode);
    t.parent_edge_.assign(n, kNoEdge);
    t.depth_.assign(n, -1);
    t.cursor_.assign(n, 0);
    t.order_.clear();
  } else {
    for (NodeId v : t.order_) {
      t.parent_node_[v] = kNoNode;
      t.parent_edge_[v] = kNoEdge;
      t.depth_[v] = -1;
      t.cursor_[v] = 0;
    }
    t.order_.clear();
  }
  t.root_ = root;
  t.strategy_ = strategy;

  t.depth_[root] = 0;
  t.order_.push_back(root);

  if (strategy == TraversalStrategy::BreadthFirst) {
    // order_ doubles as the BFS queue.
    for (std::size_t head = 0; head < t.order_.size(); ++head) {
      const NodeId x = t.order_[head];
      for (const Incidence& inc : g.incidences(x)) {
        if (t.depth_[inc.neighbor] >= 0) continue;
        t.depth_[inc.neighbor] = t.depth_[x] + 1;
        t.parent_node_[inc.neighbor] = x;
        t.parent_edge_[inc.neighbor] = inc.edge;
        t.order_.push_back(inc.neighbor);
      }
    }
    return;
  }

  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    const NodeId x = stack.back();
    const auto incs = g.incidences(x);
    std::size_t& cur = t.cursor_[x];
    while (cur < incs.size() && t.depth_[incs[cur].neighbor] >= 0) ++cur;
    if (cur == incs.size()) {
      stack.pop_back();
      continue;
    }
    const Incidence& inc = incs[cur++];
    t.depth_[inc.neighbor] = t.depth_[x] + 1;
    t.parent_node_[inc.neighbor] = x;
    t.parent_edge_[inc.neighbor] = inc.edge;
    t.order_.push_back(inc.neighbor);
    stack.push_back(inc.neighbor);
  }
}

SpanningTree spanning_tree(const UndirectedMultigraph& g, NodeId root, TraversalStrategy strategy) {
  SpanningTree t;
  grow_spanning_tree(t, g, root, strategy);
  return t;
}

bool bounded_tree_path(const SpanningTree& t, NodeId u, NodeId v, std::size_t max_nodes,
                       std::vector<NodeId>& out) {
  if (!t.covers(u) || !t.covers(v)) {
    throw DomainError("tree_path: node outside the tree's component");
  }
  out.clear();
  const auto& up_node = t.parent_node_;
  const auto& depth = t.depth_;
  if (static_cast<std::size_t>(std::abs(depth[u] - depth[v])) + 1 >= max_nodes) return false;
  // First pass: find the LCA, giving up as soon as the path is too long.
  std::size_t up = 0;
  std::size_t down = 0;
  NodeId a = u;
  NodeId b = v;
  while (depth[a] > depth[b]) {
    a = up_node[a];
    if (++up + 1 >= max_nodes) return false;
  }
  while (depth[b] > depth[a]) {
    b = up_node[b];
    if (++down + 1 >= max_nodes) return false;
  }
  while (a != b) {
    a = up_node[a];
    b = up_node[b];
    up += 1;
    down += 1;
    if (up + down + 1 >= max_nodes) return false;
  }
  if (up + down + 1 >= max_nodes) return false;
  out.resize(up + down + 1);
  a = u;
  for (std::size_t i = 0; i <= up; ++i, a = up_node[a]) out[i] = a;
  b = v;
  for (std::size_t j = 0; j < down; ++j, b = up_node[b]) out[up + down - j] = b;
  return true;
}

std::vector<NodeId> tree_path(const SpanningTree& t, NodeId u, NodeId v) {
  std::vector<NodeId> out;
  bounded_tree_path(t, u, v, std::numeric_limits<std::size_t>::max(), out);
  return out;
}

InducedSubgraph induced_subgraph(const UndirectedMultigraph& g, std::span<const NodeId> nodes) {
  InducedSubgraph sub;
  sub.nodes.assign(nodes.begin(), nodes.end());
  std::sort(sub.nodes.begin(), sub.nodes.end());
  sub.nodes.erase(std::unique(sub.nodes.begin(), sub.nodes.end()), sub.nodes.end());
  for (NodeId v : sub.nodes) require_node(g, v, "induced_subgraph");

  for (NodeId v : sub.nodes) {
    for (const Incidence& inc : g.incidences(v)) {
      // Each internal edge is seen from both ends; keep the smaller-id end.
      if (inc.neighbor <= v) continue;
      if (std::binary_search(sub.nodes.begin(), sub.nodes.end(), inc.neighbor)) {
        sub.edges.push_back(inc.edge);
      }
    }
  }
  std::sort(sub.edges.begin(), sub.edges.end());
  return sub;
}

}  // namespace fraudring
