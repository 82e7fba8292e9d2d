#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fraudring/error.hpp"
#include "fraudring/graph.hpp"
#include "oracles.hpp"

using namespace fraudring;

namespace {

std::vector<EdgeId> tree_edges(const UndirectedMultigraph& g, const SpanningTree& t) {
  std::vector<EdgeId> out;
  for (const Edge& e : g.edges())
    if (t.is_tree_edge(e.id, e)) out.push_back(e.id);
  return out;
}

}  // namespace

TEST_CASE("registry is a bijection") {
  NodeRegistry r;
  CHECK(r.intern("alice") == 0);
  CHECK(r.intern("bob") == 1);
  CHECK(r.intern("alice") == 0);
  CHECK(r.size() == 2);
  CHECK(r.key(1) == "bob");
  CHECK(r.find("bob") == NodeId{1});
  CHECK_FALSE(r.find("carol"));
  CHECK_THROWS_AS(static_cast<void>(r.key(2)), DomainError);
}

TEST_CASE("builder rejects self-loops and unknown endpoints") {
  GraphBuilder b;
  const NodeId a = b.add_node("a");
  const NodeId c = b.add_node("c");
  CHECK_THROWS_AS(b.add_edge(a, a), DomainError);
  CHECK_THROWS_AS(b.add_edge(a, 7), DomainError);
  CHECK(b.add_edge(a, c) == 0);
  CHECK(b.add_edge(c, a) == 1);
  const UndirectedMultigraph g = std::move(b).finalize();
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 2);
  CHECK(g.key(a) == "a");
}

TEST_CASE("degree") {
  SUBCASE("isolated node") {
    const auto g = UndirectedMultigraph::from_edges(1, {});
    CHECK(degree(g, 0) == 0);
  }
  SUBCASE("center of a 3-star") {
    const oracle::EdgeList e{{0, 1}, {0, 2}, {0, 3}};
    const auto g = UndirectedMultigraph::from_edges(4, e);
    CHECK(degree(g, 0) == 3);
  }
  SUBCASE("parallel edges count with multiplicity") {
    const oracle::EdgeList e{{0, 1}, {1, 0}};
    const auto g = UndirectedMultigraph::from_edges(2, e);
    CHECK(degree(g, 0) == 2);
    CHECK(degree(g, 1) == 2);
  }
  SUBCASE("invalid id") {
    const auto g = UndirectedMultigraph::from_edges(1, {});
    CHECK_THROWS_AS(static_cast<void>(degree(g, 3)), DomainError);
  }
}

TEST_CASE("adjacency mirrors the edge list, sorted by (neighbor, edge)") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto sg = oracle::random_graph(rng, 2 + trial % 15, trial * 2, 0.2);
    const auto g = sg.build();
    std::multiset<std::pair<NodeId, EdgeId>> expected;
    std::size_t degree_sum = 0;
    for (const Edge& e : g.edges()) {
      CHECK(e.u != e.v);
      expected.insert({e.u, e.id});
      expected.insert({e.v, e.id});
    }
    std::multiset<std::pair<NodeId, EdgeId>> seen;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      const auto inc = g.incidences(v);
      CHECK(std::is_sorted(inc.begin(), inc.end(), [](const Incidence& a, const Incidence& b) {
        return std::pair(a.neighbor, a.edge) < std::pair(b.neighbor, b.edge);
      }));
      for (const Incidence& i : inc) {
        CHECK(g.edge(i.edge).other(v) == i.neighbor);
        seen.insert({v, i.edge});
      }
      degree_sum += degree(g, v);
    }
    CHECK(seen == expected);
    CHECK(degree_sum == 2 * g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) CHECK(g.edge(e).id == e);
  }
}

TEST_CASE("connected components") {
  SUBCASE("empty graph") {
    const UndirectedMultigraph g;
    CHECK(connected_components(g).empty());
  }
  SUBCASE("C4 plus an isolated node") {
    auto sg = oracle::cycle_graph(4);
    sg.n = 5;
    const auto cc = connected_components(sg.build());
    REQUIRE(cc.size() == 2);
    CHECK(cc[0].size() == 4);
    CHECK(cc[1] == std::vector<NodeId>{4});
  }
  SUBCASE("two disjoint rings of sizes 5 and 7") {
    auto sg = oracle::cycle_graph(5);
    const auto second = oracle::cycle_graph(7, 5);
    sg.n = second.n;
    sg.edges.insert(sg.edges.end(), second.edges.begin(), second.edges.end());
    const auto cc = connected_components(sg.build());
    REQUIRE(cc.size() == 2);
    CHECK(cc[0].size() == 5);
    CHECK(cc[1].size() == 7);
  }
  SUBCASE("matches BFS reachability on random graphs") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
      const auto sg = oracle::random_graph(rng, 12, trial % 14);
      const auto cc = connected_components(sg.build());
      std::size_t covered = 0;
      for (std::size_t i = 0; i < cc.size(); ++i) {
        CHECK(std::is_sorted(cc[i].begin(), cc[i].end()));
        if (i) CHECK(cc[i - 1].front() < cc[i].front());
        const auto d = oracle::hop_distances(sg, cc[i].front());
        std::vector<NodeId> reach;
        for (NodeId v = 0; v < sg.n; ++v)
          if (d[v] >= 0) reach.push_back(v);
        CHECK(reach == cc[i]);
        covered += cc[i].size();
      }
      CHECK(covered == sg.n);
    }
  }
}

TEST_CASE("spanning tree examples") {
  SUBCASE("C4 tree drops one edge") {
    const auto g = oracle::cycle_graph(4).build();
    for (NodeId r = 0; r < 4; ++r) {
      for (auto s : {TraversalStrategy::BreadthFirst, TraversalStrategy::DepthFirst}) {
        const auto t = spanning_tree(g, r, s);
        CHECK(tree_edges(g, t).size() == 3);
        CHECK(t.order().size() == 4);
      }
    }
  }
  SUBCASE("path a-b-c rooted at a") {
    const oracle::EdgeList e{{0, 1}, {1, 2}};
    const auto g = UndirectedMultigraph::from_edges(3, e);
    for (auto s : {TraversalStrategy::BreadthFirst, TraversalStrategy::DepthFirst}) {
      const auto t = spanning_tree(g, 0, s);
      CHECK_FALSE(t.parent(0));
      CHECK(t.parent(1)->parent == 0);
      CHECK(t.parent(2)->parent == 1);
    }
  }
  SUBCASE("K4 BFS depths from 0") {
    const auto g = oracle::complete_graph(4).build();
    const auto t = spanning_tree(g, 0, TraversalStrategy::BreadthFirst);
    CHECK(t.depth(0) == 0);
    CHECK(t.depth(1) == 1);
    CHECK(t.depth(2) == 1);
    CHECK(t.depth(3) == 1);
  }
  SUBCASE("K4 DFS is a path in ascending order") {
    const auto g = oracle::complete_graph(4).build();
    const auto t = spanning_tree(g, 0, TraversalStrategy::DepthFirst);
    CHECK(std::vector<NodeId>(t.order().begin(), t.order().end()) == std::vector<NodeId>{0, 1, 2, 3});
    CHECK(t.depth(3) == 3);
  }
  SUBCASE("invalid root") {
    const auto g = oracle::cycle_graph(3).build();
    CHECK_THROWS_AS(static_cast<void>(spanning_tree(g, 9, TraversalStrategy::BreadthFirst)), DomainError);
  }
}

TEST_CASE("spanning tree properties on random graphs") {
  std::mt19937_64 rng(2024);
  SpanningTree reused;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 30;
    const auto sg = oracle::random_graph(rng, n, n + trial % 20, 0.1);
    const auto g = sg.build();
    for (NodeId root = 0; root < n; root += 3) {
      const auto dist = oracle::hop_distances(sg, root);
      const std::size_t comp = static_cast<std::size_t>(std::count_if(dist.begin(), dist.end(), [](int d) { return d >= 0; }));
      for (auto s : {TraversalStrategy::BreadthFirst, TraversalStrategy::DepthFirst}) {
        grow_spanning_tree(reused, g, root, s);
        const auto fresh = spanning_tree(g, root, s);
        CHECK(std::equal(reused.order().begin(), reused.order().end(), fresh.order().begin(), fresh.order().end()));
        const auto te = tree_edges(g, fresh);
        CHECK(te.size() == comp - 1);
        for (NodeId v = 0; v < n; ++v) {
          CHECK(fresh.covers(v) == (dist[v] >= 0));
          if (!fresh.covers(v)) {
            CHECK(fresh.depth(v) == -1);
            continue;
          }
          if (v == root) {
            CHECK_FALSE(fresh.parent(v));
            CHECK(fresh.depth(v) == 0);
            continue;
          }
          const auto p = fresh.parent(v);
          REQUIRE(p);
          CHECK(g.edge(p->via_edge).other(v) == p->parent);
          CHECK(fresh.depth(v) == fresh.depth(p->parent) + 1);
          if (s == TraversalStrategy::BreadthFirst) CHECK(fresh.depth(v) == dist[v]);
        }
      }
    }
  }
}

TEST_CASE("tree path") {
  SUBCASE("u == v") {
    const auto g = oracle::cycle_graph(5).build();
    const auto t = spanning_tree(g, 0, TraversalStrategy::BreadthFirst);
    CHECK(tree_path(t, 3, 3) == std::vector<NodeId>{3});
  }
  SUBCASE("parent-child pair") {
    const auto g = oracle::cycle_graph(5).build();
    const auto t = spanning_tree(g, 0, TraversalStrategy::BreadthFirst);
    CHECK(tree_path(t, 0, 1) == std::vector<NodeId>{0, 1});
  }
  SUBCASE("opposite corners of a BFS tree of C4") {
    // C4 0-1-2-3-0 rooted at 0: tree edges 01, 03, 12; the two C4 paths
    // between 1 and 3 are 1-0-3 (all tree edges) and 1-2-3 (23 is not).
    const auto g = oracle::cycle_graph(4).build();
    const auto t = spanning_tree(g, 0, TraversalStrategy::BreadthFirst);
    CHECK(tree_path(t, 1, 3) == std::vector<NodeId>{1, 0, 3});
  }
  SUBCASE("node outside the component") {
    auto sg = oracle::cycle_graph(3);
    sg.n = 4;
    const auto t = spanning_tree(sg.build(), 0, TraversalStrategy::BreadthFirst);
    CHECK_THROWS_AS(static_cast<void>(tree_path(t, 0, 3)), DomainError);
  }
  SUBCASE("reversal symmetry, simplicity and bounded variant") {
    std::mt19937_64 rng(5);
    std::vector<NodeId> bounded;
    for (int trial = 0; trial < 40; ++trial) {
      const auto sg = oracle::random_graph(rng, 14, 20);
      const auto g = sg.build();
      for (auto s : {TraversalStrategy::BreadthFirst, TraversalStrategy::DepthFirst}) {
        const auto t = spanning_tree(g, 0, s);
        for (NodeId u : t.order()) {
          for (NodeId v : t.order()) {
            const auto p = tree_path(t, u, v);
            auto q = tree_path(t, v, u);
            std::reverse(q.begin(), q.end());
            CHECK(p == q);
            CHECK(p.front() == u);
            CHECK(p.back() == v);
            CHECK(std::set<NodeId>(p.begin(), p.end()).size() == p.size());
            for (std::size_t i = 0; i + 1 < p.size(); ++i) {
              const NodeId a = p[i], b = p[i + 1];
              const bool linked = (t.parent(a) && t.parent(a)->parent == b) || (t.parent(b) && t.parent(b)->parent == a);
              CHECK(linked);
            }
            for (std::size_t cap : {2u, 4u, 20u}) {
              const bool ok = bounded_tree_path(t, u, v, cap, bounded);
              CHECK(ok == (p.size() < cap));
              if (ok) CHECK(bounded == p);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("induced subgraph") {
  SUBCASE("empty node set") {
    const auto g = oracle::complete_graph(4).build();
    const auto s = induced_subgraph(g, {});
    CHECK(s.nodes.empty());
    CHECK(s.edges.empty());
  }
  SUBCASE("all nodes give all edges") {
    const auto g = oracle::complete_graph(5).build();
    const std::vector<NodeId> all{4, 0, 3, 1, 2};
    const auto s = induced_subgraph(g, all);
    CHECK(s.nodes == std::vector<NodeId>{0, 1, 2, 3, 4});
    CHECK(s.edges.size() == g.edge_count());
  }
  SUBCASE("19-node ring with 4 chords has 23 internal edges") {
    auto sg = oracle::cycle_graph(19);
    sg.edges.insert(sg.edges.end(), {{0, 5}, {2, 11}, {7, 15}, {9, 17}});
    sg.n = 25;
    sg.edges.insert(sg.edges.end(), {{0, 19}, {19, 20}, {3, 21}});
    const auto g = sg.build();
    std::vector<NodeId> ring(19);
    for (NodeId i = 0; i < 19; ++i) ring[i] = i;
    const auto s = induced_subgraph(g, ring);
    CHECK(s.nodes.size() == 19);
    CHECK(s.edges.size() == 23);
    CHECK(s.edges.size() - s.nodes.size() == 4);
  }
  SUBCASE("unknown node") {
    const auto g = oracle::complete_graph(3).build();
    const std::vector<NodeId> bad{0, 5};
    CHECK_THROWS_AS(static_cast<void>(induced_subgraph(g, bad)), DomainError);
  }
  SUBCASE("matches a full edge-list scan") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 100; ++trial) {
      const auto sg = oracle::random_graph(rng, 20, 40, 0.15);
      const auto g = sg.build();
      std::vector<NodeId> pick;
      for (NodeId v = 0; v < sg.n; ++v)
        if (coin(rng)) pick.push_back(v);
      const auto s = induced_subgraph(g, pick);
      CHECK(s.edges.size() == oracle::internal_edge_count(sg, std::set<NodeId>(pick.begin(), pick.end())));
      CHECK(std::is_sorted(s.edges.begin(), s.edges.end()));
    }
  }
}

TEST_CASE("strategy names") {
  CHECK(parse_strategy("bfs") == TraversalStrategy::BreadthFirst);
  CHECK(parse_strategy("depth-first") == TraversalStrategy::DepthFirst);
  CHECK_FALSE(parse_strategy("random"));
  CHECK(parse_strategy(to_string(TraversalStrategy::DepthFirst)) == TraversalStrategy::DepthFirst);
}
