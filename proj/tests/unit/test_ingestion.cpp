#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "fraudring/cycles.hpp"
#include "fraudring/error.hpp"
#include "fraudring/ingestion.hpp"
#include "oracles.hpp"

using namespace fraudring;

namespace {

ParsedCollisions parse(const std::string& body) {
  std::istringstream in(std::string(kCollisionHeader) + "\n" + body);
  return parse_collisions(in);
}

std::set<std::vector<std::string>> cycles_by_key(const UndirectedMultigraph& g, const CycleSet& cs) {
  std::set<std::vector<std::string>> out;
  for (const auto e : cs) {
    std::vector<std::string> keys;
    for (NodeId v : e.vertices()) keys.push_back(g.key(v));
    out.insert(keys);
  }
  return out;
}

}  // namespace

TEST_CASE("dates") {
  CHECK(parse_date("2010-02-28"));
  CHECK_FALSE(parse_date("2010-02-30"));
  CHECK_FALSE(parse_date("2010-2-28"));
  CHECK_FALSE(parse_date("20100228"));
  CHECK_FALSE(parse_date("2010-02-2x"));
  CHECK(format_date(*parse_date("2008-12-01")) == "2008-12-01");
}

TEST_CASE("parse collisions") {
  SUBCASE("rows sharing an id aggregate") {
    const auto p = parse("c1,d1,,\nc1,d2,,\n");
    REQUIRE(p.dataset.records.size() == 1);
    CHECK(p.dataset.records[0].driver_keys == std::vector<std::string>{"d1", "d2"});
  }
  SUBCASE("empty body") {
    const auto p = parse("");
    CHECK(p.dataset.records.empty());
    CHECK(p.report == ParseReport{});
  }
  SUBCASE("three rows for one collision") {
    const auto p = parse("c9,d1,v1,2011-03-04\nc9,d2,v2,2011-03-04\nc9,d3,,2011-03-04\n");
    REQUIRE(p.dataset.records.size() == 1);
    CHECK(p.dataset.records[0].driver_keys.size() == 3);
    CHECK(p.dataset.records[0].occurred_on == parse_date("2011-03-04"));
  }
  SUBCASE("skip report") {
    const auto p = parse(
        "c1,d1,,\n"
        "c1,,,\n"          // missing driver
        "c1,d1,,\n"        // duplicate pair
        ",d5,,\n"          // empty collision id
        "c2,d2\n"          // field count
        "c2,\"d3,,\n"      // bad quoting
        "c2,d4,,nope\n"    // bad date: row kept
        "\n"
        "c2,\"d,6\",,\n");
    const ParseReport& r = p.report;
    CHECK(r.rows == 8);
    CHECK(r.accepted == 3);
    CHECK(r.missing_driver == 1);
    CHECK(r.duplicate_pairs == 1);
    CHECK(r.malformed == 3);
    CHECK(r.bad_date == 1);
    CHECK(r.accepted + r.missing_driver + r.malformed + r.duplicate_pairs == r.rows);
    REQUIRE(p.dataset.records.size() == 2);
    CHECK(p.dataset.records[1].driver_keys == std::vector<std::string>{"d4", "d,6"});
    CHECK_FALSE(p.dataset.records[1].occurred_on);
  }
  SUBCASE("bad header") {
    std::istringstream in("collision,driver\nc1,d1\n");
    CHECK_THROWS_AS(static_cast<void>(parse_collisions(in)), FormatError);
    std::istringstream empty("");
    CHECK_THROWS_AS(static_cast<void>(parse_collisions(empty)), FormatError);
  }
  SUBCASE("unreadable") {
    std::istringstream in;
    in.setstate(std::ios::badbit);
    CHECK_THROWS_AS(static_cast<void>(parse_collisions(in)), IoError);
    CHECK_THROWS_AS(static_cast<void>(parse_collisions_file("/nonexistent/x.csv")), IoError);
  }
  SUBCASE("byte-order mark and CRLF") {
    std::istringstream in("\xEF\xBB\xBF" + std::string(kCollisionHeader) + "\r\nc1,a,,\r\nc1,b,,\r\n");
    const auto p = parse_collisions(in);
    REQUIRE(p.dataset.records.size() == 1);
    CHECK(p.dataset.records[0].driver_keys == std::vector<std::string>{"a", "b"});
  }
}

TEST_CASE("write then parse is the identity") {
  const auto p = parse("c1,a,,2010-01-01\nc1,b,,2010-01-01\nc2,\"x,y\",,\nc2,a,,\nc3,z,,\n");
  std::ostringstream out;
  write_collisions(out, p.dataset);
  std::istringstream in(out.str());
  const auto q = parse_collisions(in);
  REQUIRE(q.dataset.records.size() == p.dataset.records.size());
  for (std::size_t i = 0; i < q.dataset.records.size(); ++i) {
    CHECK(q.dataset.records[i].collision_id == p.dataset.records[i].collision_id);
    CHECK(q.dataset.records[i].driver_keys == p.dataset.records[i].driver_keys);
    CHECK(q.dataset.records[i].occurred_on == p.dataset.records[i].occurred_on);
  }
}

TEST_CASE("collision network") {
  SUBCASE("two drivers") {
    const auto net = build_collision_network(parse("c1,a,,\nc1,b,,\n").dataset);
    CHECK(net.graph.node_count() == 2);
    CHECK(net.graph.edge_count() == 1);
    CHECK(net.edge_collision == std::vector<std::string>{"c1"});
  }
  SUBCASE("three drivers form a triangle") {
    const auto net = build_collision_network(parse("c1,a,,\nc1,b,,\nc1,c,,\n").dataset);
    CHECK(net.graph.node_count() == 3);
    CHECK(net.graph.edge_count() == 3);
    for (NodeId v = 0; v < 3; ++v) CHECK(degree(net.graph, v) == 2);
  }
  SUBCASE("repeat pair gives parallel edges") {
    const auto net = build_collision_network(parse("c1,a,,2010-05-01\nc1,b,,\nc2,b,,\nc2,a,,2010-06-01\n").dataset);
    CHECK(net.graph.node_count() == 2);
    CHECK(net.graph.edge_count() == 2);
    CHECK(degree(net.graph, 0) == 2);
    CHECK(net.edge_collision == std::vector<std::string>{"c1", "c2"});
    CHECK(net.edge_date[0] == parse_date("2010-05-01"));
    CHECK(net.edge_date[1] == parse_date("2010-06-01"));
  }
  SUBCASE("single-driver collision adds a node only") {
    const auto net = build_collision_network(parse("c1,a,,\n").dataset);
    CHECK(net.graph.node_count() == 1);
    CHECK(net.graph.edge_count() == 0);
  }
  SUBCASE("edge count is the sum of k(k-1)/2") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> parties(1, 5);
    std::uniform_int_distribution<int> driver(0, 30);
    std::string body;
    std::size_t expected = 0;
    for (int c = 0; c < 200; ++c) {
      std::set<int> ds;
      const int k = parties(rng);
      while (static_cast<int>(ds.size()) < k) ds.insert(driver(rng));
      expected += ds.size() * (ds.size() - 1) / 2;
      for (int d : ds) body += "c" + std::to_string(c) + ",d" + std::to_string(d) + ",,\n";
    }
    const auto net = build_collision_network(parse(body).dataset);
    CHECK(net.graph.edge_count() == expected);
    CHECK(net.edge_collision.size() == expected);
    CHECK(net.edge_date.size() == expected);
  }
}

TEST_CASE("prune to the 2-core") {
  SUBCASE("path cascades to empty") {
    const oracle::EdgeList e{{0, 1}, {1, 2}};
    const auto p = prune_to_cycle_core(UndirectedMultigraph::from_edges(3, e));
    CHECK(p.graph.node_count() == 0);
    CHECK(p.graph.edge_count() == 0);
  }
  SUBCASE("C4 unchanged") {
    const auto g = oracle::cycle_graph(4).build();
    const auto p = prune_to_cycle_core(g);
    CHECK(p.graph.node_count() == 4);
    CHECK(p.graph.edge_count() == 4);
    CHECK(p.original_node == std::vector<NodeId>{0, 1, 2, 3});
  }
  SUBCASE("C5 with a pendant") {
    auto sg = oracle::cycle_graph(5);
    sg.n = 6;
    sg.edges.emplace_back(2, 5);
    const auto p = prune_to_cycle_core(sg.build());
    CHECK(p.original_node == oracle::two_core_nodes(sg));
    CHECK(p.graph.node_count() == 5);
    CHECK(p.graph.edge_count() == 5);
  }
  SUBCASE("parallel pair survives") {
    const oracle::EdgeList e{{0, 1}, {0, 1}, {1, 2}};
    const auto p = prune_to_cycle_core(UndirectedMultigraph::from_edges(3, e));
    CHECK(p.graph.node_count() == 2);
    CHECK(p.graph.edge_count() == 2);
  }
  SUBCASE("keys and side tables follow the surviving nodes") {
    const auto net = build_collision_network(
        parse("c1,a,,\nc1,b,,\nc2,b,,\nc2,c,,2012-01-02\nc3,c,,\nc3,a,,\nc4,c,,\nc4,tail,,\n").dataset);
    const auto pruned = prune_network(net);
    CHECK(pruned.graph.node_count() == 3);
    CHECK_FALSE(pruned.graph.registry().find("tail"));
    CHECK(pruned.edge_collision == std::vector<std::string>{"c1", "c2", "c3"});
    CHECK(pruned.edge_date[1] == parse_date("2012-01-02"));
    for (const Edge& e : pruned.graph.edges()) {
      CHECK(pruned.graph.key(e.u) != pruned.graph.key(e.v));
    }
  }
}

TEST_CASE("pruning properties on random graphs") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 3 + trial % 10;
    const auto sg = oracle::random_graph(rng, n, n - 2 + trial % 7, 0.1);
    const auto g = sg.build();
    const auto p = prune_to_cycle_core(g);
    CHECK(p.original_node == oracle::two_core_nodes(sg));
    const auto summary = summarize(p.graph);
    if (p.graph.node_count() > 0) CHECK(summary.min_degree >= 2);
    // Relative order and mapping back to original ids.
    CHECK(std::is_sorted(p.original_node.begin(), p.original_node.end()));
    CHECK(std::is_sorted(p.original_edge.begin(), p.original_edge.end()));
    for (const Edge& e : p.graph.edges()) {
      const Edge& o = g.edge(p.original_edge[e.id]);
      CHECK(std::minmax(p.original_node[e.u], p.original_node[e.v]) == std::minmax(o.u, o.v));
    }
    // Idempotent.
    const auto again = prune_to_cycle_core(p.graph);
    CHECK(again.graph.node_count() == p.graph.node_count());
    CHECK(again.graph.edge_count() == p.graph.edge_count());
    // Cycles preserved, compared through the original ids.
    std::set<std::vector<NodeId>> before;
    for (const auto e : brute_force_simple_cycles(g)) before.insert({e.vertices().begin(), e.vertices().end()});
    std::set<std::vector<NodeId>> after;
    for (const auto e : brute_force_simple_cycles(p.graph)) {
      std::vector<NodeId> mapped;
      for (NodeId v : e.vertices()) mapped.push_back(p.original_node[v]);
      after.insert(oracle::canonical(mapped));
    }
    CHECK(before == after);
  }
}

TEST_CASE("degree summary") {
  const oracle::EdgeList e{{0, 1}, {0, 2}, {0, 3}};
  const auto s = summarize(UndirectedMultigraph::from_edges(5, e));
  CHECK(s == DegreeSummary{5, 3, 0, 3});
  CHECK(summarize(UndirectedMultigraph{}) == DegreeSummary{});
}

TEST_CASE("prune_network keeps string keys stable") {
  const auto net = build_collision_network(parse("c1,x,,\nc1,y,,\nc1,z,,\n").dataset);
  const auto pruned = prune_network(net);
  const auto cs = brute_force_simple_cycles(pruned.graph);
  CHECK(cycles_by_key(pruned.graph, cs) == std::set<std::vector<std::string>>{{"x", "y", "z"}});
}
