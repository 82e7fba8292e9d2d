#include "fraudring/export.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "fraudring/csv.hpp"
#include "fraudring/error.hpp"

namespace fraudring {

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_ranked_row(std::ostream& out, std::size_t rank, std::size_t cycle_id, std::size_t n, std::size_t m,
                      double density, double score, const std::string& keys) {
  csv::write_row(out, {std::to_string(rank), std::to_string(cycle_id), std::to_string(n), std::to_string(m),
                       csv::format_number(density), csv::format_number(score), keys});
}

}  // namespace

std::string join_keys(const UndirectedMultigraph& g, std::span<const NodeId> nodes) {
  std::string out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) out.push_back(';');
    out += g.key(nodes[i]);
  }
  return out;
}

void write_ranked_csv(std::ostream& out, std::span<const ScoreSummary> ranked, const CycleSet& cycles,
                      const UndirectedMultigraph& g) {
  out << kRankedHeader << '\n';
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const ScoreSummary& s = ranked[i];
    write_ranked_row(out, i + 1, s.cycle_id, s.n, s.m, s.density, s.score,
                     join_keys(g, cycles.at(s.cycle_id).vertices()));
  }
  if (!out) throw IoError("write error in ranked CSV");
}

void write_ranked_csv(std::ostream& out, std::span<const RankedEntry> ranked) {
  out << kRankedHeader << '\n';
  for (const RankedEntry& r : ranked) {
    std::string keys;
    for (std::size_t i = 0; i < r.node_keys.size(); ++i) {
      if (i) keys.push_back(';');
      keys += r.node_keys[i];
    }
    write_ranked_row(out, r.rank, r.cycle_id, r.n, r.m, r.density, r.score, keys);
  }
  if (!out) throw IoError("write error in ranked CSV");
}

void write_cycles_csv(std::ostream& out, const CycleSet& cycles, const UndirectedMultigraph& g) {
  out << kCyclesHeader << '\n';
  std::size_t id = 0;
  for (const auto e : cycles) {
    csv::write_row(out, {std::to_string(id++), std::to_string(e.length()), join_keys(g, e.vertices())});
  }
  if (!out) throw IoError("write error in cycle file");
}

CycleSet read_cycles_csv(std::istream& in, const UndirectedMultigraph& g) {
  if (!in) throw IoError("cycle stream is not readable");
  std::string line;
  if (!std::getline(in, line) || csv::trim(line) != kCyclesHeader) {
    throw FormatError(std::string("cycle file header must be '") + kCyclesHeader + "'");
  }
  CycleSet out;
  std::size_t line_no = 1;
  std::vector<NodeId> nodes;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split_line(line);
    if (!f || f->size() != 3) throw FormatError("cycle file line " + std::to_string(line_no) + " is malformed");
    nodes.clear();
    std::string_view keys = (*f)[2];
    while (true) {
      const auto semi = keys.find(';');
      const auto key = csv::trim(keys.substr(0, semi));
      const auto id = g.registry().find(key);
      if (!id) {
        throw DomainError("cycle file line " + std::to_string(line_no) + ": unknown node '" + std::string(key) + "'");
      }
      nodes.push_back(*id);
      if (semi == std::string_view::npos) break;
      keys.remove_prefix(semi + 1);
    }
    if (nodes.size() < 2) {
      throw DomainError("cycle file line " + std::to_string(line_no) + ": a cycle needs at least 2 nodes");
    }
    std::vector<NodeId> sorted = nodes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DomainError("cycle file line " + std::to_string(line_no) + ": repeated node");
    }
    // Each consecutive pair (and last -> first) must be joined by an edge;
    // a 2-cycle needs two parallel edges.
    std::optional<EdgeId> closing;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const NodeId a = nodes[i];
      const NodeId b = nodes[(i + 1) % nodes.size()];
      std::size_t joining = 0;
      EdgeId last = 0;
      for (const Incidence& inc : g.incidences(a)) {
        if (inc.neighbor == b) {
          ++joining;
          last = inc.edge;
        }
      }
      const std::size_t needed = nodes.size() == 2 ? 2 : 1;
      if (joining < needed) {
        throw DomainError("cycle file line " + std::to_string(line_no) + ": '" + g.key(a) + "' and '" + g.key(b) +
                          "' are not adjacent");
      }
      if (i + 1 == nodes.size()) closing = last;
    }
    out.insert(nodes, *closing, CycleSource::Oracle);
  }
  if (in.bad()) throw IoError("read error in cycle file");
  static_cast<void>(out.begin());
  return out;
}

ComponentView component_view(const CollisionNetwork& net, std::span<const NodeId> members, std::string name,
                             double score) {
  const InducedSubgraph sub = induced_subgraph(net.graph, members);
  ComponentView view;
  view.name = std::move(name);
  view.score = score;
  for (NodeId v : sub.nodes) view.node_keys.push_back(net.graph.key(v));
  view.score_member.assign(sub.nodes.size(), true);
  auto index_of = [&](NodeId v) {
    return static_cast<std::size_t>(std::lower_bound(sub.nodes.begin(), sub.nodes.end(), v) - sub.nodes.begin());
  };
  for (EdgeId e : sub.edges) {
    const Edge& ed = net.graph.edge(e);
    view.edges.push_back({index_of(ed.u), index_of(ed.v), e < net.edge_collision.size() ? net.edge_collision[e] : ""});
  }
  return view;
}

void write_graphml(std::ostream& out, const ComponentView& view) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
         "  <key id=\"driver\" for=\"node\" attr.name=\"driver_key\" attr.type=\"string\"/>\n"
         "  <key id=\"member\" for=\"node\" attr.name=\"score_member\" attr.type=\"boolean\"/>\n"
         "  <key id=\"collision\" for=\"edge\" attr.name=\"collision_id\" attr.type=\"string\"/>\n"
         "  <key id=\"score\" for=\"graph\" attr.name=\"score\" attr.type=\"double\"/>\n";
  out << "  <graph id=\"" << xml_escape(view.name) << "\" edgedefault=\"undirected\">\n";
  out << "    <data key=\"score\">" << csv::format_number(view.score) << "</data>\n";
  for (std::size_t i = 0; i < view.node_keys.size(); ++i) {
    out << "    <node id=\"n" << i << "\">\n"
        << "      <data key=\"driver\">" << xml_escape(view.node_keys[i]) << "</data>\n"
        << "      <data key=\"member\">" << (view.score_member[i] ? "true" : "false") << "</data>\n"
        << "    </node>\n";
  }
  for (std::size_t i = 0; i < view.edges.size(); ++i) {
    const auto& e = view.edges[i];
    out << "    <edge id=\"e" << i << "\" source=\"n" << e.source << "\" target=\"n" << e.target << "\">\n"
        << "      <data key=\"collision\">" << xml_escape(e.collision_id) << "</data>\n"
        << "    </edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
  if (!out) throw IoError("write error in GraphML output");
}

void write_dot(std::ostream& out, const ComponentView& view) {
  out << "graph " << dot_quote(view.name) << " {\n";
  out << "  score=" << dot_quote(csv::format_number(view.score)) << ";\n";
  for (std::size_t i = 0; i < view.node_keys.size(); ++i) {
    out << "  " << dot_quote(view.node_keys[i]) << " [score_member=" << (view.score_member[i] ? "true" : "false")
        << "];\n";
  }
  for (const auto& e : view.edges) {
    out << "  " << dot_quote(view.node_keys[e.source]) << " -- " << dot_quote(view.node_keys[e.target])
        << " [collision_id=" << dot_quote(e.collision_id) << "];\n";
  }
  out << "}\n";
  if (!out) throw IoError("write error in DOT output");
}

}  // namespace fraudring
