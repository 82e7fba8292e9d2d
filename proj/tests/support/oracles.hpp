#pragma once

// Independent reference implementations used only by tests. None of these
// call into the library's algorithms; they work from plain edge lists.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fraudring/graph.hpp"

namespace oracle {

using fraudring::NodeId;
using EdgeList = std::vector<std::pair<NodeId, NodeId>>;

struct SmallGraph {
  std::size_t n = 0;
  EdgeList edges;

  [[nodiscard]] fraudring::UndirectedMultigraph build() const {
    return fraudring::UndirectedMultigraph::from_edges(n, edges);
  }
};

/// Random multigraph without self-loops; `parallel_chance` in [0,1] controls
/// how often an edge repeats an earlier pair.
inline SmallGraph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t m, double parallel_chance = 0.0) {
  SmallGraph g;
  g.n = n;
  if (n < 2) return g;
  std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(n - 1));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (!g.edges.empty() && coin(rng) < parallel_chance) {
      std::uniform_int_distribution<std::size_t> pick(0, g.edges.size() - 1);
      g.edges.push_back(g.edges[pick(rng)]);
      continue;
    }
    NodeId u = node(rng);
    NodeId v = node(rng);
    while (v == u) v = node(rng);
    g.edges.emplace_back(u, v);
  }
  return g;
}

inline SmallGraph cycle_graph(std::size_t n, NodeId offset = 0) {
  SmallGraph g;
  g.n = n + offset;
  for (std::size_t i = 0; i < n; ++i) {
    g.edges.emplace_back(static_cast<NodeId>(offset + i), static_cast<NodeId>(offset + (i + 1) % n));
  }
  return g;
}

inline SmallGraph complete_graph(std::size_t n) {
  SmallGraph g;
  g.n = n;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) g.edges.emplace_back(u, v);
  return g;
}

/// Hop distances by repeated edge relaxation; -1 when unreachable.
inline std::vector<int> hop_distances(const SmallGraph& g, NodeId root) {
  std::vector<int> d(g.n, -1);
  d[root] = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto [u, v] : g.edges) {
      for (int pass = 0; pass < 2; ++pass) {
        if (d[u] >= 0 && (d[v] < 0 || d[v] > d[u] + 1)) {
          d[v] = d[u] + 1;
          changed = true;
        }
        std::swap(u, v);
      }
    }
  }
  return d;
}

/// Surviving node ids of the 2-core, found by deleting one low-degree node
/// at a time and recounting degrees from scratch.
inline std::vector<NodeId> two_core_nodes(const SmallGraph& g) {
  std::vector<bool> alive(g.n, true);
  while (true) {
    std::vector<std::size_t> deg(g.n, 0);
    for (auto [u, v] : g.edges) {
      if (alive[u] && alive[v]) {
        ++deg[u];
        ++deg[v];
      }
    }
    std::optional<NodeId> victim;
    for (NodeId v = 0; v < g.n; ++v) {
      if (alive[v] && deg[v] < 2) {
        victim = v;
        break;
      }
    }
    if (!victim) break;
    alive[*victim] = false;
  }
  std::vector<NodeId> out;
  for (NodeId v = 0; v < g.n; ++v)
    if (alive[v]) out.push_back(v);
  return out;
}

/// Minimum over all rotations of both orientations.
inline std::vector<NodeId> canonical(const std::vector<NodeId>& cyc) {
  std::vector<NodeId> best;
  const std::size_t k = cyc.size();
  for (int dir = 0; dir < 2; ++dir) {
    for (std::size_t s = 0; s < k; ++s) {
      std::vector<NodeId> cand(k);
      for (std::size_t i = 0; i < k; ++i) {
        cand[i] = dir == 0 ? cyc[(s + i) % k] : cyc[(s + k - i) % k];
      }
      if (best.empty() || cand < best) best = cand;
    }
  }
  return best;
}

/// Simple cycles as canonical vertex sequences, found by enumerating every
/// edge subset and keeping those that form one connected 2-regular piece.
/// Parallel pairs contribute length-2 cycles. Exponential in the edge count.
inline std::set<std::vector<NodeId>> cycles_by_edge_subsets(const SmallGraph& g) {
  std::set<std::vector<NodeId>> out;
  const std::size_t m = g.edges.size();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      auto [u1, v1] = g.edges[a];
      auto [u2, v2] = g.edges[b];
      if ((u1 == u2 && v1 == v2) || (u1 == v2 && v1 == u2)) out.insert(canonical({u1, v1}));
    }
  }
  std::vector<std::vector<std::pair<NodeId, std::size_t>>> adj(g.n);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    if (__builtin_popcountll(mask) < 3) continue;
    for (auto& a : adj) a.clear();
    bool ok = true;
    NodeId start = 0;
    std::size_t touched = 0;
    for (std::size_t e = 0; e < m && ok; ++e) {
      if (!(mask >> e & 1)) continue;
      auto [u, v] = g.edges[e];
      adj[u].push_back({v, e});
      adj[v].push_back({u, e});
      if (adj[u].size() > 2 || adj[v].size() > 2) ok = false;
      start = u;
    }
    if (!ok) continue;
    for (const auto& a : adj) {
      if (a.size() == 1) ok = false;
      if (a.size() == 2) ++touched;
    }
    if (!ok) continue;
    // Walk the cycle through `start`; it must cover every touched node.
    std::vector<NodeId> walk{start};
    std::size_t via = adj[start][0].second;
    NodeId cur = adj[start][0].first;
    while (cur != start) {
      walk.push_back(cur);
      const auto& nb = adj[cur];
      const auto& next = nb[0].second == via ? nb[1] : nb[0];
      via = next.second;
      cur = next.first;
    }
    if (walk.size() != touched) continue;
    // Two distinct parallel edges between the same pair are a 2-cycle, already added.
    if (walk.size() < 3) continue;
    out.insert(canonical(walk));
  }
  return out;
}

/// Newman modularity straight from the definition
/// Q = 1/(2m) * sum_ij (A_ij - k_i k_j / 2m) delta(c_i, c_j).
inline double modularity(const SmallGraph& g, const std::vector<std::uint32_t>& community) {
  const double m = static_cast<double>(g.edges.size());
  std::vector<std::vector<double>> a(g.n, std::vector<double>(g.n, 0.0));
  std::vector<double> k(g.n, 0.0);
  for (auto [u, v] : g.edges) {
    a[u][v] += 1;
    a[v][u] += 1;
    k[u] += 1;
    k[v] += 1;
  }
  double q = 0.0;
  for (NodeId i = 0; i < g.n; ++i)
    for (NodeId j = 0; j < g.n; ++j)
      if (community[i] == community[j]) q += a[i][j] - k[i] * k[j] / (2 * m);
  return q / (2 * m);
}

/// Every set partition of {0..n-1} as restricted growth strings.
inline std::vector<std::vector<std::uint32_t>> all_partitions(std::size_t n) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> cur(n, 0);
  auto rec = [&](auto&& self, std::size_t i, std::uint32_t max_label) -> void {
    if (i == n) {
      out.push_back(cur);
      return;
    }
    for (std::uint32_t c = 0; c <= max_label + 1; ++c) {
      cur[i] = c;
      self(self, i + 1, std::max(max_label, c));
    }
  };
  if (n == 0) return {{}};
  cur[0] = 0;
  rec(rec, 1, 0);
  return out;
}

/// Internal edges of `nodes` by a full scan of the edge list.
inline std::size_t internal_edge_count(const SmallGraph& g, const std::set<NodeId>& nodes) {
  std::size_t c = 0;
  for (auto [u, v] : g.edges)
    if (nodes.count(u) && nodes.count(v)) ++c;
  return c;
}

// ---- minimal format readers ------------------------------------------------

struct ParsedGraph {
  std::string name;
  std::map<std::string, std::map<std::string, std::string>> nodes;  // id -> attributes
  std::vector<std::pair<std::string, std::string>> edges;           // node ids
  std::vector<std::map<std::string, std::string>> edge_attrs;
  std::map<std::string, std::string> graph_attrs;
};

inline std::string xml_unescape(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    const auto semi = s.find(';', i);
    if (semi == std::string::npos) throw std::runtime_error("bad entity");
    const std::string ent = s.substr(i + 1, semi - i - 1);
    if (ent == "amp") out.push_back('&');
    else if (ent == "lt") out.push_back('<');
    else if (ent == "gt") out.push_back('>');
    else if (ent == "quot") out.push_back('"');
    else if (ent == "apos") out.push_back('\'');
    else throw std::runtime_error("unknown entity " + ent);
    i = semi;
  }
  return out;
}

/// Small XML subset reader for GraphML: elements, attributes, text. Throws
/// std::runtime_error on mismatched tags or malformed syntax.
inline ParsedGraph read_graphml(const std::string& text) {
  struct Element {
    std::string tag;
    std::map<std::string, std::string> attrs;
  };
  ParsedGraph out;
  std::map<std::string, std::string> key_names;  // key id -> attr.name
  std::vector<Element> stack;
  std::string pending_text;
  std::size_t i = 0;
  bool saw_root = false;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto current_owner = [&]() -> std::map<std::string, std::string>* {
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      if (it->tag == "node") return &out.nodes[it->attrs.at("id")];
      if (it->tag == "edge") return &out.edge_attrs.back();
      if (it->tag == "graph") return &out.graph_attrs;
    }
    return nullptr;
  };
  while (i < text.size()) {
    if (text[i] != '<') {
      pending_text.push_back(text[i++]);
      continue;
    }
    if (text.compare(i, 5, "<?xml") == 0) {
      const auto end = text.find("?>", i);
      if (end == std::string::npos) throw std::runtime_error("unterminated declaration");
      i = end + 2;
      continue;
    }
    if (text.compare(i, 2, "</") == 0) {
      const auto end = text.find('>', i);
      if (end == std::string::npos) throw std::runtime_error("unterminated close tag");
      const std::string tag = text.substr(i + 2, end - i - 2);
      if (stack.empty() || stack.back().tag != tag) throw std::runtime_error("mismatched </" + tag + ">");
      if (tag == "data") {
        auto* owner = current_owner();
        if (!owner) throw std::runtime_error("data outside node/edge/graph");
        const std::string& key = stack.back().attrs.at("key");
        if (!key_names.count(key)) throw std::runtime_error("undeclared key " + key);
        (*owner)[key_names[key]] = xml_unescape(pending_text);
      }
      stack.pop_back();
      pending_text.clear();
      i = end + 1;
      continue;
    }
    ++i;
    Element el;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '>' && text[i] != '/') {
      el.tag.push_back(text[i++]);
    }
    if (el.tag.empty()) throw std::runtime_error("empty tag");
    bool self_closing = false;
    while (true) {
      skip_ws();
      if (i >= text.size()) throw std::runtime_error("unterminated tag");
      if (text[i] == '/') {
        if (text.compare(i, 2, "/>") != 0) throw std::runtime_error("bad self-closing tag");
        self_closing = true;
        i += 2;
        break;
      }
      if (text[i] == '>') {
        ++i;
        break;
      }
      std::string name;
      while (i < text.size() && text[i] != '=' && !std::isspace(static_cast<unsigned char>(text[i]))) name.push_back(text[i++]);
      if (i >= text.size() || text[i] != '=') throw std::runtime_error("attribute without value");
      ++i;
      if (text[i] != '"') throw std::runtime_error("unquoted attribute");
      const auto close = text.find('"', i + 1);
      if (close == std::string::npos) throw std::runtime_error("unterminated attribute");
      if (el.attrs.count(name)) throw std::runtime_error("duplicate attribute");
      el.attrs[name] = xml_unescape(text.substr(i + 1, close - i - 1));
      i = close + 1;
    }
    if (!saw_root) {
      if (el.tag != "graphml") throw std::runtime_error("root is not graphml");
      saw_root = true;
    } else if (stack.empty()) {
      throw std::runtime_error("content after root");
    }
    if (el.tag == "key") key_names[el.attrs.at("id")] = el.attrs.at("attr.name");
    if (el.tag == "graph") out.name = el.attrs.at("id");
    if (el.tag == "node") {
      const auto& id = el.attrs.at("id");
      if (out.nodes.count(id)) throw std::runtime_error("duplicate node id");
      out.nodes[id];
    }
    if (el.tag == "edge") {
      const auto& s = el.attrs.at("source");
      const auto& t = el.attrs.at("target");
      if (!out.nodes.count(s) || !out.nodes.count(t)) throw std::runtime_error("edge to unknown node");
      out.edges.emplace_back(s, t);
      out.edge_attrs.emplace_back();
    }
    pending_text.clear();
    if (!self_closing) stack.push_back(std::move(el));
  }
  if (!stack.empty()) throw std::runtime_error("unclosed <" + stack.back().tag + ">");
  if (!saw_root) throw std::runtime_error("no root element");
  return out;
}

/// Reader for the DOT subset: `graph "id" { stmt; ... }` with node, edge
/// (`--`) and graph attribute statements, quoted or bare identifiers.
inline ParsedGraph read_dot(const std::string& text) {
  std::vector<std::string> tok;
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '"') {
      std::string s;
      ++i;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < text.size()) {
          ++i;
          s.push_back(text[i] == 'n' ? '\n' : text[i]);
        } else {
          s.push_back(text[i]);
        }
        ++i;
      }
      if (i >= text.size()) throw std::runtime_error("unterminated string");
      ++i;
      tok.push_back("\"" + s);
    } else if (std::string("{}[];=,").find(c) != std::string::npos) {
      tok.emplace_back(1, c);
      ++i;
    } else if (text.compare(i, 2, "--") == 0) {
      tok.emplace_back("--");
      i += 2;
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-') {
      std::string s;
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_' || text[i] == '.' ||
                                 (text[i] == '-' && text.compare(i, 2, "--") != 0))) {
        s.push_back(text[i++]);
      }
      tok.push_back("\"" + s);
    } else {
      throw std::runtime_error(std::string("unexpected character ") + c);
    }
  }
  std::size_t p = 0;
  auto peek = [&]() -> const std::string& {
    static const std::string end;
    return p < tok.size() ? tok[p] : end;
  };
  auto expect = [&](const std::string& t) {
    if (peek() != t) throw std::runtime_error("expected " + t + " got " + peek());
    ++p;
  };
  auto ident = [&] {
    if (peek().empty() || peek()[0] != '"') throw std::runtime_error("expected identifier");
    return tok[p++].substr(1);
  };
  auto attr_list = [&] {
    std::map<std::string, std::string> a;
    if (peek() != "[") return a;
    ++p;
    while (peek() != "]") {
      const std::string k = ident();
      expect("=");
      a[k] = ident();
      if (peek() == "," || peek() == ";") ++p;
    }
    ++p;
    return a;
  };
  ParsedGraph out;
  if (ident() != "graph") throw std::runtime_error("expected 'graph'");
  if (peek() != "{") out.name = ident();
  expect("{");
  while (peek() != "}") {
    if (peek().empty()) throw std::runtime_error("unterminated graph body");
    const std::string a = ident();
    if (peek() == "=") {
      ++p;
      out.graph_attrs[a] = ident();
    } else if (peek() == "--") {
      ++p;
      const std::string b = ident();
      out.edges.emplace_back(a, b);
      out.edge_attrs.push_back(attr_list());
    } else {
      auto attrs = attr_list();
      out.nodes[a].insert(attrs.begin(), attrs.end());
    }
    if (peek() == ";") ++p;
  }
  ++p;
  if (p != tok.size()) throw std::runtime_error("content after graph");
  for (const auto& [a, b] : out.edges) {
    if (!out.nodes.count(a) || !out.nodes.count(b)) throw std::runtime_error("edge to undeclared node");
  }
  return out;
}

}  // namespace oracle
