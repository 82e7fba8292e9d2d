#include "fraudring/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "fraudring/csv.hpp"
#include "fraudring/error.hpp"

namespace fraudring {

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int value = 0;
    const char* first = text.data() + pos;
    const char* last = first + len;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return value;
  };
  const auto y = num(0, 4);
  const auto m = num(5, 2);
  const auto d = num(8, 2);
  if (!y || !m || !d) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y},
                                        std::chrono::month{static_cast<unsigned>(*m)},
                                        std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return std::chrono::sys_days{ymd};
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

ParsedCollisions parse_collisions(std::istream& in) {
  if (!in) throw IoError("collision input stream is not readable");

  std::string line;
  if (!std::getline(in, line)) {
    if (in.bad()) throw IoError("failed to read collision header");
    throw FormatError("collision CSV is empty; expected header '" +
                      std::string(kCollisionHeader) + "'");
  }
  {
    auto header = csv::split_line(csv::trim(line));
    const std::vector<std::string> expected{"collision_id", "driver_id", "vehicle_id", "date"};
    bool ok = header.has_value() && header->size() == expected.size();
    for (std::size_t i = 0; ok && i < expected.size(); ++i) {
      ok = csv::trim((*header)[i]) == expected[i];
    }
    if (!ok) {
      throw FormatError("bad collision CSV header '" + line + "'; expected '" +
                        std::string(kCollisionHeader) + "'");
    }
  }

  ParsedCollisions out;
  auto& records = out.dataset.records;
  auto& rep = out.report;
  std::unordered_map<std::string, std::size_t> index;
  std::unordered_set<std::string> seen_pairs;

  while (std::getline(in, line)) {
    if (csv::trim(line).empty()) continue;
    ++rep.rows;
    auto fields = csv::split_line(line);
    if (!fields || fields->size() != 4) {
      ++rep.malformed;
      continue;
    }
    const std::string cid(csv::trim((*fields)[0]));
    const std::string driver(csv::trim((*fields)[1]));
    const std::string_view date_text = csv::trim((*fields)[3]);
    if (cid.empty()) {
      ++rep.malformed;
      continue;
    }
    if (driver.empty()) {
      ++rep.missing_driver;
      continue;
    }
    std::optional<Date> date;
    if (!date_text.empty()) {
      date = parse_date(date_text);
      if (!date) ++rep.bad_date;
    }

    auto [it, inserted] = index.try_emplace(cid, records.size());
    if (inserted) records.push_back(CollisionRecord{cid, {}, std::nullopt});
    CollisionRecord& rec = records[it->second];
    if (!rec.occurred_on && date) rec.occurred_on = date;

    std::string pair_key = cid;
    pair_key.push_back('\0');
    pair_key += driver;
    if (!seen_pairs.insert(std::move(pair_key)).second) {
      ++rep.duplicate_pairs;
      continue;
    }
    rec.driver_keys.push_back(driver);
    ++rep.accepted;
  }
  if (in.bad()) throw IoError("read error in collision input");
  return out;
}

ParsedCollisions parse_collisions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open collision file '" + path + "'");
  return parse_collisions(in);
}

void write_collisions(std::ostream& out, const CollisionDataset& ds) {
  out << kCollisionHeader << '\n';
  for (const CollisionRecord& rec : ds.records) {
    const std::string date = rec.occurred_on ? format_date(*rec.occurred_on) : std::string();
    for (const std::string& d : rec.driver_keys) {
      csv::write_row(out, {rec.collision_id, d, "", date});
    }
  }
}

CollisionNetwork build_collision_network(const CollisionDataset& ds) {
  GraphBuilder builder;
  CollisionNetwork net;
  std::vector<NodeId> ids;
  for (const CollisionRecord& rec : ds.records) {
    ids.clear();
    for (const std::string& key : rec.driver_keys) ids.push_back(builder.add_node(key));
    // Clique expansion of the two-mode (collision, driver) network.
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        builder.add_edge(ids[i], ids[j]);
        net.edge_collision.push_back(rec.collision_id);
        net.edge_date.push_back(rec.occurred_on);
      }
    }
  }
  net.graph = std::move(builder).finalize();
  return net;
}

PrunedGraph prune_to_cycle_core(const UndirectedMultigraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> deg(n);
  std::vector<bool> removed(n, false);
  std::vector<NodeId> queue;
  for (NodeId v = 0; v < n; ++v) {
    deg[v] = g.incidences(v).size();
    if (deg[v] < 2) {
      removed[v] = true;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    const NodeId v = queue.back();
    queue.pop_back();
    for (const Incidence& inc : g.incidences(v)) {
      const NodeId w = inc.neighbor;
      if (removed[w]) continue;
      if (--deg[w] < 2) {
        removed[w] = true;
        queue.push_back(w);
      }
    }
  }

  PrunedGraph out;
  GraphBuilder builder;
  std::vector<NodeId> remap(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    if (removed[v]) continue;
    remap[v] = builder.add_node(g.key(v));
    out.original_node.push_back(v);
  }
  for (const Edge& e : g.edges()) {
    if (removed[e.u] || removed[e.v]) continue;
    builder.add_edge(remap[e.u], remap[e.v]);
    out.original_edge.push_back(e.id);
  }
  out.graph = std::move(builder).finalize();
  return out;
}

CollisionNetwork prune_network(const CollisionNetwork& net) {
  PrunedGraph pruned = prune_to_cycle_core(net.graph);
  CollisionNetwork out;
  out.edge_collision.reserve(pruned.original_edge.size());
  out.edge_date.reserve(pruned.original_edge.size());
  for (EdgeId old : pruned.original_edge) {
    out.edge_collision.push_back(old < net.edge_collision.size() ? net.edge_collision[old]
                                                                 : std::string());
    out.edge_date.push_back(old < net.edge_date.size() ? net.edge_date[old] : std::nullopt);
  }
  out.graph = std::move(pruned.graph);
  return out;
}

DegreeSummary summarize(const UndirectedMultigraph& g) {
  DegreeSummary s;
  s.nodes = g.node_count();
  s.edges = g.edge_count();
  if (s.nodes == 0) return s;
  s.min_degree = g.incidences(0).size();
  for (NodeId v = 0; v < s.nodes; ++v) {
    const std::size_t d = g.incidences(v).size();
    s.min_degree = std::min(s.min_degree, d);
    s.max_degree = std::max(s.max_degree, d);
  }
  return s;
}

}  // namespace fraudring
