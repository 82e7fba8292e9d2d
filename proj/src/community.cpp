#include "fraudring/community.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <unordered_map>

#include "fraudring/csv.hpp"
#include "fraudring/error.hpp"
#include "fraudring/parallel.hpp"

namespace fraudring {

std::vector<std::vector<NodeId>> Partition::members() const {
  std::vector<std::vector<NodeId>> out(community_count);
  for (NodeId v = 0; v < assignment.size(); ++v) out.at(assignment[v]).push_back(v);
  return out;
}

void validate_partition(const Partition& p, std::size_t node_count) {
  if (p.assignment.size() != node_count) {
    throw DomainError("partition covers " + std::to_string(p.assignment.size()) + " nodes, graph has " +
                      std::to_string(node_count));
  }
  std::vector<bool> used(p.community_count, false);
  for (CommunityId c : p.assignment) {
    if (c >= p.community_count) throw DomainError("partition community id out of range");
    used[c] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw DomainError("partition community ids are not dense");
  }
}

double modularity(const UndirectedMultigraph& g, const Partition& p) {
  if (g.edge_count() == 0) throw DomainError("modularity: graph has no edges");
  validate_partition(p, g.node_count());
  std::vector<double> internal(p.community_count, 0.0);
  std::vector<double> degree_sum(p.community_count, 0.0);
  for (const Edge& e : g.edges()) {
    if (p.assignment[e.u] == p.assignment[e.v]) internal[p.assignment[e.u]] += 1.0;
  }
  for (NodeId v = 0; v < g.node_count(); ++v) {
    degree_sum[p.assignment[v]] += static_cast<double>(g.incidences(v).size());
  }
  const double m = static_cast<double>(g.edge_count());
  double q = 0.0;
  for (std::size_t c = 0; c < p.community_count; ++c) {
    const double frac = degree_sum[c] / (2.0 * m);
    q += internal[c] / m - frac * frac;
  }
  return q;
}

std::string_view to_string(CommunityAlgorithm a) {
  return a == CommunityAlgorithm::Multilevel ? "multilevel" : "fastgreedy";
}

std::optional<CommunityAlgorithm> parse_community_algorithm(std::string_view s) {
  if (s == "multilevel" || s == "louvain") return CommunityAlgorithm::Multilevel;
  if (s == "fastgreedy" || s == "fast_greedy" || s == "cnm") return CommunityAlgorithm::FastGreedy;
  return std::nullopt;
}

namespace {

// Weighted graph used between multilevel aggregation passes. Self-loop
// weight is the internal edge weight of the aggregated node.
struct WeightedGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> self_loop;
  std::vector<double> degree;
  double total_weight = 0.0;  // m
};

WeightedGraph weighted_from(const UndirectedMultigraph& g) {
  WeightedGraph w;
  const std::size_t n = g.node_count();
  w.adj.resize(n);
  w.self_loop.assign(n, 0.0);
  w.degree.assign(n, 0.0);
  for (NodeId v = 0; v < n; ++v) {
    auto& list = w.adj[v];
    for (const Incidence& inc : g.incidences(v)) {
      // Incidences are sorted by neighbor, so parallel edges are adjacent.
      if (!list.empty() && list.back().first == inc.neighbor) {
        list.back().second += 1.0;
      } else {
        list.emplace_back(inc.neighbor, 1.0);
      }
    }
    w.degree[v] = static_cast<double>(g.incidences(v).size());
  }
  w.total_weight = static_cast<double>(g.edge_count());
  return w;
}

// One level of local moves. Returns true if any node changed community.
bool local_moves(const WeightedGraph& w, std::vector<std::uint32_t>& comm) {
  const std::size_t n = w.adj.size();
  const double m2 = 2.0 * w.total_weight;
  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) tot[comm[i]] += w.degree[i];

  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> touched;
  bool any = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::uint32_t i = 0; i < n; ++i) {
      const std::uint32_t own = comm[i];
      const double k = w.degree[i];
      touched.clear();
      for (const auto& [j, wt] : w.adj[i]) {
        const std::uint32_t c = comm[j];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += wt;
      }
      tot[own] -= k;
      const double own_gain = link[own] - tot[own] * k / m2;
      std::uint32_t best = own;
      double best_gain = own_gain;
      std::sort(touched.begin(), touched.end());
      for (std::uint32_t c : touched) {
        if (c == own) continue;
        const double gain = link[c] - tot[c] * k / m2;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best = c;
        }
      }
      tot[best] += k;
      for (std::uint32_t c : touched) link[c] = 0.0;
      if (best != own) {
        comm[i] = best;
        moved = true;
        any = true;
      }
    }
  }
  return any;
}

WeightedGraph aggregate(const WeightedGraph& w, const std::vector<std::uint32_t>& comm,
                        std::size_t k) {
  WeightedGraph out;
  out.adj.resize(k);
  out.self_loop.assign(k, 0.0);
  out.degree.assign(k, 0.0);
  out.total_weight = w.total_weight;
  std::vector<std::map<std::uint32_t, double>> acc(k);
  for (std::size_t i = 0; i < w.adj.size(); ++i) {
    const std::uint32_t ci = comm[i];
    out.self_loop[ci] += w.self_loop[i];
    out.degree[ci] += w.degree[i];
    for (const auto& [j, wt] : w.adj[i]) {
      const std::uint32_t cj = comm[j];
      if (ci == cj) {
        if (i < j) out.self_loop[ci] += wt;
      } else {
        acc[ci][cj] += wt;
      }
    }
  }
  for (std::size_t c = 0; c < k; ++c) out.adj[c].assign(acc[c].begin(), acc[c].end());
  return out;
}

// Dense relabel in order of first appearance.
std::size_t densify(std::vector<std::uint32_t>& comm) {
  std::unordered_map<std::uint32_t, std::uint32_t> dense;
  for (auto& c : comm) {
    auto [it, inserted] = dense.try_emplace(c, static_cast<std::uint32_t>(dense.size()));
    c = it->second;
  }
  return dense.size();
}

CommunityResult multilevel(const UndirectedMultigraph& g) {
  CommunityResult r;
  const std::size_t n = g.node_count();
  std::vector<std::uint32_t> node_comm(n);
  for (std::uint32_t i = 0; i < n; ++i) node_comm[i] = i;
  auto as_partition = [&] {
    return Partition::from_labels(std::span<const std::uint32_t>(node_comm));
  };
  r.pass_modularity.push_back(modularity(g, as_partition()));

  WeightedGraph w = weighted_from(g);
  while (true) {
    std::vector<std::uint32_t> comm(w.adj.size());
    for (std::uint32_t i = 0; i < comm.size(); ++i) comm[i] = i;
    if (!local_moves(w, comm)) break;
    const std::size_t k = densify(comm);
    for (auto& c : node_comm) c = comm[c];
    r.pass_modularity.push_back(modularity(g, as_partition()));
    if (k == w.adj.size()) break;
    w = aggregate(w, comm, k);
  }
  r.partition = as_partition();
  r.modularity = modularity(g, r.partition);
  return r;
}

struct MergeCandidate {
  double gain;
  std::uint32_t a;
  std::uint32_t b;
  std::uint32_t version_a;
  std::uint32_t version_b;
};

struct CandidateOrder {
  bool operator()(const MergeCandidate& x, const MergeCandidate& y) const {
    if (x.gain != y.gain) return x.gain < y.gain;
    if (x.a != y.a) return x.a > y.a;
    return x.b > y.b;
  }
};

CommunityResult fast_greedy(const UndirectedMultigraph& g) {
  CommunityResult r;
  const std::size_t n = g.node_count();
  const double m = static_cast<double>(g.edge_count());
  std::vector<std::unordered_map<std::uint32_t, double>> links(n);
  std::vector<double> a(n);
  std::vector<std::uint32_t> version(n, 0);
  std::vector<bool> alive(n, true);
  std::vector<std::vector<NodeId>> members(n);
  for (const Edge& e : g.edges()) {
    links[e.u][e.v] += 1.0;
    links[e.v][e.u] += 1.0;
  }
  for (NodeId v = 0; v < n; ++v) {
    a[v] = static_cast<double>(g.incidences(v).size()) / (2.0 * m);
    members[v] = {v};
  }

  std::priority_queue<MergeCandidate, std::vector<MergeCandidate>, CandidateOrder> heap;
  auto push = [&](std::uint32_t x, std::uint32_t y, double w) {
    const std::uint32_t lo = std::min(x, y);
    const std::uint32_t hi = std::max(x, y);
    heap.push({w / m - 2.0 * a[lo] * a[hi], lo, hi, version[lo], version[hi]});
  };
  for (std::uint32_t x = 0; x < n; ++x) {
    for (const auto& [y, w] : links[x]) {
      if (x < y) push(x, y, w);
    }
  }

  while (!heap.empty()) {
    const MergeCandidate top = heap.top();
    heap.pop();
    if (!alive[top.a] || !alive[top.b] || version[top.a] != top.version_a ||
        version[top.b] != top.version_b) {
      continue;
    }
    if (!(top.gain > 0.0)) break;
    // Fold the community with fewer links into the other.
    std::uint32_t keep = top.a;
    std::uint32_t gone = top.b;
    if (links[gone].size() > links[keep].size()) std::swap(keep, gone);
    for (const auto& [k, w] : links[gone]) {
      if (k == keep) continue;
      links[keep][k] += w;
      auto& back = links[k];
      back.erase(gone);
      back[keep] += w;
    }
    links[keep].erase(gone);
    links[gone].clear();
    a[keep] += a[gone];
    alive[gone] = false;
    ++version[keep];
    members[keep].insert(members[keep].end(), members[gone].begin(), members[gone].end());
    members[gone].clear();
    r.merge_gains.push_back(top.gain);
    std::vector<std::pair<std::uint32_t, double>> nbrs(links[keep].begin(), links[keep].end());
    std::sort(nbrs.begin(), nbrs.end());
    for (const auto& [k, w] : nbrs) push(keep, k, w);
  }

  std::vector<std::uint32_t> label(n);
  for (std::uint32_t c = 0; c < n; ++c) {
    for (NodeId v : members[c]) label[v] = c;
  }
  r.partition = Partition::from_labels(std::span<const std::uint32_t>(label));
  r.modularity = modularity(g, r.partition);
  return r;
}

// Merges adjacent communities whose union leaves Q unchanged, so ties between
// equal-modularity partitions go to the coarser one. With integer edge counts
// the gain e_ij/m - d_i*d_j/(2m^2) is zero exactly when 2*m*e_ij == d_i*d_j.
std::size_t merge_zero_gain_pairs(const UndirectedMultigraph& g, Partition& p) {
  const std::uint64_t m = g.edge_count();
  std::size_t merges = 0;
  while (true) {
    std::vector<std::uint64_t> d(p.community_count, 0);
    for (NodeId v = 0; v < g.node_count(); ++v) d[p.assignment[v]] += g.incidences(v).size();
    std::map<std::pair<CommunityId, CommunityId>, std::uint64_t> between;
    for (const Edge& e : g.edges()) {
      const CommunityId a = p.assignment[e.u];
      const CommunityId b = p.assignment[e.v];
      if (a != b) ++between[std::minmax(a, b)];
    }
    std::optional<std::pair<CommunityId, CommunityId>> pick;
    for (const auto& [pair, e] : between) {
      if (2 * m * e == d[pair.first] * d[pair.second]) {
        pick = pair;
        break;
      }
    }
    if (!pick) return merges;
    for (auto& c : p.assignment) {
      if (c == pick->second) c = pick->first;
    }
    p = Partition::from_labels(std::span<const CommunityId>(p.assignment));
    ++merges;
  }
}

}  // namespace

CommunityResult detect_communities(const UndirectedMultigraph& g, CommunityAlgorithm algorithm) {
  if (g.edge_count() == 0) throw DomainError("detect_communities: graph has no edges");
  CommunityResult r = algorithm == CommunityAlgorithm::Multilevel ? multilevel(g) : fast_greedy(g);
  r.tie_merges = merge_zero_gain_pairs(g, r.partition);
  if (r.tie_merges > 0) r.modularity = modularity(g, r.partition);
  return r;
}

Partition read_partition(std::istream& in, const UndirectedMultigraph& g, std::size_t* unknown_keys) {
  if (!in) throw IoError("partition stream is not readable");
  std::string line;
  if (!std::getline(in, line)) throw FormatError("partition file is empty");
  {
    auto header = csv::split_line(csv::trim(line));
    if (!header || header->size() != 2 || csv::trim((*header)[0]) != "node_external_key" ||
        csv::trim((*header)[1]) != "community_id") {
      throw FormatError("bad partition header '" + line + "'; expected 'node_external_key,community_id'");
    }
  }
  std::vector<std::optional<std::string>> label(g.node_count());
  std::size_t unknown = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    auto f = csv::split_line(line);
    if (!f || f->size() != 2) throw FormatError("partition line " + std::to_string(line_no) + " is malformed");
    const auto id = g.registry().find(csv::trim((*f)[0]));
    if (!id) {
      ++unknown;
      continue;
    }
    label[*id] = std::string(csv::trim((*f)[1]));
  }
  if (in.bad()) throw IoError("read error in partition input");
  std::vector<std::string> labels;
  labels.reserve(label.size());
  for (NodeId v = 0; v < label.size(); ++v) {
    if (!label[v]) throw DomainError("partition has no community for node '" + g.key(v) + "'");
    labels.push_back(*label[v]);
  }
  if (unknown_keys) *unknown_keys = unknown;
  return Partition::from_labels(std::span<const std::string>(labels));
}

void write_partition(std::ostream& out, const UndirectedMultigraph& g, const Partition& p) {
  validate_partition(p, g.node_count());
  out << "node_external_key,community_id\n";
  for (NodeId v = 0; v < g.node_count(); ++v) csv::write_row(out, {g.key(v), std::to_string(p.assignment[v])});
}

namespace {

constexpr CommunityId kSplit = std::numeric_limits<CommunityId>::max();


// Community holding the most cycle nodes (ties: smallest id), or kSplit when
// that community misses some of them.
CommunityId majority_community(const Partition& p, std::span<const NodeId> cycle,
                               std::vector<CommunityId>& scratch) {
  scratch.clear();
  for (NodeId v : cycle) scratch.push_back(p.assignment[v]);
  std::sort(scratch.begin(), scratch.end());
  CommunityId best = scratch.front();
  std::size_t best_votes = 0;
  for (std::size_t i = 0; i < scratch.size();) {
    std::size_t j = i;
    while (j < scratch.size() && scratch[j] == scratch[i]) ++j;
    if (j - i > best_votes) {
      best_votes = j - i;
      best = scratch[i];
    }
    i = j;
  }
  return best_votes == cycle.size() ? best : kSplit;
}

}  // namespace

ComparisonReport compare(const CycleSet& cycles, const std::map<std::string, Partition>& partitions,
                         std::span<const Indicator> registry, const ScoringContext& ctx,
                         const CompareOptions& options) {
  if (!ctx.graph) throw DomainError("compare: no graph in scoring context");
  const UndirectedMultigraph& g = *ctx.graph;
  for (const auto& [name, p] : partitions) {
    try {
      validate_partition(p, g.node_count());
    } catch (const DomainError& e) {
      throw DomainError("compare: partition '" + name + "' does not match the graph: " + e.what());
    }
  }
  const std::vector<CycleSet::EntryRef> items(cycles.begin(), cycles.end());
  for (const auto& e : items) {
    for (NodeId v : e.vertices()) {
      if (!g.contains(v)) throw DomainError("compare: cycle references a node outside the graph");
    }
  }
  if (!options.cycle_scores.empty() && options.cycle_scores.size() != items.size()) {
    throw DomainError("compare: cycle score count does not match the cycle set");
  }

  ComparisonReport report;
  report.cycle_count = items.size();
  std::vector<double> computed;
  std::span<const double> cycle_scores = options.cycle_scores;
  if (cycle_scores.empty() && !items.empty() && !partitions.empty()) {
    for (const ScoreSummary& s : score_summaries(registry, cycles, ctx, options.threads)) computed.push_back(s.score);
    cycle_scores = computed;
  }

  std::size_t rows_left = options.max_pair_rows.value_or(std::numeric_limits<std::size_t>::max());
  for (const auto& [name, p] : partitions) {
    GroupCount count;
    count.algorithm = name;
    count.communities = p.community_count;
    count.modularity = g.edge_count() > 0 ? modularity(g, p) : 0.0;

    std::vector<CommunityId> home(items.size());
    parallel_for(items.size(), options.threads, [&](std::size_t i) {
      thread_local std::vector<CommunityId> buf;
      home[i] = majority_community(p, items[i].vertices(), buf);
    });

    const auto members = p.members();
    std::vector<CommunityId> used;
    for (CommunityId c : home) {
      if (c != kSplit) used.push_back(c);
    }
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::vector<double> community_score(p.community_count, 0.0);
    parallel_for(used.size(), options.threads, [&](std::size_t i) {
      community_score[used[i]] = score_group(registry, members[used[i]], ctx).score;
    });

    double cycle_sum = 0.0;
    double community_sum = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const CommunityId c = home[i];
      if (c == kSplit) {
        ++count.split_cycles;
        continue;
      }
      ++count.paired_cycles;
      cycle_sum += cycle_scores[i];
      community_sum += community_score[c];
      if (rows_left == 0) {
        ++report.pairs_omitted;
        continue;
      }
      --rows_left;
      report.pairs.push_back(PairRow{name, c, members[c].size(), community_score[c], i, items[i].length(),
                                     cycle_scores[i]});
    }
    if (count.paired_cycles > 0) {
      count.mean_cycle_score = cycle_sum / static_cast<double>(count.paired_cycles);
      count.mean_community_score = community_sum / static_cast<double>(count.paired_cycles);
    }
    report.group_counts.push_back(count);
  }
  return report;
}

void write_comparison_csv(std::ostream& out, const ComparisonReport& report) {
  out << "algorithm,community_id,community_nodes,community_score,cycle_id,cycle_nodes,cycle_score\n";
  for (const PairRow& r : report.pairs) {
    csv::write_row(out, {r.algorithm, std::to_string(r.community_id), std::to_string(r.community_size),
                         csv::format_number(r.community_score), std::to_string(r.cycle_id),
                         std::to_string(r.cycle_size), csv::format_number(r.cycle_score)});
  }
}

}  // namespace fraudring
