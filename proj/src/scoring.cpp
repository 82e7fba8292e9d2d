#include "fraudring/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fraudring/error.hpp"
#include "fraudring/parallel.hpp"

namespace fraudring {

std::string_view to_string(IndicatorKind k) {
  switch (k) {
    case IndicatorKind::InducedDensity: return "InducedDensity";
    case IndicatorKind::ChordCount: return "ChordCount";
    case IndicatorKind::RepeatPairCount: return "RepeatPairCount";
    case IndicatorKind::MeanExternalDegree: return "MeanExternalDegree";
    case IndicatorKind::SizeBandScore: return "SizeBandScore";
    case IndicatorKind::TemporalSpanDays: return "TemporalSpanDays";
    case IndicatorKind::External: return "External";
  }
  return "?";
}

std::string_view to_string(Direction d) {
  return d == Direction::HigherSuspicious ? "higher" : "lower";
}

std::optional<IndicatorKind> parse_indicator_kind(std::string_view s) {
  for (auto k : {IndicatorKind::InducedDensity, IndicatorKind::ChordCount, IndicatorKind::RepeatPairCount,
                 IndicatorKind::MeanExternalDegree, IndicatorKind::SizeBandScore,
                 IndicatorKind::TemporalSpanDays, IndicatorKind::External}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<Direction> parse_direction(std::string_view s) {
  if (s == "higher" || s == "HigherSuspicious") return Direction::HigherSuspicious;
  if (s == "lower" || s == "LowerSuspicious") return Direction::LowerSuspicious;
  return std::nullopt;
}

void validate_registry(std::span<const Indicator> registry) {
  std::set<std::string_view> ids;
  for (const Indicator& ind : registry) {
    if (ind.id.empty()) throw DomainError("indicator with empty id");
    if (!std::isfinite(ind.weight) || ind.weight < 0.0) {
      throw DomainError("indicator '" + ind.id + "': weight must be finite and >= 0");
    }
    if (!std::isfinite(ind.threshold)) {
      throw DomainError("indicator '" + ind.id + "': threshold must be finite");
    }
    if (!ids.insert(ind.id).second) throw DomainError("duplicate indicator id '" + ind.id + "'");
  }
}

std::vector<Indicator> default_registry() {
  return {
      {"density", IndicatorKind::InducedDensity, Direction::HigherSuspicious, 0.15, 1.0},
      {"chords", IndicatorKind::ChordCount, Direction::HigherSuspicious, 1.0, 1.0},
      {"repeat_pairs", IndicatorKind::RepeatPairCount, Direction::HigherSuspicious, 1.0, 1.0},
      {"external_degree", IndicatorKind::MeanExternalDegree, Direction::LowerSuspicious, 2.0, 1.0},
      {"size_band", IndicatorKind::SizeBandScore, Direction::HigherSuspicious, 1.0, 1.0},
      {"temporal_span", IndicatorKind::TemporalSpanDays, Direction::LowerSuspicious, 365.0, 1.0},
  };
}

double induced_density(std::size_t n, std::size_t m) {
  if (n < 2) return 0.0;
  return 2.0 * static_cast<double>(m) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

GroupProfile profile_group(const UndirectedMultigraph& g, std::span<const NodeId> nodes) {
  InducedSubgraph sub = induced_subgraph(g, nodes);
  GroupProfile p;
  p.nodes = std::move(sub.nodes);
  p.internal_edges = std::move(sub.edges);
  p.n = p.nodes.size();
  p.m = p.internal_edges.size();
  p.density = induced_density(p.n, p.m);
  return p;
}

RawValue measure(const Indicator& ind, const GroupProfile& group, const ScoringContext& ctx) {
  const UndirectedMultigraph& g = *ctx.graph;
  switch (ind.kind) {
    case IndicatorKind::InducedDensity:
      return group.density;
    case IndicatorKind::ChordCount:
      return static_cast<double>(group.m) - static_cast<double>(group.n);
    case IndicatorKind::RepeatPairCount: {
      std::vector<std::pair<NodeId, NodeId>> pairs;
      pairs.reserve(group.m);
      for (EdgeId e : group.internal_edges) {
        const Edge& ed = g.edge(e);
        pairs.emplace_back(std::min(ed.u, ed.v), std::max(ed.u, ed.v));
      }
      std::sort(pairs.begin(), pairs.end());
      std::size_t repeats = 0;
      for (std::size_t i = 1; i < pairs.size(); ++i) {
        // Count each repeated pair once, at its second occurrence.
        if (pairs[i] == pairs[i - 1] && (i < 2 || pairs[i - 2] != pairs[i])) ++repeats;
      }
      return static_cast<double>(repeats);
    }
    case IndicatorKind::MeanExternalDegree: {
      if (group.n == 0) return std::nullopt;
      std::size_t external = 0;
      for (NodeId v : group.nodes) {
        for (const Incidence& inc : g.incidences(v)) {
          if (!std::binary_search(group.nodes.begin(), group.nodes.end(), inc.neighbor)) ++external;
        }
      }
      return static_cast<double>(external) / static_cast<double>(group.n);
    }
    case IndicatorKind::SizeBandScore:
      return (group.n >= 4 && group.n <= 20) ? 1.0 : 0.0;
    case IndicatorKind::TemporalSpanDays: {
      std::optional<Date> lo, hi;
      for (EdgeId e : group.internal_edges) {
        if (e >= ctx.edge_dates.size() || !ctx.edge_dates[e]) continue;
        const Date d = *ctx.edge_dates[e];
        if (!lo || d < *lo) lo = d;
        if (!hi || d > *hi) hi = d;
      }
      if (!lo) return std::nullopt;
      return static_cast<double>((*hi - *lo).count());
    }
    case IndicatorKind::External:
      if (!ctx.external) return std::nullopt;
      return ctx.external(ind, group.nodes);
  }
  return std::nullopt;
}

RawValue measure(const Indicator& ind, const Cycle& c, const ScoringContext& ctx) {
  return measure(ind, profile_group(*ctx.graph, c.vertices), ctx);
}

int flag(const Indicator& ind, RawValue raw) {
  if (!raw || std::isnan(*raw)) return 0;
  if (ind.direction == Direction::HigherSuspicious) return *raw >= ind.threshold ? 1 : 0;
  return *raw <= ind.threshold ? 1 : 0;
}

double weighted_score(std::span<const Indicator> registry, std::span<const int> flags) {
  if (registry.size() != flags.size()) throw DomainError("weighted_score: flag count mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < flags.size(); ++i) s += registry[i].weight * flags[i];
  return s;
}

namespace {

CycleAssessment assess(std::span<const Indicator> registry, const GroupProfile& p,
                       CanonicalKey key, const ScoringContext& ctx) {
  if (registry.empty()) throw DomainError("score: indicator registry is empty");
  if (!ctx.graph) throw DomainError("score: no graph in scoring context");
  CycleAssessment a;
  a.cycle_key = std::move(key);
  a.n = p.n;
  a.m = p.m;
  a.density = p.density;
  a.density_above_simple_bound = p.density > 1.0;
  a.raw_values.reserve(registry.size());
  a.flags.reserve(registry.size());
  for (const Indicator& ind : registry) {
    a.raw_values.push_back(measure(ind, p, ctx));
    a.flags.push_back(flag(ind, a.raw_values.back()));
  }
  a.score = weighted_score(registry, a.flags);
  return a;
}

}  // namespace

CycleAssessment score_group(std::span<const Indicator> registry, std::span<const NodeId> nodes,
                            const ScoringContext& ctx) {
  if (!ctx.graph) throw DomainError("score: no graph in scoring context");
  GroupProfile p = profile_group(*ctx.graph, nodes);
  CanonicalKey key{p.nodes};
  return assess(registry, p, std::move(key), ctx);
}

CycleAssessment score(std::span<const Indicator> registry, std::span<const NodeId> cycle_vertices,
                      const ScoringContext& ctx) {
  if (!ctx.graph) throw DomainError("score: no graph in scoring context");
  return assess(registry, profile_group(*ctx.graph, cycle_vertices), canonical_key(cycle_vertices), ctx);
}

CycleAssessment score(std::span<const Indicator> registry, const Cycle& c, const ScoringContext& ctx) {
  return score(registry, std::span<const NodeId>(c.vertices), ctx);
}

std::vector<CycleAssessment> rank(std::vector<CycleAssessment> assessments) {
  std::sort(assessments.begin(), assessments.end(), [](const CycleAssessment& a, const CycleAssessment& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.density != b.density) return a.density > b.density;
    return a.cycle_key < b.cycle_key;
  });
  return assessments;
}

std::vector<CycleAssessment> score_all(std::span<const Indicator> registry, const CycleSet& cycles,
                                       const ScoringContext& ctx, unsigned threads) {
  validate_registry(registry);
  const std::vector<CycleSet::EntryRef> items(cycles.begin(), cycles.end());
  std::vector<CycleAssessment> out(items.size());
  parallel_for(items.size(), threads, [&](std::size_t i) { out[i] = score(registry, items[i].vertices(), ctx); });
  return out;
}

std::vector<ScoreSummary> score_summaries(std::span<const Indicator> registry, const CycleSet& cycles,
                                          const ScoringContext& ctx, unsigned threads) {
  validate_registry(registry);
  if (registry.empty()) throw DomainError("score: indicator registry is empty");
  if (!ctx.graph) throw DomainError("score: no graph in scoring context");
  const std::vector<CycleSet::EntryRef> items(cycles.begin(), cycles.end());
  std::vector<ScoreSummary> out(items.size());
  parallel_for(items.size(), threads, [&](std::size_t i) {
    const GroupProfile p = profile_group(*ctx.graph, items[i].vertices());
    double s = 0.0;
    for (const Indicator& ind : registry) s += ind.weight * flag(ind, measure(ind, p, ctx));
    out[i] = ScoreSummary{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(p.n),
                          static_cast<std::uint32_t>(p.m), p.density, s};
  });
  return out;
}

void rank_summaries(std::vector<ScoreSummary>& summaries) {
  std::sort(summaries.begin(), summaries.end(), [](const ScoreSummary& a, const ScoreSummary& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.density != b.density) return a.density > b.density;
    return a.cycle_id < b.cycle_id;
  });
}

}  // namespace fraudring
