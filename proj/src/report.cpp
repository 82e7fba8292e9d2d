#include "fraudring/report.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "fraudring/error.hpp"

namespace fraudring {

using Json = nlohmann::ordered_json;

namespace {

Json to_json(const ParseReport& p) {
  return {{"rows", p.rows},
          {"accepted", p.accepted},
          {"missing_driver", p.missing_driver},
          {"malformed", p.malformed},
          {"bad_date", p.bad_date},
          {"duplicate_pairs", p.duplicate_pairs}};
}

ParseReport parse_report_from(const Json& j) {
  ParseReport p;
  p.rows = j.at("rows").get<std::uint64_t>();
  p.accepted = j.at("accepted").get<std::uint64_t>();
  p.missing_driver = j.at("missing_driver").get<std::uint64_t>();
  p.malformed = j.at("malformed").get<std::uint64_t>();
  p.bad_date = j.at("bad_date").get<std::uint64_t>();
  p.duplicate_pairs = j.at("duplicate_pairs").get<std::uint64_t>();
  return p;
}

Json to_json(const DegreeSummary& d, std::size_t components) {
  return {{"nodes", d.nodes},
          {"edges", d.edges},
          {"components", components},
          {"min_degree", d.min_degree},
          {"max_degree", d.max_degree}};
}

DegreeSummary degree_summary_from(const Json& j) {
  DegreeSummary d;
  d.nodes = j.at("nodes").get<std::size_t>();
  d.edges = j.at("edges").get<std::size_t>();
  d.min_degree = j.at("min_degree").get<std::size_t>();
  d.max_degree = j.at("max_degree").get<std::size_t>();
  return d;
}

Json to_json(const SizeBands& b) {
  return {{"total", b.total},
          {"n_eq_2", b.length_2},
          {"n_eq_3", b.length_3},
          {"3_lt_n_lt_50", b.over_3_under_50},
          {"5_lt_n_lt_10", b.over_5_under_10},
          {"10_le_n_lt_50", b.from_10_under_50},
          {"n_ge_50", b.at_least_50},
          {"n_ge_100", b.at_least_100},
          {"n_ge_150", b.at_least_150},
          {"n_ge_200", b.at_least_200},
          {"n_ge_500", b.at_least_500}};
}

SizeBands bands_from(const Json& j) {
  SizeBands b;
  b.total = j.at("total").get<std::size_t>();
  b.length_2 = j.at("n_eq_2").get<std::size_t>();
  b.length_3 = j.at("n_eq_3").get<std::size_t>();
  b.over_3_under_50 = j.at("3_lt_n_lt_50").get<std::size_t>();
  b.over_5_under_10 = j.at("5_lt_n_lt_10").get<std::size_t>();
  b.from_10_under_50 = j.at("10_le_n_lt_50").get<std::size_t>();
  b.at_least_50 = j.at("n_ge_50").get<std::size_t>();
  b.at_least_100 = j.at("n_ge_100").get<std::size_t>();
  b.at_least_150 = j.at("n_ge_150").get<std::size_t>();
  b.at_least_200 = j.at("n_ge_200").get<std::size_t>();
  b.at_least_500 = j.at("n_ge_500").get<std::size_t>();
  return b;
}

TraversalStrategy strategy_from(const Json& j) {
  const auto s = parse_strategy(j.get<std::string>());
  if (!s) throw FormatError("report JSON: unknown strategy '" + j.get<std::string>() + "'");
  return *s;
}

Json to_json(const EnumerationSummary& e) {
  Json j{{"strategy", to_string(e.strategy)},
         {"root_mode", to_string(e.root_mode)},
         {"max_length_exclusive", nullptr},
         {"roots", e.stats.roots},
         {"emitted", e.stats.emitted},
         {"dropped_too_long", e.stats.dropped_too_long},
         {"bands", to_json(e.bands)},
         {"filtered", e.filtered}};
  if (e.max_length_exclusive) j["max_length_exclusive"] = *e.max_length_exclusive;
  return j;
}

EnumerationSummary enumeration_from(const Json& j) {
  EnumerationSummary e;
  e.strategy = strategy_from(j.at("strategy"));
  const auto mode = parse_root_mode(j.at("root_mode").get<std::string>());
  if (!mode) throw FormatError("report JSON: unknown root mode");
  e.root_mode = *mode;
  if (!j.at("max_length_exclusive").is_null()) e.max_length_exclusive = j["max_length_exclusive"].get<std::size_t>();
  e.stats.roots = j.at("roots").get<std::uint64_t>();
  e.stats.emitted = j.at("emitted").get<std::uint64_t>();
  e.stats.dropped_too_long = j.at("dropped_too_long").get<std::uint64_t>();
  e.bands = bands_from(j.at("bands"));
  e.filtered = j.at("filtered").get<std::size_t>();
  return e;
}

Json to_json(const Indicator& ind) {
  return {{"id", ind.id},
          {"kind", to_string(ind.kind)},
          {"direction", to_string(ind.direction)},
          {"threshold", ind.threshold},
          {"weight", ind.weight}};
}

Indicator indicator_from(const Json& j) {
  Indicator ind;
  ind.id = j.at("id").get<std::string>();
  const auto kind = parse_indicator_kind(j.at("kind").get<std::string>());
  const auto dir = parse_direction(j.at("direction").get<std::string>());
  if (!kind || !dir) throw FormatError("report JSON: bad indicator '" + ind.id + "'");
  ind.kind = *kind;
  ind.direction = *dir;
  ind.threshold = j.at("threshold").get<double>();
  ind.weight = j.at("weight").get<double>();
  return ind;
}

Json to_json(const RankedEntry& r) {
  Json raw = Json::array();
  for (const RawValue& v : r.raw_values) {
    if (v && std::isfinite(*v)) {
      raw.push_back(*v);
    } else {
      raw.push_back(nullptr);
    }
  }
  return {{"rank", r.rank},
          {"cycle_id", r.cycle_id},
          {"n", r.n},
          {"m", r.m},
          {"density", r.density},
          {"score", r.score},
          {"node_external_keys", r.node_keys},
          {"raw_values", raw},
          {"flags", r.flags}};
}

RankedEntry ranked_from(const Json& j) {
  RankedEntry r;
  r.rank = j.at("rank").get<std::size_t>();
  r.cycle_id = j.at("cycle_id").get<std::size_t>();
  r.n = j.at("n").get<std::size_t>();
  r.m = j.at("m").get<std::size_t>();
  r.density = j.at("density").get<double>();
  r.score = j.at("score").get<double>();
  r.node_keys = j.at("node_external_keys").get<std::vector<std::string>>();
  for (const auto& v : j.at("raw_values")) {
    if (v.is_null()) {
      r.raw_values.push_back(std::nullopt);
    } else {
      r.raw_values.push_back(v.get<double>());
    }
  }
  r.flags = j.at("flags").get<std::vector<int>>();
  return r;
}

Json to_json(const ComparisonReport& c) {
  Json groups = Json::array();
  for (const GroupCount& g : c.group_counts) {
    groups.push_back({{"algorithm", g.algorithm},
                      {"communities", g.communities},
                      {"modularity", g.modularity},
                      {"paired_cycles", g.paired_cycles},
                      {"split_cycles", g.split_cycles},
                      {"mean_cycle_score", g.mean_cycle_score},
                      {"mean_community_score", g.mean_community_score}});
  }
  Json pairs = Json::array();
  for (const PairRow& p : c.pairs) {
    pairs.push_back({{"algorithm", p.algorithm},
                     {"community_id", p.community_id},
                     {"community_nodes", p.community_size},
                     {"community_score", p.community_score},
                     {"cycle_id", p.cycle_id},
                     {"cycle_nodes", p.cycle_size},
                     {"cycle_score", p.cycle_score}});
  }
  return {{"cycle_count", c.cycle_count},
          {"groups", groups},
          {"pairs", pairs},
          {"pairs_omitted", c.pairs_omitted}};
}

ComparisonReport comparison_from(const Json& j) {
  ComparisonReport c;
  c.cycle_count = j.at("cycle_count").get<std::size_t>();
  for (const auto& g : j.at("groups")) {
    GroupCount gc;
    gc.algorithm = g.at("algorithm").get<std::string>();
    gc.communities = g.at("communities").get<std::size_t>();
    gc.modularity = g.at("modularity").get<double>();
    gc.paired_cycles = g.at("paired_cycles").get<std::size_t>();
    gc.split_cycles = g.at("split_cycles").get<std::size_t>();
    gc.mean_cycle_score = g.at("mean_cycle_score").get<double>();
    gc.mean_community_score = g.at("mean_community_score").get<double>();
    c.group_counts.push_back(std::move(gc));
  }
  for (const auto& p : j.at("pairs")) {
    PairRow row;
    row.algorithm = p.at("algorithm").get<std::string>();
    row.community_id = p.at("community_id").get<CommunityId>();
    row.community_size = p.at("community_nodes").get<std::size_t>();
    row.community_score = p.at("community_score").get<double>();
    row.cycle_id = p.at("cycle_id").get<std::size_t>();
    row.cycle_size = p.at("cycle_nodes").get<std::size_t>();
    row.cycle_score = p.at("cycle_score").get<double>();
    c.pairs.push_back(std::move(row));
  }
  c.pairs_omitted = j.at("pairs_omitted").get<std::size_t>();
  return c;
}

Json to_json(const RunMetadata& m) {
  Json stages = Json::object();
  for (const auto& [k, v] : m.stage_seconds) stages[k] = v;
  return {{"started_at", m.started_at}, {"threads", m.threads}, {"stage_seconds", stages}};
}

RunMetadata metadata_from(const Json& j) {
  RunMetadata m;
  m.started_at = j.at("started_at").get<std::string>();
  m.threads = j.at("threads").get<unsigned>();
  for (const auto& [k, v] : j.at("stage_seconds").items()) m.stage_seconds[k] = v.get<double>();
  return m;
}

}  // namespace

void check_consistency(const RunReport& r) {
  const auto& in = r.ingestion;
  if (in.parse.accepted + in.parse.missing_driver + in.parse.malformed + in.parse.duplicate_pairs != in.parse.rows) {
    throw DomainError("report: row outcome counts do not add up to rows read");
  }
  if (in.after_pruning.nodes > in.before_pruning.nodes || in.after_pruning.edges > in.before_pruning.edges) {
    throw DomainError("report: pruning increased the network");
  }
  if (in.after_pruning.nodes > 0 && in.after_pruning.min_degree < 2) {
    throw DomainError("report: pruned network has a node of degree < 2");
  }
  for (const EnumerationSummary& e : r.enumerations) {
    if (e.filtered > e.bands.total) throw DomainError("report: more filtered cycles than enumerated");
  }
  if (!r.enumerations.empty() && r.cycle_count != r.enumerations.front().filtered) {
    throw DomainError("report: cycle count disagrees with the primary enumeration");
  }
  if (r.ranked.size() > r.cycle_count) throw DomainError("report: more ranked rows than cycles");
  for (std::size_t i = 0; i < r.ranked.size(); ++i) {
    if (r.ranked[i].rank != i + 1) throw DomainError("report: ranks are not consecutive");
  }
  if (r.comparison) {
    if (r.comparison->cycle_count != r.cycle_count) throw DomainError("report: comparison cycle count differs");
    for (const GroupCount& g : r.comparison->group_counts) {
      if (g.paired_cycles + g.split_cycles != r.cycle_count) {
        throw DomainError("report: comparison pairs and splits do not cover the cycles");
      }
    }
  }
}

void write_report_json(std::ostream& out, const RunReport& r, bool include_metadata) {
  Json j;
  j["input"] = r.input;
  j["bounds"] = {{"min_exclusive", r.min_exclusive}, {"max_exclusive", r.max_exclusive}};
  j["indicators"] = Json::array();
  for (const Indicator& ind : r.indicators) j["indicators"].push_back(to_json(ind));
  j["ingestion"] = {{"parse", to_json(r.ingestion.parse)},
                    {"collisions", r.ingestion.collisions},
                    {"before_pruning", to_json(r.ingestion.before_pruning, r.ingestion.components_before)},
                    {"after_pruning", to_json(r.ingestion.after_pruning, r.ingestion.components_after)}};
  j["enumerations"] = Json::array();
  for (const EnumerationSummary& e : r.enumerations) j["enumerations"].push_back(to_json(e));
  if (r.cross_check) {
    const CrossCheck& c = *r.cross_check;
    j["cross_check"] = {{"first", to_string(c.first)},
                        {"second", to_string(c.second)},
                        {"first_count", c.first_count},
                        {"second_count", c.second_count},
                        {"only_in_first", c.difference.only_in_first},
                        {"only_in_second", c.difference.only_in_second},
                        {"symmetric_difference", c.difference.symmetric()},
                        {"identical", c.identical()}};
  } else {
    j["cross_check"] = nullptr;
  }
  j["cycle_count"] = r.cycle_count;
  j["ranked"] = Json::array();
  for (const RankedEntry& e : r.ranked) j["ranked"].push_back(to_json(e));
  j["comparison"] = r.comparison ? to_json(*r.comparison) : Json(nullptr);
  if (include_metadata) j["metadata"] = to_json(r.metadata);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write error in report JSON");
}

void write_metadata_json(std::ostream& out, const RunMetadata& m) {
  out << to_json(m).dump(2) << '\n';
  if (!out) throw IoError("write error in metadata JSON");
}

RunReport read_report_json(std::istream& in) {
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("report JSON: ") + e.what());
  }
  try {
    RunReport r;
    r.input = j.at("input").get<std::string>();
    r.min_exclusive = j.at("bounds").at("min_exclusive").get<std::size_t>();
    r.max_exclusive = j.at("bounds").at("max_exclusive").get<std::size_t>();
    for (const auto& ind : j.at("indicators")) r.indicators.push_back(indicator_from(ind));
    const Json& ing = j.at("ingestion");
    r.ingestion.parse = parse_report_from(ing.at("parse"));
    r.ingestion.collisions = ing.at("collisions").get<std::size_t>();
    r.ingestion.before_pruning = degree_summary_from(ing.at("before_pruning"));
    r.ingestion.components_before = ing.at("before_pruning").at("components").get<std::size_t>();
    r.ingestion.after_pruning = degree_summary_from(ing.at("after_pruning"));
    r.ingestion.components_after = ing.at("after_pruning").at("components").get<std::size_t>();
    for (const auto& e : j.at("enumerations")) r.enumerations.push_back(enumeration_from(e));
    if (!j.at("cross_check").is_null()) {
      const Json& c = j["cross_check"];
      CrossCheck cc;
      cc.first = strategy_from(c.at("first"));
      cc.second = strategy_from(c.at("second"));
      cc.first_count = c.at("first_count").get<std::size_t>();
      cc.second_count = c.at("second_count").get<std::size_t>();
      cc.difference.only_in_first = c.at("only_in_first").get<std::size_t>();
      cc.difference.only_in_second = c.at("only_in_second").get<std::size_t>();
      r.cross_check = cc;
    }
    r.cycle_count = j.at("cycle_count").get<std::size_t>();
    for (const auto& e : j.at("ranked")) r.ranked.push_back(ranked_from(e));
    if (!j.at("comparison").is_null()) r.comparison = comparison_from(j["comparison"]);
    if (j.contains("metadata")) r.metadata = metadata_from(j["metadata"]);
    return r;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("report JSON: ") + e.what());
  }
}

void write_summary(std::ostream& out, const RunReport& r) {
  const auto& in = r.ingestion;
  out << "rows " << in.parse.rows << ", accepted " << in.parse.accepted << ", missing driver "
      << in.parse.missing_driver << ", malformed " << in.parse.malformed << ", bad date " << in.parse.bad_date
      << ", duplicate pairs " << in.parse.duplicate_pairs << '\n';
  out << "collisions " << in.collisions << '\n';
  out << "network: " << in.before_pruning.nodes << " nodes, " << in.before_pruning.edges << " edges, "
      << in.components_before << " components\n";
  out << "2-core:  " << in.after_pruning.nodes << " nodes, " << in.after_pruning.edges << " edges, "
      << in.components_after << " components, min degree " << in.after_pruning.min_degree << '\n';
  for (const EnumerationSummary& e : r.enumerations) {
    out << to_string(e.strategy) << '/' << to_string(e.root_mode) << ": " << e.bands.total << " cycles ("
        << e.bands.over_5_under_10 << " with 5<n<10, " << e.bands.from_10_under_50 << " with 10<=n<50, "
        << e.bands.at_least_50 << " with n>=50), " << e.filtered << " kept\n";
  }
  if (r.cross_check) {
    out << "strategy cross-check: " << r.cross_check->difference.only_in_first << " only in "
        << to_string(r.cross_check->first) << ", " << r.cross_check->difference.only_in_second << " only in "
        << to_string(r.cross_check->second) << '\n';
  }
  if (r.comparison) {
    out << "cycles " << r.comparison->cycle_count << '\n';
    for (const GroupCount& g : r.comparison->group_counts) {
      out << g.algorithm << ": " << g.communities << " communities, Q " << g.modularity << ", mean cycle score "
          << g.mean_cycle_score << " vs community " << g.mean_community_score << '\n';
    }
  }
}

}  // namespace fraudring
