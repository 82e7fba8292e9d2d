#include "fraudring/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "fraudring/error.hpp"
#include "fraudring/export.hpp"

namespace fraudring {

namespace fs = std::filesystem;

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Config: return "config";
    case Stage::Ingest: return "ingest";
    case Stage::Detect: return "detect";
    case Stage::Score: return "score";
    case Stage::Baseline: return "baseline";
    case Stage::Export: return "export";
  }
  return "?";
}

int exit_code(Stage s) {
  switch (s) {
    case Stage::Config: return 1;
    case Stage::Ingest: return 2;
    case Stage::Detect: return 3;
    case Stage::Score: return 4;
    case Stage::Baseline: return 5;
    case Stage::Export: return 6;
  }
  return 1;
}

StageError::StageError(Stage stage, const std::string& message)
    : std::runtime_error(std::string(to_string(stage)) + ": " + message), stage_(stage) {}

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class StageClock {
 public:
  explicit StageClock(RunMetadata& meta) : meta_(meta) {}

  template <typename Fn>
  auto run(Stage stage, const std::string& name, Fn&& fn) -> decltype(fn()) {
    const auto start = std::chrono::steady_clock::now();
    struct Record {
      RunMetadata& meta;
      const std::string& name;
      std::chrono::steady_clock::time_point start;
      ~Record() {
        meta.stage_seconds[name] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
    } record{meta_, name, start};
    return in_stage(stage, std::forward<Fn>(fn));
  }

 private:
  RunMetadata& meta_;
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void log_skips(std::ostream* log, const ParseReport& p) {
  if (!log) return;
  if (p.missing_driver + p.malformed + p.bad_date + p.duplicate_pairs == 0) return;
  *log << "skipped rows: " << p.missing_driver << " missing driver, " << p.malformed << " malformed, "
       << p.duplicate_pairs << " duplicate (collision, driver) pairs; " << p.bad_date
       << " unparseable dates dropped\n";
}

}  // namespace

PreparedNetwork prepare_network(const ParsedCollisions& parsed) {
  PreparedNetwork out;
  CollisionNetwork full = build_collision_network(parsed.dataset);
  out.stats.parse = parsed.report;
  out.stats.collisions = parsed.dataset.records.size();
  out.stats.before_pruning = summarize(full.graph);
  out.stats.components_before = connected_components(full.graph).size();
  out.pruned = prune_network(full);
  out.stats.after_pruning = summarize(out.pruned.graph);
  out.stats.components_after = connected_components(out.pruned.graph).size();
  return out;
}

Detection detect(const UndirectedMultigraph& g, TraversalStrategy strategy, RootMode mode,
                 std::size_t min_exclusive, std::size_t max_exclusive, unsigned threads) {
  EnumerationOptions opt;
  opt.strategy = strategy;
  opt.root_mode = mode;
  opt.max_length_exclusive = max_exclusive;
  opt.threads = threads;
  Detection d;
  d.summary.strategy = strategy;
  d.summary.root_mode = mode;
  d.summary.max_length_exclusive = max_exclusive;
  {
    const CycleSet all = enumerate_cycles(g, opt, &d.summary.stats);
    d.summary.bands = size_bands(all);
    d.cycles = filter_by_size(all, min_exclusive, max_exclusive);
  }
  d.summary.filtered = d.cycles.size();
  return d;
}

PipelineOutput analyze(const ParsedCollisions& parsed, const RunConfig& cfg, std::ostream* log) {
  in_stage(Stage::Config, [&] { validate(cfg, false); });
  PipelineOutput out;
  RunReport& report = out.report;
  report.metadata.started_at = utc_now();
  report.metadata.threads = cfg.threads;
  report.input = cfg.input;
  report.min_exclusive = cfg.min_exclusive;
  report.max_exclusive = cfg.max_exclusive;
  report.indicators = cfg.indicators;
  StageClock clock(report.metadata);

  log_skips(log, parsed.report);
  clock.run(Stage::Ingest, "network", [&] {
    PreparedNetwork prep = prepare_network(parsed);
    report.ingestion = prep.stats;
    out.network = std::move(prep.pruned);
  });
  const UndirectedMultigraph& g = out.network.graph;
  if (log) {
    *log << "2-core: " << report.ingestion.after_pruning.nodes << " nodes, " << report.ingestion.after_pruning.edges
         << " edges (from " << report.ingestion.before_pruning.nodes << " nodes, "
         << report.ingestion.before_pruning.edges << " edges)\n";
  }

  clock.run(Stage::Detect, std::string("detect_") + std::string(to_string(cfg.strategy)), [&] {
    Detection d = detect(g, cfg.strategy, cfg.root_mode, cfg.min_exclusive, cfg.max_exclusive, cfg.threads);
    report.enumerations.push_back(d.summary);
    out.cycles = std::move(d.cycles);
  });
  report.cycle_count = out.cycles.size();
  if (cfg.cross_check) {
    const TraversalStrategy other = cfg.strategy == TraversalStrategy::BreadthFirst ? TraversalStrategy::DepthFirst
                                                                                    : TraversalStrategy::BreadthFirst;
    clock.run(Stage::Detect, std::string("detect_") + std::string(to_string(other)), [&] {
      const Detection d = detect(g, other, cfg.root_mode, cfg.min_exclusive, cfg.max_exclusive, cfg.threads);
      report.enumerations.push_back(d.summary);
      CrossCheck cc;
      cc.first = cfg.strategy;
      cc.second = other;
      cc.first_count = out.cycles.size();
      cc.second_count = d.cycles.size();
      cc.difference = compare_keys(out.cycles, d.cycles);
      report.cross_check = cc;
    });
  }
  if (log) {
    for (const EnumerationSummary& e : report.enumerations) {
      *log << to_string(e.strategy) << '/' << to_string(e.root_mode) << ": " << e.bands.total << " cycles, "
           << e.filtered << " within (" << cfg.min_exclusive << ", " << cfg.max_exclusive << ")\n";
    }
  }

  const ScoringContext ctx(out.network);
  std::vector<double> cycle_scores;
  clock.run(Stage::Score, "score", [&] {
    out.ranked = score_summaries(cfg.indicators, out.cycles, ctx, cfg.threads);
    cycle_scores.resize(out.ranked.size());
    for (const ScoreSummary& s : out.ranked) cycle_scores[s.cycle_id] = s.score;
    rank_summaries(out.ranked);
    const std::size_t keep = std::min(cfg.report_rows, out.ranked.size());
    report.ranked.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
      const ScoreSummary& s = out.ranked[i];
      const auto entry = out.cycles.at(s.cycle_id);
      const CycleAssessment a = score(cfg.indicators, entry.vertices(), ctx);
      RankedEntry r;
      r.rank = i + 1;
      r.cycle_id = s.cycle_id;
      r.n = a.n;
      r.m = a.m;
      r.density = a.density;
      r.score = a.score;
      for (NodeId v : entry.vertices()) r.node_keys.push_back(g.key(v));
      r.raw_values = a.raw_values;
      r.flags = a.flags;
      report.ranked.push_back(std::move(r));
    }
  });

  if (!cfg.baselines.empty() || !cfg.partition_file.empty()) {
    if (g.edge_count() == 0) {
      if (log) *log << "baselines skipped: the 2-core has no edges\n";
    } else {
      clock.run(Stage::Baseline, "baselines", [&] {
        for (CommunityAlgorithm a : cfg.baselines) {
          CommunityResult r = detect_communities(g, a);
          out.partitions.emplace(std::string(to_string(a)), std::move(r.partition));
        }
        if (!cfg.partition_file.empty()) {
          std::ifstream in(cfg.partition_file);
          if (!in) throw IoError("cannot open partition file '" + cfg.partition_file + "'");
          std::size_t unknown = 0;
          out.partitions.emplace(cfg.partition_name, read_partition(in, g, &unknown));
          if (log && unknown > 0) *log << "partition: " << unknown << " keys outside the 2-core ignored\n";
        }
        CompareOptions opt;
        opt.threads = cfg.threads;
        opt.max_pair_rows = cfg.report_rows;
        opt.cycle_scores = cycle_scores;
        report.comparison = compare(out.cycles, out.partitions, cfg.indicators, ctx, opt);
      });
    }
  }

  in_stage(Stage::Score, [&] { check_consistency(report); });
  return out;
}

void export_outputs(const PipelineOutput& out, const RunConfig& cfg) {
  in_stage(Stage::Export, [&] {
    if (cfg.output_dir.empty()) throw DomainError("no output directory");
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    const UndirectedMultigraph& g = out.network.graph;
    if (cfg.exports(ExportFormat::RankedCsv)) {
      auto f = open_output(dir / "ranked.csv");
      write_ranked_csv(f, out.ranked, out.cycles, g);
      auto c = open_output(dir / "cycles.csv");
      write_cycles_csv(c, out.cycles, g);
    }
    if (cfg.exports(ExportFormat::Json)) {
      auto f = open_output(dir / "report.json");
      write_report_json(f, out.report, false);
      auto m = open_output(dir / "metadata.json");
      write_metadata_json(m, out.report.metadata);
    }
    if (cfg.exports(ExportFormat::Comparison) && out.report.comparison) {
      auto f = open_output(dir / "comparison.csv");
      write_comparison_csv(f, *out.report.comparison);
      for (const auto& [name, p] : out.partitions) {
        auto pf = open_output(dir / ("partition_" + name + ".csv"));
        write_partition(pf, g, p);
      }
    }
    const bool graphml = cfg.exports(ExportFormat::GraphMl);
    const bool dot = cfg.exports(ExportFormat::Dot);
    if (graphml || dot) {
      const fs::path comp = dir / "components";
      fs::create_directories(comp);
      const std::size_t n = std::min(cfg.component_limit, out.ranked.size());
      for (std::size_t i = 0; i < n; ++i) {
        const ScoreSummary& s = out.ranked[i];
        const std::string name = "rank_" + std::to_string(i + 1);
        const ComponentView view = component_view(out.network, out.cycles.at(s.cycle_id).vertices(),
                                                  name + "_cycle_" + std::to_string(s.cycle_id), s.score);
        if (graphml) {
          auto f = open_output(comp / (name + ".graphml"));
          write_graphml(f, view);
        }
        if (dot) {
          auto f = open_output(comp / (name + ".dot"));
          write_dot(f, view);
        }
      }
    }
  });
}

PipelineOutput run_pipeline(const RunConfig& cfg, std::ostream* log) {
  in_stage(Stage::Config, [&] { validate(cfg, true); });
  const ParsedCollisions parsed = in_stage(Stage::Ingest, [&] { return parse_collisions_file(cfg.input); });
  PipelineOutput out = analyze(parsed, cfg, log);
  export_outputs(out, cfg);
  return out;
}

}  // namespace fraudring
