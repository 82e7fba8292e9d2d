// fraudring: cycle-based fraud ring detection over collision networks.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fraudring/community.hpp"
#include "fraudring/config.hpp"
#include "fraudring/error.hpp"
#include "fraudring/export.hpp"
#include "fraudring/ingestion.hpp"
#include "fraudring/pipeline.hpp"
#include "fraudring/report.hpp"
#include "fraudring/scoring.hpp"
#include "fraudring/synth.hpp"

namespace fs = std::filesystem;
using namespace fraudring;

namespace {

// Flag values are kept as text and applied with the config-file rules, so a
// flag and a config line always mean the same thing.
struct Overrides {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::vector<std::string> indicators;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_file.empty()) cfg = read_config_file(config_file);
    if (auto t = threads_from_env()) cfg.threads = *t;
    for (const auto& [k, v] : values) apply_setting(cfg, k, v);
    if (!indicators.empty()) {
      cfg.indicators.clear();
      for (const auto& ind : indicators) apply_setting(cfg, "indicator", ind);
    }
    return cfg;
  }
};

void add_config(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config_file, "Key-value config file; flags override it")
      ->check(CLI::ExistingFile);
}

void add_input(CLI::App* app, Overrides& o) {
  o.add(app, "-i,--input", "input", "Collision CSV (collision_id,driver_id,vehicle_id,date)");
}

void add_detection(CLI::App* app, Overrides& o) {
  o.add(app, "--min-exclusive", "min_exclusive", "Keep cycles longer than this (default 3)");
  o.add(app, "--max-exclusive", "max_exclusive", "Keep cycles shorter than this (default 50)");
  o.add(app, "--strategy", "strategy", "bfs or dfs");
  o.add(app, "--root-mode", "root_mode", "all-roots or single-root");
  o.add(app, "--threads", "threads", "Thread hint (also FRAUDRING_THREADS)");
}

void add_scoring(CLI::App* app, Overrides& o) {
  app->add_option("--indicator", o.indicators,
                  "'id, Kind, direction, threshold, weight'; repeatable, replaces the registry");
}

void add_baselines(CLI::App* app, Overrides& o) {
  o.add(app, "--baselines", "baselines", "Comma list of multilevel, fastgreedy (or none)");
  o.add(app, "--partition", "partition", "External partition CSV (node_external_key,community_id)");
  o.add(app, "--partition-name", "partition_name", "Label for the external partition");
}

PreparedNetwork load(const RunConfig& cfg) {
  if (cfg.input.empty()) throw StageError(Stage::Config, "no input given");
  const ParsedCollisions parsed = in_stage(Stage::Ingest, [&] { return parse_collisions_file(cfg.input); });
  return in_stage(Stage::Ingest, [&] { return prepare_network(parsed); });
}

std::ofstream open_file(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(std::stoul(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

int cmd_run(const Overrides& o) {
  const RunConfig cfg = in_stage(Stage::Config, [&] { return o.resolve(); });
  const PipelineOutput out = run_pipeline(cfg, &std::cerr);
  write_summary(std::cout, out.report);
  std::cout << "wrote " << cfg.output_dir << '\n';
  return 0;
}

struct GenOptions {
  std::optional<std::size_t> drivers;
  std::optional<std::size_t> collisions;
  std::optional<double> three_party;
  std::string rings;
  std::string chords;
  std::string attachments;
  std::optional<std::uint64_t> seed;
  bool no_dates = false;
  bool rings_from_pool = false;
  std::string out;
  std::string truth;
};

int cmd_gen(const GenOptions& g) {
  SyntheticSpec spec = default_benchmark_spec();
  if (g.drivers) spec.driver_count = *g.drivers;
  if (g.collisions) spec.background_collision_count = *g.collisions;
  if (g.three_party) spec.three_party_probability = *g.three_party;
  if (g.seed) spec.seed = *g.seed;
  spec.with_dates = !g.no_dates;
  spec.rings_use_pool = g.rings_from_pool;
  const auto at = [](const std::vector<std::size_t>& v, std::size_t i) -> std::size_t {
    if (v.empty()) return 0;
    return i < v.size() ? v[i] : v.back();
  };
  in_stage(Stage::Config, [&] {
    if (!g.rings.empty()) {
      spec.planted_rings.clear();
      const auto sizes = parse_sizes(g.rings == "none" ? "" : g.rings);
      const auto chords = parse_sizes(g.chords);
      const auto attach = parse_sizes(g.attachments);
      for (std::size_t i = 0; i < sizes.size(); ++i) spec.planted_rings.push_back({sizes[i], at(chords, i), at(attach, i)});
    } else if (!g.chords.empty() || !g.attachments.empty()) {
      const auto chords = parse_sizes(g.chords);
      const auto attach = parse_sizes(g.attachments);
      for (std::size_t i = 0; i < spec.planted_rings.size(); ++i) {
        spec.planted_rings[i].chord_count = at(chords, i);
        spec.planted_rings[i].attachment_edges = at(attach, i);
      }
    }
    validate(spec);
  });
  const SyntheticData data = generate(spec);
  in_stage(Stage::Export, [&] {
    auto out = open_file(g.out);
    write_collisions(out, data.dataset);
    if (!g.truth.empty()) {
      auto t = open_file(g.truth);
      write_ground_truth(t, data.truth);
    }
  });
  std::cout << data.dataset.records.size() << " collisions, " << data.truth.rings.size() << " planted rings -> "
            << g.out << '\n';
  return 0;
}

int cmd_detect(const Overrides& o, const std::string& out_path) {
  RunConfig cfg = in_stage(Stage::Config, [&] { return o.resolve(); });
  in_stage(Stage::Config, [&] { validate(cfg, false); });
  const PreparedNetwork net = load(cfg);
  const Detection d = in_stage(Stage::Detect, [&] {
    return detect(net.pruned.graph, cfg.strategy, cfg.root_mode, cfg.min_exclusive, cfg.max_exclusive, cfg.threads);
  });
  in_stage(Stage::Export, [&] {
    auto out = open_file(out_path);
    write_cycles_csv(out, d.cycles, net.pruned.graph);
  });
  const SizeBands& b = d.summary.bands;
  std::cout << "2-core " << net.stats.after_pruning.nodes << " nodes, " << net.stats.after_pruning.edges
            << " edges\n"
            << to_string(cfg.strategy) << '/' << to_string(cfg.root_mode) << ": " << b.total << " cycles, "
            << b.over_5_under_10 << " with 5<n<10, " << b.from_10_under_50 << " with 10<=n<50; " << d.cycles.size()
            << " kept -> " << out_path << '\n';
  return 0;
}

int cmd_score(const Overrides& o, const std::string& cycles_path, const std::string& out_path) {
  RunConfig cfg = in_stage(Stage::Config, [&] { return o.resolve(); });
  in_stage(Stage::Config, [&] { validate_registry(cfg.indicators); });
  const PreparedNetwork net = load(cfg);
  const CycleSet cycles = in_stage(Stage::Score, [&] {
    std::ifstream in(cycles_path);
    if (!in) throw IoError("cannot open cycle file '" + cycles_path + "'");
    return read_cycles_csv(in, net.pruned.graph);
  });
  std::vector<ScoreSummary> ranked = in_stage(Stage::Score, [&] {
    auto s = score_summaries(cfg.indicators, cycles, ScoringContext(net.pruned), cfg.threads);
    rank_summaries(s);
    return s;
  });
  in_stage(Stage::Export, [&] {
    auto out = open_file(out_path);
    write_ranked_csv(out, ranked, cycles, net.pruned.graph);
  });
  std::cout << ranked.size() << " cycles scored -> " << out_path << '\n';
  return 0;
}

int cmd_compare(const Overrides& o, const std::string& cycles_path, const std::string& out_path,
                const std::string& partitions_dir) {
  RunConfig cfg = in_stage(Stage::Config, [&] { return o.resolve(); });
  in_stage(Stage::Config, [&] { validate(cfg, false); });
  if (cfg.baselines.empty() && cfg.partition_file.empty()) {
    cfg.baselines = {CommunityAlgorithm::Multilevel, CommunityAlgorithm::FastGreedy};
  }
  const PreparedNetwork net = load(cfg);
  const UndirectedMultigraph& g = net.pruned.graph;
  CycleSet cycles;
  if (!cycles_path.empty()) {
    cycles = in_stage(Stage::Detect, [&] {
      std::ifstream in(cycles_path);
      if (!in) throw IoError("cannot open cycle file '" + cycles_path + "'");
      return read_cycles_csv(in, g);
    });
  } else {
    cycles = in_stage(Stage::Detect, [&] {
      return detect(g, cfg.strategy, cfg.root_mode, cfg.min_exclusive, cfg.max_exclusive, cfg.threads).cycles;
    });
  }
  std::map<std::string, Partition> partitions;
  const ComparisonReport report = in_stage(Stage::Baseline, [&] {
    if (g.edge_count() == 0) throw DomainError("the 2-core has no edges");
    for (CommunityAlgorithm a : cfg.baselines) partitions.emplace(to_string(a), detect_communities(g, a).partition);
    if (!cfg.partition_file.empty()) {
      std::ifstream in(cfg.partition_file);
      if (!in) throw IoError("cannot open partition file '" + cfg.partition_file + "'");
      partitions.emplace(cfg.partition_name, read_partition(in, g));
    }
    CompareOptions opt;
    opt.threads = cfg.threads;
    return compare(cycles, partitions, cfg.indicators, ScoringContext(net.pruned), opt);
  });
  in_stage(Stage::Export, [&] {
    auto out = open_file(out_path);
    write_comparison_csv(out, report);
    if (!partitions_dir.empty()) {
      fs::create_directories(partitions_dir);
      for (const auto& [name, p] : partitions) {
        auto f = open_file((fs::path(partitions_dir) / ("partition_" + name + ".csv")).string());
        write_partition(f, g, p);
      }
    }
  });
  std::cout << "cycles " << report.cycle_count << '\n';
  for (const GroupCount& c : report.group_counts) {
    std::cout << c.algorithm << ": " << c.communities << " communities, Q " << c.modularity << ", "
              << c.paired_cycles << " cycles paired, " << c.split_cycles << " split, mean score cycle "
              << c.mean_cycle_score << " vs community " << c.mean_community_score << '\n';
  }
  return 0;
}

int cmd_export(const Overrides& o, const std::string& report_path) {
  RunConfig cfg = in_stage(Stage::Config, [&] { return o.resolve(); });
  if (cfg.output_dir.empty()) throw StageError(Stage::Config, "no output directory given");
  const RunReport report = in_stage(Stage::Export, [&] {
    std::ifstream in(report_path);
    if (!in) throw IoError("cannot open report '" + report_path + "'");
    return read_report_json(in);
  });
  const bool components = cfg.exports(ExportFormat::GraphMl) || cfg.exports(ExportFormat::Dot);
  std::optional<PreparedNetwork> net;
  if (components) {
    if (cfg.input.empty()) cfg.input = report.input;
    net = load(cfg);
  }
  in_stage(Stage::Export, [&] {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    if (cfg.exports(ExportFormat::RankedCsv)) {
      auto f = open_file((dir / "ranked.csv").string());
      write_ranked_csv(f, report.ranked);
    }
    if (cfg.exports(ExportFormat::Json)) {
      auto f = open_file((dir / "report.json").string());
      write_report_json(f, report, false);
    }
    if (cfg.exports(ExportFormat::Comparison) && report.comparison) {
      auto f = open_file((dir / "comparison.csv").string());
      write_comparison_csv(f, *report.comparison);
    }
    if (!components) return;
    const UndirectedMultigraph& g = net->pruned.graph;
    const std::size_t n = std::min(cfg.component_limit, report.ranked.size());
    for (std::size_t i = 0; i < n; ++i) {
      const RankedEntry& r = report.ranked[i];
      std::vector<NodeId> nodes;
      for (const auto& key : r.node_keys) {
        const auto id = g.registry().find(key);
        if (!id) throw DomainError("report node '" + key + "' is not in the 2-core of " + cfg.input);
        nodes.push_back(*id);
      }
      const std::string name = "rank_" + std::to_string(r.rank);
      const ComponentView view = component_view(net->pruned, nodes, name + "_cycle_" + std::to_string(r.cycle_id), r.score);
      if (cfg.exports(ExportFormat::GraphMl)) {
        auto f = open_file((dir / "components" / (name + ".graphml")).string());
        write_graphml(f, view);
      }
      if (cfg.exports(ExportFormat::Dot)) {
        auto f = open_file((dir / "components" / (name + ".dot")).string());
        write_dot(f, view);
      }
    }
  });
  std::cout << "exported " << report.ranked.size() << " ranked cycles -> " << cfg.output_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detect organized fraud rings as cycles in a driver collision network."};
  app.require_subcommand(1);

  Overrides run_o;
  auto* run = app.add_subcommand("run", "Full pipeline: ingest, prune, detect, score, rank, baselines, export");
  add_config(run, run_o);
  add_input(run, run_o);
  run_o.add(run, "-o,--output", "output", "Output directory");
  add_detection(run, run_o);
  run_o.add(run, "--cross-check", "cross_check", "Also run the other strategy and report the difference (true/false)");
  add_scoring(run, run_o);
  add_baselines(run, run_o);
  run_o.add(run, "--formats", "formats", "Comma list of csv, json, graphml, dot, comparison (or all/none)");
  run_o.add(run, "--component-limit", "component_limit", "GraphML/DOT files for this many top cycles");
  run_o.add(run, "--report-rows", "report_rows", "Ranked and pair rows kept in the JSON report");

  GenOptions gen_o;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic collision dataset with planted rings");
  gen->add_option("--drivers", gen_o.drivers, "Background driver pool (default 10000)");
  gen->add_option("--collisions", gen_o.collisions, "Background collisions (default 12000)");
  gen->add_option("--three-party", gen_o.three_party, "Probability of a three-party collision (default 0.1)")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--rings", gen_o.rings, "Comma list of ring sizes (default 4,6,8,12,19; 'none' for no rings)");
  gen->add_option("--chords", gen_o.chords, "Chords per ring, comma list (last value repeats)");
  gen->add_option("--attachments", gen_o.attachments, "Attachment edges per ring, comma list (last value repeats)");
  gen->add_option("--seed", gen_o.seed, "Seed (default 42)");
  gen->add_flag("--no-dates", gen_o.no_dates, "Leave the date column empty");
  gen->add_flag("--rings-from-pool", gen_o.rings_from_pool, "Draw ring drivers from the background pool");
  gen->add_option("-o,--out", gen_o.out, "Collision CSV to write")->required();
  gen->add_option("--truth", gen_o.truth, "Ground-truth JSON to write");

  Overrides det_o;
  std::string det_out;
  auto* det = app.add_subcommand("detect", "Enumerate and filter cycles only");
  add_config(det, det_o);
  add_input(det, det_o);
  add_detection(det, det_o);
  det->add_option("-o,--out", det_out, "Cycle file to write")->required();

  Overrides score_o;
  std::string score_cycles;
  std::string score_out;
  auto* sc = app.add_subcommand("score", "Score and rank the cycles of a cycle file");
  add_config(sc, score_o);
  add_input(sc, score_o);
  score_o.add(sc, "--threads", "threads", "Thread hint (also FRAUDRING_THREADS)");
  add_scoring(sc, score_o);
  sc->add_option("--cycles", score_cycles, "Cycle file from 'detect'")->required()->check(CLI::ExistingFile);
  sc->add_option("-o,--out", score_out, "Ranked CSV to write")->required();

  Overrides cmp_o;
  std::string cmp_cycles;
  std::string cmp_out;
  std::string cmp_partitions;
  auto* cmp = app.add_subcommand("compare", "Compare cycles against community baselines");
  add_config(cmp, cmp_o);
  add_input(cmp, cmp_o);
  add_detection(cmp, cmp_o);
  add_scoring(cmp, cmp_o);
  add_baselines(cmp, cmp_o);
  cmp->add_option("--cycles", cmp_cycles, "Cycle file from 'detect' (default: detect now)")->check(CLI::ExistingFile);
  cmp->add_option("-o,--out", cmp_out, "Comparison CSV to write")->required();
  cmp->add_option("--write-partitions", cmp_partitions, "Directory for partition CSVs");

  Overrides exp_o;
  std::string exp_report;
  auto* exp = app.add_subcommand("export", "Re-export a JSON run report (ranked CSV, GraphML, DOT)");
  add_config(exp, exp_o);
  add_input(exp, exp_o);
  exp_o.add(exp, "-o,--output", "output", "Output directory");
  exp_o.add(exp, "--formats", "formats", "Comma list of csv, json, graphml, dot, comparison");
  exp_o.add(exp, "--component-limit", "component_limit", "GraphML/DOT files for this many top cycles");
  exp->add_option("--report", exp_report, "report.json from 'run'")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code(Stage::Config);
  }

  try {
    if (*run) return cmd_run(run_o);
    if (*gen) return cmd_gen(gen_o);
    if (*det) return cmd_detect(det_o, det_out);
    if (*sc) return cmd_score(score_o, score_cycles, score_out);
    if (*cmp) return cmd_compare(cmp_o, cmp_cycles, cmp_out, cmp_partitions);
    if (*exp) return cmd_export(exp_o, exp_report);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.stage());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
