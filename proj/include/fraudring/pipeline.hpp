#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fraudring/community.hpp"
#include "fraudring/config.hpp"
#include "fraudring/cycles.hpp"
#include "fraudring/ingestion.hpp"
#include "fraudring/report.hpp"
#include "fraudring/scoring.hpp"

namespace fraudring {

enum class Stage { Config, Ingest, Detect, Score, Baseline, Export };

[[nodiscard]] std::string_view to_string(Stage s);

/// Process exit status for a failure in `s`: config 1, ingest 2, detect 3,
/// score 4, baseline 5, export 6.
[[nodiscard]] int exit_code(Stage s);

/// what() is "<stage>: <message>".
class StageError : public std::runtime_error {
 public:
  StageError(Stage stage, const std::string& message);
  [[nodiscard]] Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

/// Runs `fn`, rethrowing any std::exception as a StageError for `stage`.
template <typename Fn>
auto in_stage(Stage stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

struct PreparedNetwork {
  IngestionStats stats;
  /// 2-core of the collision network; every later stage works on it.
  CollisionNetwork pruned;
};

[[nodiscard]] PreparedNetwork prepare_network(const ParsedCollisions& parsed);

struct Detection {
  CycleSet cycles;  // after the size filter
  EnumerationSummary summary;
};

/// Enumerates with max_length_exclusive as the cap, then filters.
[[nodiscard]] Detection detect(const UndirectedMultigraph& g, TraversalStrategy strategy, RootMode mode,
                               std::size_t min_exclusive, std::size_t max_exclusive, unsigned threads);

struct PipelineOutput {
  RunReport report;
  CollisionNetwork network;  // pruned
  CycleSet cycles;           // primary filtered set; cycle id = key-order position
  std::vector<ScoreSummary> ranked;
  std::map<std::string, Partition> partitions;
};

/// Everything after parsing, without touching the file system except for
/// an external partition file. Progress and the skip report go to `log`.
[[nodiscard]] PipelineOutput analyze(const ParsedCollisions& parsed, const RunConfig& cfg,
                                     std::ostream* log = nullptr);

/// Writes the selected formats under cfg.output_dir:
/// ranked.csv, cycles.csv, report.json, metadata.json, comparison.csv,
/// partition_<algorithm>.csv and components/rank_<r>.graphml|dot.
void export_outputs(const PipelineOutput& out, const RunConfig& cfg);

/// parse -> analyze -> export. Throws StageError.
[[nodiscard]] PipelineOutput run_pipeline(const RunConfig& cfg, std::ostream* log = nullptr);

}  // namespace fraudring
