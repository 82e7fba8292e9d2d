#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fraudring/community.hpp"
#include "fraudring/cycles.hpp"
#include "fraudring/scoring.hpp"

namespace fraudring {

enum class ExportFormat { RankedCsv, Json, GraphMl, Dot, Comparison };

[[nodiscard]] std::string_view to_string(ExportFormat f);
[[nodiscard]] std::optional<ExportFormat> parse_export_format(std::string_view s);

struct RunConfig {
  std::string input;
  std::string output_dir;
  std::size_t min_exclusive = 3;
  std::size_t max_exclusive = 50;
  TraversalStrategy strategy = TraversalStrategy::BreadthFirst;
  RootMode root_mode = RootMode::AllRoots;
  /// Also enumerate with the other strategy and report the symmetric difference.
  bool cross_check = true;
  std::vector<Indicator> indicators = default_registry();
  std::vector<CommunityAlgorithm> baselines;
  /// Optional external partition (`node_external_key,community_id`).
  std::string partition_file;
  std::string partition_name = "external";
  std::uint64_t seed = 42;
  unsigned threads = 1;
  std::vector<ExportFormat> formats = {ExportFormat::RankedCsv, ExportFormat::Json, ExportFormat::GraphMl,
                                       ExportFormat::Dot, ExportFormat::Comparison};
  /// GraphML/DOT files are written for the top this-many ranked cycles.
  std::size_t component_limit = 100;
  /// Caps the ranked and pair rows kept in the JSON report; the ranked CSV is
  /// always complete.
  std::size_t report_rows = 10'000;

  [[nodiscard]] bool exports(ExportFormat f) const;
};

/// Throws DomainError on invalid bounds, registry or empty paths.
/// `need_output` requires a non-empty output directory.
void validate(const RunConfig& cfg, bool need_output = true);

/// Key-value text, one `key = value` per line, `#` starts a comment:
///
///   input = collisions.csv
///   output = out
///   min_exclusive = 3
///   max_exclusive = 50
///   strategy = bfs | dfs
///   root_mode = all-roots | single-root
///   cross_check = true | false
///   baselines = multilevel, fastgreedy
///   partition = walktrap.csv
///   partition_name = walktrap
///   seed = 42
///   threads = 4
///   formats = csv, json, graphml, dot, comparison
///   component_limit = 100
///   report_rows = 10000
///   indicator = density, InducedDensity, higher, 0.15, 1
///
/// Any `indicator` line replaces the default registry; lines accumulate in
/// file order. Unknown keys and malformed values throw FormatError.
/// Relative paths are kept as written.
void parse_config(std::istream& in, RunConfig& cfg);
[[nodiscard]] RunConfig read_config_file(const std::string& path);
void write_config(std::ostream& out, const RunConfig& cfg);

/// Applies `key = value` to `cfg` with the same rules as the file format.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

inline constexpr const char* kThreadsEnv = "FRAUDRING_THREADS";

/// Thread hint from FRAUDRING_THREADS, if set to a positive integer.
[[nodiscard]] std::optional<unsigned> threads_from_env();

}  // namespace fraudring
