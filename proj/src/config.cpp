#include "fraudring/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

#include "fraudring/csv.hpp"
#include "fraudring/error.hpp"

namespace fraudring {

namespace {

constexpr ExportFormat kAllFormats[] = {ExportFormat::RankedCsv, ExportFormat::Json, ExportFormat::GraphMl,
                                        ExportFormat::Dot, ExportFormat::Comparison};

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = csv::trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_integer(std::string_view key, std::string_view v) {
  T out{};
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) {
    throw FormatError("config '" + std::string(key) + "': expected a non-negative integer, got '" +
                      std::string(v) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) {
    throw FormatError("config '" + std::string(key) + "': expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw FormatError("config '" + std::string(key) + "': expected true or false, got '" + std::string(v) + "'");
}

Indicator parse_indicator(std::string_view v) {
  const auto parts = split_list(v);
  if (parts.size() != 5) {
    throw FormatError("indicator needs 'id, kind, direction, threshold, weight', got '" + std::string(v) + "'");
  }
  Indicator ind;
  ind.id = std::string(parts[0]);
  const auto kind = parse_indicator_kind(parts[1]);
  if (!kind) throw FormatError("indicator '" + ind.id + "': unknown kind '" + std::string(parts[1]) + "'");
  const auto dir = parse_direction(parts[2]);
  if (!dir) throw FormatError("indicator '" + ind.id + "': unknown direction '" + std::string(parts[2]) + "'");
  ind.kind = *kind;
  ind.direction = *dir;
  ind.threshold = parse_real("indicator", parts[3]);
  ind.weight = parse_real("indicator", parts[4]);
  return ind;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

}  // namespace

std::string_view to_string(ExportFormat f) {
  switch (f) {
    case ExportFormat::RankedCsv: return "csv";
    case ExportFormat::Json: return "json";
    case ExportFormat::GraphMl: return "graphml";
    case ExportFormat::Dot: return "dot";
    case ExportFormat::Comparison: return "comparison";
  }
  return "?";
}

std::optional<ExportFormat> parse_export_format(std::string_view s) {
  for (ExportFormat f : kAllFormats) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

bool RunConfig::exports(ExportFormat f) const {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

void validate(const RunConfig& cfg, bool need_output) {
  if (cfg.input.empty()) throw DomainError("config: input path is empty");
  if (need_output && cfg.output_dir.empty()) throw DomainError("config: output directory is empty");
  if (cfg.min_exclusive == 0 || cfg.min_exclusive >= cfg.max_exclusive) {
    throw DomainError("config: need 0 < min_exclusive < max_exclusive (got " + std::to_string(cfg.min_exclusive) +
                      ", " + std::to_string(cfg.max_exclusive) + ")");
  }
  if (cfg.indicators.empty()) throw DomainError("config: indicator registry is empty");
  validate_registry(cfg.indicators);
  if (cfg.threads == 0) throw DomainError("config: threads must be >= 1");
  if (!cfg.partition_file.empty() && cfg.partition_name.empty()) {
    throw DomainError("config: partition_name is empty");
  }
  for (CommunityAlgorithm a : cfg.baselines) {
    if (cfg.partition_name == to_string(a) && !cfg.partition_file.empty()) {
      throw DomainError("config: partition_name collides with baseline '" + std::string(to_string(a)) + "'");
    }
  }
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  value = csv::trim(value);
  if (key == "input") {
    cfg.input = std::string(value);
  } else if (key == "output") {
    cfg.output_dir = std::string(value);
  } else if (key == "min_exclusive") {
    cfg.min_exclusive = parse_integer<std::size_t>(key, value);
  } else if (key == "max_exclusive") {
    cfg.max_exclusive = parse_integer<std::size_t>(key, value);
  } else if (key == "strategy") {
    const auto s = parse_strategy(value);
    if (!s) throw FormatError("config 'strategy': expected bfs or dfs, got '" + std::string(value) + "'");
    cfg.strategy = *s;
  } else if (key == "root_mode") {
    const auto m = parse_root_mode(value);
    if (!m) {
      throw FormatError("config 'root_mode': expected all-roots or single-root, got '" + std::string(value) + "'");
    }
    cfg.root_mode = *m;
  } else if (key == "cross_check") {
    cfg.cross_check = parse_bool(key, value);
  } else if (key == "baselines") {
    cfg.baselines.clear();
    for (auto item : split_list(value)) {
      if (item == "none") continue;
      const auto a = parse_community_algorithm(item);
      if (!a) throw FormatError("config 'baselines': unknown algorithm '" + std::string(item) + "'");
      if (std::find(cfg.baselines.begin(), cfg.baselines.end(), *a) == cfg.baselines.end()) {
        cfg.baselines.push_back(*a);
      }
    }
  } else if (key == "partition") {
    cfg.partition_file = std::string(value);
  } else if (key == "partition_name") {
    cfg.partition_name = std::string(value);
  } else if (key == "seed") {
    cfg.seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "threads") {
    cfg.threads = parse_integer<unsigned>(key, value);
  } else if (key == "formats") {
    cfg.formats.clear();
    for (auto item : split_list(value)) {
      if (item == "none") continue;
      if (item == "all") {
        cfg.formats.assign(std::begin(kAllFormats), std::end(kAllFormats));
        continue;
      }
      const auto f = parse_export_format(item);
      if (!f) throw FormatError("config 'formats': unknown format '" + std::string(item) + "'");
      if (!cfg.exports(*f)) cfg.formats.push_back(*f);
    }
  } else if (key == "component_limit") {
    cfg.component_limit = parse_integer<std::size_t>(key, value);
  } else if (key == "report_rows") {
    cfg.report_rows = parse_integer<std::size_t>(key, value);
  } else if (key == "indicator") {
    cfg.indicators.push_back(parse_indicator(value));
  } else {
    throw FormatError("config: unknown key '" + std::string(key) + "'");
  }
}

void parse_config(std::istream& in, RunConfig& cfg) {
  if (!in) throw IoError("config stream is not readable");
  std::string line;
  std::size_t line_no = 0;
  bool registry_replaced = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = csv::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = csv::trim(view.substr(0, eq));
    if (key == "indicator" && !registry_replaced) {
      cfg.indicators.clear();
      registry_replaced = true;
    }
    try {
      apply_setting(cfg, key, view.substr(eq + 1));
    } catch (const FormatError& e) {
      throw FormatError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (in.bad()) throw IoError("read error in config input");
}

RunConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  RunConfig cfg;
  parse_config(in, cfg);
  return cfg;
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  out << "input = " << cfg.input << '\n';
  out << "output = " << cfg.output_dir << '\n';
  out << "min_exclusive = " << cfg.min_exclusive << '\n';
  out << "max_exclusive = " << cfg.max_exclusive << '\n';
  out << "strategy = " << to_string(cfg.strategy) << '\n';
  out << "root_mode = " << to_string(cfg.root_mode) << '\n';
  out << "cross_check = " << (cfg.cross_check ? "true" : "false") << '\n';
  std::vector<std::string> names;
  for (CommunityAlgorithm a : cfg.baselines) names.emplace_back(to_string(a));
  out << "baselines = " << (names.empty() ? "none" : join(names)) << '\n';
  if (!cfg.partition_file.empty()) {
    out << "partition = " << cfg.partition_file << '\n';
    out << "partition_name = " << cfg.partition_name << '\n';
  }
  out << "seed = " << cfg.seed << '\n';
  out << "threads = " << cfg.threads << '\n';
  names.clear();
  for (ExportFormat f : cfg.formats) names.emplace_back(to_string(f));
  out << "formats = " << (names.empty() ? "none" : join(names)) << '\n';
  out << "component_limit = " << cfg.component_limit << '\n';
  out << "report_rows = " << cfg.report_rows << '\n';
  for (const Indicator& ind : cfg.indicators) {
    out << "indicator = " << ind.id << ", " << to_string(ind.kind) << ", " << to_string(ind.direction) << ", "
        << csv::format_number(ind.threshold) << ", " << csv::format_number(ind.weight) << '\n';
  }
}

std::optional<unsigned> threads_from_env() {
  const char* v = std::getenv(kThreadsEnv);
  if (!v) return std::nullopt;
  const std::string_view s = csv::trim(v);
  unsigned out = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || out == 0) return std::nullopt;
  return out;
}

}  // namespace fraudring
