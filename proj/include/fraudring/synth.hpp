#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fraudring/cycles.hpp"
#include "fraudring/graph.hpp"
#include "fraudring/ingestion.hpp"

namespace fraudring {

struct PlantedRing {
  std::size_t size = 0;
  std::size_t chord_count = 0;
  std::size_t attachment_edges = 0;
};

struct SyntheticSpec {
  std::size_t driver_count = 0;
  std::size_t background_collision_count = 0;
  /// Probability that a background collision has three parties instead of two.
  double three_party_probability = 0.0;
  std::vector<PlantedRing> planted_rings;
  std::uint64_t seed = 0;
  /// Uniform random collision dates over [first_date, last_date] when set.
  bool with_dates = true;
  Date first_date = Date{std::chrono::year{2007} / 1 / 1};
  Date last_date = Date{std::chrono::year{2012} / 12 / 31};
  /// Collisions of one planted ring are staged within this many days.
  std::uint32_t ring_window_days = 90;
  /// Draw ring drivers from the background pool instead of fresh keys.
  bool rings_use_pool = false;
};

/// 10,000 drivers, 12,000 background collisions, chordless isolated rings
/// of sizes 4, 6, 8, 12 and 19, seed 42.
[[nodiscard]] SyntheticSpec default_benchmark_spec();

/// Throws DomainError for ring sizes < 3, too many chords or negative counts.
void validate(const SyntheticSpec& spec);

struct GroundTruthRing {
  std::vector<std::string> drivers;  // in ring order
  /// Canonical rotation/reflection of the driver keys, joined by '|'.
  std::string key;
};

struct GroundTruth {
  std::vector<GroundTruthRing> rings;

  /// Canonical node-id key of each ring in `g`; nullopt when a driver is
  /// absent from the graph.
  [[nodiscard]] std::vector<std::optional<CanonicalKey>> resolve(const UndirectedMultigraph& g) const;
};

struct SyntheticData {
  CollisionDataset dataset;
  GroundTruth truth;
};

/// Deterministic for a given spec: same spec and seed give identical output
/// on every platform (the generator does not use <random> distributions).
[[nodiscard]] SyntheticData generate(const SyntheticSpec& spec);

/// Fraction of ground-truth rings whose key is present in `detected`, which
/// must have been computed on `g`.
[[nodiscard]] double evaluate_recall(const CycleSet& detected, const GroundTruth& truth,
                                     const UndirectedMultigraph& g);

/// `{"rings": [{"key": ..., "drivers": [...]}]}`
void write_ground_truth(std::ostream& out, const GroundTruth& truth);
[[nodiscard]] GroundTruth read_ground_truth(std::istream& in);

}  // namespace fraudring
