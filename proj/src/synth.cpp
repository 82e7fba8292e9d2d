#include "fraudring/synth.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <limits>
#include <random>

#include <json.hpp>

#include "fraudring/error.hpp"

namespace fraudring {

namespace {

// mt19937_64 output is fixed by the standard; the mappings below are ours,
// so the stream is identical on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

std::string padded(char prefix, std::size_t value, int width) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

int digits(std::size_t n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

std::string ring_key(const std::vector<std::string>& drivers) {
  const std::size_t n = drivers.size();
  if (n == 0) return {};
  const std::size_t p = static_cast<std::size_t>(std::min_element(drivers.begin(), drivers.end()) - drivers.begin());
  const bool forward = n < 3 || drivers[(p + 1) % n] < drivers[(p + n - 1) % n];
  std::string key;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) key.push_back('|');
    key += forward ? drivers[(p + i) % n] : drivers[(p + n - i) % n];
  }
  return key;
}

}  // namespace

SyntheticSpec default_benchmark_spec() {
  SyntheticSpec s;
  s.driver_count = 10'000;
  s.background_collision_count = 12'000;
  s.three_party_probability = 0.1;
  for (std::size_t size : {4, 6, 8, 12, 19}) s.planted_rings.push_back({size, 0, 0});
  s.seed = 42;
  return s;
}

void validate(const SyntheticSpec& spec) {
  if (!(spec.three_party_probability >= 0.0 && spec.three_party_probability <= 1.0)) {
    throw DomainError("three_party_probability must lie in [0, 1]");
  }
  if (spec.background_collision_count > 0 && spec.driver_count < 3) {
    throw DomainError("background collisions need at least 3 drivers in the pool");
  }
  if (spec.with_dates && spec.last_date < spec.first_date) {
    throw DomainError("last_date precedes first_date");
  }
  for (const PlantedRing& r : spec.planted_rings) {
    if (r.size < 3) throw DomainError("planted ring size must be >= 3");
    const std::size_t max_chords = r.size * (r.size - 1) / 2 - r.size;
    if (r.chord_count > max_chords) {
      throw DomainError("ring of size " + std::to_string(r.size) + " admits at most " +
                        std::to_string(max_chords) + " chords");
    }
    if (r.attachment_edges > 0 && spec.driver_count == 0) {
      throw DomainError("attachment edges need a background driver pool");
    }
    if (spec.rings_use_pool && r.attachment_edges > 0 && r.size >= spec.driver_count) {
      throw DomainError("attachment edges need pool drivers outside the ring");
    }
    if (spec.rings_use_pool && r.size > spec.driver_count) {
      throw DomainError("ring size " + std::to_string(r.size) + " exceeds the driver pool of " +
                        std::to_string(spec.driver_count));
    }
  }
}

SyntheticData generate(const SyntheticSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  SyntheticData out;
  auto& records = out.dataset.records;

  const int driver_width = digits(spec.driver_count);
  auto driver = [&](std::size_t i) { return padded('D', i, driver_width); };
  const long span_days = spec.with_dates ? (spec.last_date - spec.first_date).count() : 0;
  auto random_date = [&](Date from, long span) -> std::optional<Date> {
    if (!spec.with_dates) return std::nullopt;
    return from + std::chrono::days{static_cast<long>(rng.below(static_cast<std::uint64_t>(span) + 1))};
  };

  const int collision_width = digits(spec.background_collision_count);
  for (std::size_t c = 0; c < spec.background_collision_count; ++c) {
    const std::size_t parties = rng.unit() < spec.three_party_probability ? 3 : 2;
    std::vector<std::size_t> picked;
    while (picked.size() < parties) {
      const std::size_t d = rng.below(spec.driver_count);
      if (std::find(picked.begin(), picked.end(), d) == picked.end()) picked.push_back(d);
    }
    CollisionRecord rec{padded('C', c, collision_width), {}, random_date(spec.first_date, span_days)};
    for (std::size_t d : picked) rec.driver_keys.push_back(driver(d));
    records.push_back(std::move(rec));
  }

  for (std::size_t r = 0; r < spec.planted_rings.size(); ++r) {
    const PlantedRing& ring = spec.planted_rings[r];
    const std::string tag = "R" + std::to_string(r) + "-";
    std::vector<std::string> members;
    if (spec.rings_use_pool) {
      std::vector<std::size_t> picked;
      while (picked.size() < ring.size) {
        const std::size_t d = rng.below(spec.driver_count);
        if (std::find(picked.begin(), picked.end(), d) == picked.end()) picked.push_back(d);
      }
      for (std::size_t d : picked) members.push_back(driver(d));
    } else {
      for (std::size_t i = 0; i < ring.size; ++i) members.push_back(tag + std::to_string(i));
    }

    const long window = std::min<long>(spec.ring_window_days, span_days);
    const std::optional<Date> base = random_date(spec.first_date, span_days - window);
    auto ring_date = [&]() -> std::optional<Date> {
      if (!base) return std::nullopt;
      return random_date(*base, window);
    };

    for (std::size_t i = 0; i < ring.size; ++i) {
      records.push_back(CollisionRecord{"RC" + tag + std::to_string(i),
                                        {members[i], members[(i + 1) % ring.size]},
                                        ring_date()});
    }

    if (ring.chord_count > 0) {
      std::vector<std::pair<std::size_t, std::size_t>> chords;
      for (std::size_t i = 0; i < ring.size; ++i) {
        for (std::size_t j = i + 2; j < ring.size; ++j) {
          if (i == 0 && j == ring.size - 1) continue;
          chords.emplace_back(i, j);
        }
      }
      for (std::size_t i = chords.size(); i > 1; --i) std::swap(chords[i - 1], chords[rng.below(i)]);
      for (std::size_t k = 0; k < ring.chord_count; ++k) {
        records.push_back(CollisionRecord{"RH" + tag + std::to_string(k),
                                          {members[chords[k].first], members[chords[k].second]},
                                          ring_date()});
      }
    }

    for (std::size_t k = 0; k < ring.attachment_edges; ++k) {
      const std::string& inside = members[rng.below(ring.size)];
      std::string outside;
      do {
        outside = driver(rng.below(spec.driver_count));
      } while (std::find(members.begin(), members.end(), outside) != members.end());
      records.push_back(CollisionRecord{"RA" + tag + std::to_string(k), {inside, outside},
                                        random_date(spec.first_date, span_days)});
    }

    out.truth.rings.push_back(GroundTruthRing{members, ring_key(members)});
  }
  return out;
}

std::vector<std::optional<CanonicalKey>> GroundTruth::resolve(const UndirectedMultigraph& g) const {
  std::vector<std::optional<CanonicalKey>> keys;
  for (const GroundTruthRing& ring : rings) {
    std::vector<NodeId> ids;
    for (const std::string& d : ring.drivers) {
      const auto id = g.registry().find(d);
      if (!id) break;
      ids.push_back(*id);
    }
    if (ids.size() == ring.drivers.size()) {
      keys.push_back(canonical_key(ids));
    } else {
      keys.push_back(std::nullopt);
    }
  }
  return keys;
}

double evaluate_recall(const CycleSet& detected, const GroundTruth& truth, const UndirectedMultigraph& g) {
  if (truth.rings.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& key : truth.resolve(g)) {
    if (key && detected.contains(*key)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.rings.size());
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
  nlohmann::ordered_json j;
  j["rings"] = nlohmann::ordered_json::array();
  for (const GroundTruthRing& r : truth.rings) {
    j["rings"].push_back({{"key", r.key}, {"drivers", r.drivers}});
  }
  out << j.dump(2) << '\n';
}

GroundTruth read_ground_truth(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("ground truth JSON: ") + e.what());
  }
  GroundTruth t;
  if (!j.contains("rings") || !j["rings"].is_array()) throw FormatError("ground truth JSON lacks 'rings'");
  try {
    for (const auto& r : j["rings"]) {
      GroundTruthRing ring;
      ring.drivers = r.at("drivers").get<std::vector<std::string>>();
      ring.key = ring_key(ring.drivers);
      t.rings.push_back(std::move(ring));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("ground truth ring: ") + e.what());
  }
  return t;
}

}  // namespace fraudring
