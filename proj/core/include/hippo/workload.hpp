#pragma once

// Deterministic synthetic tables and query generators.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hippo/pagestore.hpp"
#include "hippo/predicate.hpp"

namespace hippo::bench {

enum class Distribution { kUniform, kZipf };

struct DistributionSpec {
  Distribution kind = Distribution::kUniform;
  double zipf_s = 1.1;

  // "uniform", "zipf" (s = 1.1) or "zipf:S".
  static DistributionSpec parse(std::string_view text);
  std::string to_string() const;
};

struct GenConfig {
  std::uint64_t count = 100'000;
  DistributionSpec dist;
  std::int64_t key_min = 0;          // inclusive
  std::int64_t key_max = 1'000'000;  // exclusive
  std::uint32_t page_card = 50;
  std::uint64_t seed = 42;
  std::uint16_t payload_bytes = 8;
};

// Draws keys in [key_min, key_max). Zipf draws rank r with P(r) ~ r^-s and
// maps rank 1 to key_min.
class KeyGenerator {
 public:
  KeyGenerator(DistributionSpec dist, std::int64_t key_min, std::int64_t key_max,
               std::uint64_t seed);

  std::int64_t next();
  std::mt19937_64& rng() { return rng_; }

 private:
  DistributionSpec dist_;
  std::int64_t key_min_;
  std::int64_t key_max_;
  std::mt19937_64 rng_;
  std::vector<double> zipf_cdf_;
};

// Payload bytes for the i-th generated tuple.
std::vector<std::uint8_t> make_payload(std::uint64_t ordinal, std::uint16_t bytes);

// Creates the table at path and fills it. Throws std::invalid_argument for
// count == 0, an empty key domain or zipf s <= 0.
TableFile generate_table(const std::filesystem::path& path, const GenConfig& config);

// Closed range [lo, lo + round(SF * (key_max - key_min))] with lo uniform
// such that the range stays inside [key_min, key_max].
Predicate random_range(std::mt19937_64& rng, double selectivity, std::int64_t key_min,
                       std::int64_t key_max);

// Mix of equality, one-sided, two-sided and conjunctive predicates over
// [key_min, key_max], with some bounds falling outside the domain.
Predicate random_predicate(std::mt19937_64& rng, std::int64_t key_min, std::int64_t key_max);

}  // namespace hippo::bench
