#include "hippo/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hippo::bench {

DistributionSpec DistributionSpec::parse(std::string_view text) {
  DistributionSpec spec;
  if (text == "uniform") return spec;
  if (text.starts_with("zipf")) {
    spec.kind = Distribution::kZipf;
    auto rest = text.substr(4);
    if (rest.empty()) return spec;
    if (rest.front() != ':' || rest.size() < 2)
      throw std::invalid_argument("expected zipf:S, got " + std::string(text));
    try {
      std::size_t used = 0;
      const std::string num(rest.substr(1));
      spec.zipf_s = std::stod(num, &used);
      if (used != num.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad zipf exponent in " + std::string(text));
    }
    if (!(spec.zipf_s > 0)) throw std::invalid_argument("zipf exponent must be positive");
    return spec;
  }
  throw std::invalid_argument("unknown distribution " + std::string(text));
}

std::string DistributionSpec::to_string() const {
  if (kind == Distribution::kUniform) return "uniform";
  return "zipf:" + std::to_string(zipf_s);
}

KeyGenerator::KeyGenerator(DistributionSpec dist, std::int64_t key_min, std::int64_t key_max,
                           std::uint64_t seed)
    : dist_(dist), key_min_(key_min), key_max_(key_max), rng_(seed) {
  if (key_max <= key_min) throw std::invalid_argument("empty key domain");
  if (dist_.kind == Distribution::kZipf) {
    if (!(dist_.zipf_s > 0)) throw std::invalid_argument("zipf exponent must be positive");
    const auto n = static_cast<std::uint64_t>(key_max - key_min);
    if (n > 50'000'000) throw std::invalid_argument("zipf key domain too large");
    zipf_cdf_.resize(n);
    double acc = 0;
    for (std::uint64_t r = 0; r < n; ++r) {
      acc += 1.0 / std::pow(static_cast<double>(r + 1), dist_.zipf_s);
      zipf_cdf_[r] = acc;
    }
    for (auto& c : zipf_cdf_) c /= acc;
  }
}

std::int64_t KeyGenerator::next() {
  if (dist_.kind == Distribution::kUniform) {
    std::uniform_int_distribution<std::int64_t> u(key_min_, key_max_ - 1);
    return u(rng_);
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng_);
  const auto it = std::lower_bound(zipf_cdf_.begin(), zipf_cdf_.end(), x);
  const auto rank = std::min<std::size_t>(static_cast<std::size_t>(it - zipf_cdf_.begin()),
                                          zipf_cdf_.size() - 1);
  return key_min_ + static_cast<std::int64_t>(rank);
}

std::vector<std::uint8_t> make_payload(std::uint64_t ordinal, std::uint16_t bytes) {
  std::vector<std::uint8_t> p(bytes);
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = static_cast<std::uint8_t>(ordinal >> (8 * (i % 8)));
  return p;
}

TableFile generate_table(const std::filesystem::path& path, const GenConfig& config) {
  if (config.count == 0) throw std::invalid_argument("tuple count must be at least 1");
  KeyGenerator keys(config.dist, config.key_min, config.key_max, config.seed);
  auto table = TableFile::create(path, config.page_card);
  for (std::uint64_t i = 0; i < config.count; ++i)
    table.append_tuple(keys.next(), make_payload(i, config.payload_bytes));
  table.flush();
  return table;
}

Predicate random_range(std::mt19937_64& rng, double selectivity, std::int64_t key_min,
                       std::int64_t key_max) {
  if (!(selectivity > 0.0) || selectivity > 1.0)
    throw std::invalid_argument("selectivity must be in (0, 1]");
  if (key_max < key_min) throw std::invalid_argument("empty key domain");
  const double span = static_cast<double>(key_max) - static_cast<double>(key_min);
  const auto width = static_cast<std::int64_t>(std::llround(selectivity * span));
  std::uniform_int_distribution<std::int64_t> start(key_min, key_max - width);
  const auto lo = start(rng);
  return Predicate::between(lo, lo + width);
}

Predicate random_predicate(std::mt19937_64& rng, std::int64_t key_min, std::int64_t key_max) {
  const std::int64_t span = key_max - key_min;
  const std::int64_t pad = std::max<std::int64_t>(1, span / 20);
  std::uniform_int_distribution<std::int64_t> any(key_min - pad, key_max + pad);
  std::uniform_int_distribution<std::int64_t> width(0, std::max<std::int64_t>(1, span / 50));
  std::uniform_int_distribution<int> kind(0, 7);
  std::bernoulli_distribution coin(0.5);
  const auto a = any(rng);
  switch (kind(rng)) {
    case 0:
    case 1:
      return Predicate::equals(a);
    case 2:
      return Predicate::greater_than(a, coin(rng));
    case 3:
      return Predicate::less_than(a, coin(rng));
    case 4:
    case 5:
      return Predicate::between(a, a + width(rng));
    case 6: {
      // Two one-sided atoms joined by AND; may be unsatisfiable.
      const auto b = a + width(rng) - width(rng) / 4;
      return Predicate::greater_than(a, coin(rng)) && Predicate::less_than(b, coin(rng));
    }
    default: {
      const auto b = a + width(rng);
      return Predicate::between(a, b) && Predicate::greater_than(a + (b - a) / 2, coin(rng));
    }
  }
}

}  // namespace hippo::bench
