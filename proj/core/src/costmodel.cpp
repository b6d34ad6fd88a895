#include "hippo/costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hippo::cost {
namespace {

// Absorbs representation error in products such as 0.01 * 400.
constexpr double kSlack = 1e-9;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_density(double d) { require(d > 0.0 && d <= 1.0, "density must be in (0, 1]"); }

}  // namespace

void CostParams::validate() const {
  require(selectivity > 0.0 && selectivity <= 1.0, "selectivity must be in (0, 1]");
  check_density(density);
  require(resolution >= 1, "resolution must be at least 1");
  require(cardinality >= 1, "cardinality must be at least 1");
  require(page_card >= 1, "page_card must be at least 1");
}

std::uint64_t hit_buckets(double selectivity, std::uint32_t resolution) {
  require(selectivity > 0.0 && selectivity <= 1.0, "selectivity must be in (0, 1]");
  require(resolution >= 1, "resolution must be at least 1");
  const double b = std::ceil(selectivity * resolution - kSlack);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(b));
}

double prob_selected(double selectivity, std::uint32_t resolution, double density) {
  check_density(density);
  const auto b = hit_buckets(selectivity, resolution);
  return std::min(1.0, static_cast<double>(b) * density);
}

double est_query_tuples(const CostParams& params) {
  params.validate();
  return prob_selected(params.selectivity, params.resolution, params.density) *
         static_cast<double>(params.cardinality);
}

std::uint32_t distinct_buckets(std::uint32_t resolution, double density) {
  check_density(density);
  require(resolution >= 1, "resolution must be at least 1");
  const double k = std::floor(density * resolution + 0.5 + kSlack);
  if (k < 1 || k > resolution)
    throw std::invalid_argument("density * resolution must round to a count in [1, H]");
  return static_cast<std::uint32_t>(k);
}

double est_tuples_per_entry(std::uint32_t resolution, double density) {
  const auto k = distinct_buckets(resolution, density);
  // Smallest terms first for accuracy.
  double sum = 0;
  for (std::uint32_t i = k; i-- > 0;) sum += 1.0 / static_cast<double>(resolution - i);
  return static_cast<double>(resolution) * sum;
}

double est_pages_per_entry(std::uint32_t resolution, double density, std::uint32_t page_card) {
  require(page_card >= 1, "page_card must be at least 1");
  if (density * resolution + kSlack < page_card)
    throw std::invalid_argument("density " + std::to_string(density) +
                                " is below pageCard / H = " +
                                std::to_string(static_cast<double>(page_card) / resolution));
  return est_tuples_per_entry(resolution, density) / page_card;
}

double est_num_entries(std::uint64_t cardinality, std::uint32_t resolution, double density) {
  require(cardinality >= 1, "cardinality must be at least 1");
  return static_cast<double>(cardinality) / est_tuples_per_entry(resolution, density);
}

double est_init_cost(std::uint64_t cardinality, std::uint32_t resolution, double density) {
  return static_cast<double>(cardinality) + est_num_entries(cardinality, resolution, density);
}

double est_insert_cost(double num_entries) {
  require(num_entries >= 1.0, "an index has at least one entry");
  return std::log2(num_entries) + 4.0;
}

CostEstimate estimate(const CostParams& params) {
  params.validate();
  CostEstimate e;
  e.prob_selected = prob_selected(params.selectivity, params.resolution, params.density);
  e.est_query_tuples = e.prob_selected * static_cast<double>(params.cardinality);
  e.tuples_per_entry = est_tuples_per_entry(params.resolution, params.density);
  e.density_in_model_range =
      params.density * params.resolution + kSlack >= static_cast<double>(params.page_card);
  e.pages_per_entry = e.tuples_per_entry / params.page_card;
  e.num_entries = static_cast<double>(params.cardinality) / e.tuples_per_entry;
  e.init_cost = static_cast<double>(params.cardinality) + e.num_entries;
  e.insert_cost = std::log2(std::max(1.0, e.num_entries)) + 4.0;
  return e;
}

}  // namespace hippo::cost
