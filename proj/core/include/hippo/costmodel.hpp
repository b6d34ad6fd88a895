#pragma once

// Analytical cost model for a Hippo index over uniformly distributed keys.
//
//   B      = max(1, ceil(SF * H))            buckets hit by a predicate
//   Prob   = min(1, B * D)                   chance an entry is selected
//   query  = Prob * Card                     tuples inspected
//   k      = round(D * H)                    distinct buckets per entry
//   T      = H * sum_{i=0}^{k-1} 1/(H - i)   expected tuples per entry
//                                            (coupon collector, k of H kinds)
//   P      = T / pageCard                    expected pages per entry
//   E      = Card / T                        index entries
//   init   = Card + E                        I/Os to build
//   insert = log2(E) + 4                     I/Os per eager insert
//
// All functions are pure; invalid parameters throw std::invalid_argument.

#include <cstdint>

namespace hippo::cost {

struct CostParams {
  std::uint32_t resolution = 400;  // H
  double density = 0.2;            // D
  double selectivity = 0.001;      // SF
  std::uint64_t cardinality = 1;   // Card
  std::uint32_t page_card = 50;    // tuples per page

  // Throws unless SF in (0,1], D in (0,1], H, Card, pageCard >= 1.
  void validate() const;
};

struct CostEstimate {
  double prob_selected = 0;
  double est_query_tuples = 0;
  double tuples_per_entry = 0;  // T
  double pages_per_entry = 0;   // P
  double num_entries = 0;
  double init_cost = 0;
  double insert_cost = 0;
  // False when D < pageCard / H, where P is outside the model's domain.
  bool density_in_model_range = true;
};

// B = max(1, ceil(SF * H)).
std::uint64_t hit_buckets(double selectivity, std::uint32_t resolution);
double prob_selected(double selectivity, std::uint32_t resolution, double density);
double est_query_tuples(const CostParams& params);

// k = round(D * H), halves rounded up. Throws when k is outside [1, H].
std::uint32_t distinct_buckets(std::uint32_t resolution, double density);
double est_tuples_per_entry(std::uint32_t resolution, double density);
// Throws when D < pageCard / H.
double est_pages_per_entry(std::uint32_t resolution, double density, std::uint32_t page_card);
double est_num_entries(std::uint64_t cardinality, std::uint32_t resolution, double density);
double est_init_cost(std::uint64_t cardinality, std::uint32_t resolution, double density);
// Throws when num_entries < 1.
double est_insert_cost(double num_entries);

CostEstimate estimate(const CostParams& params);

}  // namespace hippo::cost
