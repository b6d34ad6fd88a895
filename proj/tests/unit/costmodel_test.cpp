#include "hippo/costmodel.hpp"

#include <gtest/gtest.h>

#include <random>
#include <unordered_set>

namespace hippo::cost {
namespace {

TEST(CostModel, HitBuckets) {
  EXPECT_EQ(hit_buckets(0.2, 10), 2u);
  EXPECT_EQ(hit_buckets(0.001, 400), 1u);  // 0.4 rounds up
  EXPECT_EQ(hit_buckets(1e-5, 400), 1u);
  EXPECT_EQ(hit_buckets(0.01, 400), 4u);
  EXPECT_EQ(hit_buckets(0.1, 10), 1u);  // 0.1 * 10 is 1, not 1.0000000000000002
  EXPECT_EQ(hit_buckets(1.0, 10), 10u);
}

TEST(CostModel, ProbSelected) {
  EXPECT_NEAR(prob_selected(0.2, 10, 0.2), 0.4, 1e-12);
  for (double sf : {1e-5, 1e-4, 1e-3}) EXPECT_NEAR(prob_selected(sf, 400, 0.2), 0.2, 1e-12);
  EXPECT_NEAR(prob_selected(0.01, 400, 0.2), 0.8, 1e-12);
  EXPECT_DOUBLE_EQ(prob_selected(1.0, 10, 0.2), 1.0);
}

TEST(CostModel, ProbObservations) {
  // Smaller D, smaller SF, or smaller H never increase Prob.
  EXPECT_LE(prob_selected(0.01, 400, 0.1), prob_selected(0.01, 400, 0.2));
  EXPECT_LE(prob_selected(0.001, 400, 0.2), prob_selected(0.01, 400, 0.2));
  EXPECT_LE(prob_selected(0.01, 100, 0.2), prob_selected(0.01, 400, 0.2));
}

TEST(CostModel, QueryTuples) {
  CostParams p;
  p.cardinality = 1'000'000;
  p.selectivity = 0.2;
  p.resolution = 10;
  p.density = 0.2;
  p.page_card = 1;
  EXPECT_NEAR(est_query_tuples(p), 4e5, 1e-6);
  p.selectivity = 0.01;
  p.resolution = 400;
  EXPECT_NEAR(est_query_tuples(p), 8e5, 1e-6);
  p.selectivity = 1.0;
  EXPECT_NEAR(est_query_tuples(p), 1e6, 1e-6);
}

TEST(CostModel, TuplesPerEntry) {
  EXPECT_NEAR(est_tuples_per_entry(1000, 0.1), 105.305, 1e-3);
  EXPECT_NEAR(est_tuples_per_entry(10000, 0.2), 2231.31, 1e-2);
  EXPECT_NEAR(est_tuples_per_entry(10000, 0.2), 2230, 2230 * 0.001);
  EXPECT_DOUBLE_EQ(est_tuples_per_entry(1000, 0.001), 1.0);
}

TEST(CostModel, DistinctBucketsRounding) {
  EXPECT_EQ(distinct_buckets(1000, 0.1), 100u);
  EXPECT_EQ(distinct_buckets(5, 0.5), 3u);  // 2.5 rounds up
  EXPECT_EQ(distinct_buckets(5, 0.3), 2u);  // 1.5 rounds up
  EXPECT_THROW(distinct_buckets(5, 0.05), std::invalid_argument);
}

TEST(CostModel, CouponCollectorMonteCarlo) {
  std::mt19937_64 rng(2024);
  for (auto [h, d] : {std::pair{1000u, 0.1}, std::pair{400u, 0.2}, std::pair{50u, 0.8}}) {
    const std::uint32_t k = distinct_buckets(h, d);
    std::uniform_int_distribution<std::uint32_t> bucket(0, h - 1);
    const int trials = 20000;
    double total = 0;
    for (int t = 0; t < trials; ++t) {
      std::unordered_set<std::uint32_t> seen;
      int draws = 0;
      while (seen.size() < k) {
        seen.insert(bucket(rng));
        ++draws;
      }
      total += draws;
    }
    const double mc = total / trials;
    const double model = est_tuples_per_entry(h, d);
    EXPECT_NEAR(mc, model, 0.02 * model) << "H=" << h << " D=" << d;
  }
}

TEST(CostModel, PagesPerEntry) {
  EXPECT_NEAR(est_pages_per_entry(1000, 0.1, 50), 2.106, 1e-3);
  EXPECT_NEAR(est_pages_per_entry(10000, 0.2, 50), 44.63, 1e-2);
  EXPECT_DOUBLE_EQ(est_pages_per_entry(1000, 0.1, 1), est_tuples_per_entry(1000, 0.1));
  EXPECT_THROW(est_pages_per_entry(400, 0.1, 50), std::invalid_argument);
}

TEST(CostModel, NumEntriesAndInitCost) {
  EXPECT_NEAR(est_num_entries(1'000'000, 1000, 0.1), 9496.2, 0.1);
  EXPECT_NEAR(est_init_cost(1'000'000, 1000, 0.1), 1'009'496.2, 0.1);
  EXPECT_DOUBLE_EQ(est_init_cost(1, 1, 1.0), 2.0);
  // At D = pageCard / H, T is computed with k = pageCard.
  EXPECT_NEAR(est_num_entries(1'000'000, 1000, 0.05),
              1e6 / est_tuples_per_entry(1000, 50.0 / 1000), 1e-9);
  EXPECT_GT(est_num_entries(1'000'000, 1000, 0.1), est_num_entries(1'000'000, 1000, 0.2));
  EXPECT_LE(est_init_cost(1'000'000, 1000, 0.001), 2e6);
}

TEST(CostModel, InsertCost) {
  EXPECT_DOUBLE_EQ(est_insert_cost(1), 4.0);
  EXPECT_NEAR(est_insert_cost(9496.2), 17.213, 1e-3);
  double prev = 0;
  for (double n = 1; n < 1e6; n *= 1.7) {
    EXPECT_GE(est_insert_cost(n), prev);
    prev = est_insert_cost(n);
  }
  EXPECT_THROW(est_insert_cost(0.5), std::invalid_argument);
}

TEST(CostModel, EstimateBundle) {
  CostParams p;
  p.resolution = 1000;
  p.density = 0.1;
  p.selectivity = 0.001;
  p.cardinality = 1'000'000;
  p.page_card = 50;
  const auto e = estimate(p);
  EXPECT_NEAR(e.prob_selected, 0.1, 1e-12);
  EXPECT_NEAR(e.est_query_tuples, 1e5, 1e-6);
  EXPECT_NEAR(e.tuples_per_entry, 105.305, 1e-3);
  EXPECT_NEAR(e.pages_per_entry, 2.106, 1e-3);
  EXPECT_NEAR(e.num_entries, 9496.2, 0.1);
  EXPECT_NEAR(e.insert_cost, 17.213, 1e-3);
  EXPECT_TRUE(e.density_in_model_range);

  p.resolution = 400;
  p.density = 0.1;  // below pageCard / H = 0.125
  const auto out = estimate(p);
  EXPECT_FALSE(out.density_in_model_range);
}

TEST(CostModel, Validation) {
  CostParams p;
  p.cardinality = 10;
  EXPECT_NO_THROW(p.validate());
  for (auto mutate : {+[](CostParams& c) { c.selectivity = 0; },
                      +[](CostParams& c) { c.selectivity = 1.5; },
                      +[](CostParams& c) { c.density = 0; },
                      +[](CostParams& c) { c.density = 1.01; },
                      +[](CostParams& c) { c.resolution = 0; },
                      +[](CostParams& c) { c.cardinality = 0; },
                      +[](CostParams& c) { c.page_card = 0; }}) {
    auto bad = p;
    mutate(bad);
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    EXPECT_THROW(estimate(bad), std::invalid_argument);
  }
}

}  // namespace
}  // namespace hippo::cost
