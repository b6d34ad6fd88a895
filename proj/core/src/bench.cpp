#include "hippo/bench.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "hippo/baseline.hpp"
#include "hippo/error.hpp"
#include "hippo/workload.hpp"
#include "json.hpp"

namespace hippo::bench {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double rel_error(double measured, double predicted) {
  if (predicted == 0) return measured == 0 ? 0 : INFINITY;
  return std::abs(measured - predicted) / std::abs(predicted);
}

nlohmann::json report_json(const BenchReport& r, bool include_timing) {
  nlohmann::json sel = nlohmann::json::array();
  for (const auto& s : r.per_selectivity)
    sel.push_back({{"selectivity", s.selectivity},
                   {"queries", s.queries},
                   {"measured_pages_fraction", s.measured_pages_fraction},
                   {"measured_tuple_fraction", s.measured_tuple_fraction},
                   {"predicted_prob", s.predicted_prob},
                   {"abs_error", s.abs_error}});
  nlohmann::json j = {
      {"config",
       {{"cardinality", r.cardinality},
        {"page_card", r.page_card},
        {"num_pages", r.num_pages},
        {"resolution", r.resolution},
        {"density", r.density},
        {"seed", r.seed},
        {"distribution", r.distribution}}},
      {"measured",
       {{"index_bytes", r.index_bytes},
        {"dense_bytes", r.dense_bytes},
        {"num_entries", r.num_entries},
        {"mean_tuples_per_entry", r.mean_tuples_per_entry},
        {"mean_pages_per_entry", r.mean_pages_per_entry},
        {"pages_selected", sel},
        {"mean_lookup_probes", r.mean_lookup_probes},
        {"max_lookup_probes", r.max_lookup_probes},
        {"lookup_probe_bound", r.lookup_probe_bound},
        {"exact", r.exact},
        {"queries_checked", r.queries_checked},
        {"storage_ratio", r.storage_ratio}}},
      {"predicted",
       {{"prob_selected", r.predicted.prob_selected},
        {"est_query_tuples", r.predicted.est_query_tuples},
        {"tuples_per_entry", r.predicted.tuples_per_entry},
        {"pages_per_entry", r.predicted.pages_per_entry},
        {"num_entries", r.predicted.num_entries},
        {"init_cost", r.predicted.init_cost},
        {"insert_cost", r.predicted.insert_cost},
        {"density_in_model_range", r.predicted.density_in_model_range},
        {"lookup_probes", r.predicted_lookup_probes}}},
      {"relative_error",
       {{"tuples_per_entry", r.tuples_per_entry_rel_error},
        {"num_entries", r.num_entries_rel_error}}},
  };
  if (include_timing) j["wall_clock_ms"] = {{"build", r.build_ms}, {"queries", r.query_ms}};
  return j;
}

}  // namespace

EntryStats entry_stats(const HippoIndex& index, const TableFile& table) {
  const auto entries = index.entries();
  const std::size_t counted = entries.size() > 1 ? entries.size() - 1 : entries.size();
  std::uint64_t tuples = 0;
  std::uint64_t pages = 0;
  for (std::size_t i = 0; i < counted; ++i) {
    pages += entries[i].page_count();
    for (PageId p = entries[i].start_page; p <= entries[i].end_page; ++p)
      table.for_each_live(p, [&](std::uint32_t, std::int64_t) { ++tuples; });
  }
  EntryStats s;
  s.entries_counted = counted;
  if (counted > 0) {
    s.mean_tuples = static_cast<double>(tuples) / counted;
    s.mean_pages = static_cast<double>(pages) / counted;
  }
  return s;
}

BenchReport run_bench(const TableFile& table, const BenchConfig& config) {
  BenchReport r;
  r.page_card = table.page_card();
  r.num_pages = table.num_pages();
  r.resolution = config.resolution;
  r.density = config.density;
  r.seed = config.seed;
  r.distribution = config.distribution;

  const auto t_build = Clock::now();
  const auto index = HippoIndex::build(table, config.resolution, config.density);
  r.build_ms = ms_since(t_build);
  const auto dense = DenseIndex::build(table);

  r.cardinality = dense.size();
  r.index_bytes = index.byte_size();
  r.dense_bytes = dense.byte_size();
  r.storage_ratio = static_cast<double>(r.dense_bytes) / static_cast<double>(r.index_bytes);
  r.num_entries = index.num_entries();
  const auto es = entry_stats(index, table);
  r.mean_tuples_per_entry = es.mean_tuples;
  r.mean_pages_per_entry = es.mean_pages;

  const auto bounds = index.histogram().boundaries();
  const std::int64_t key_min = bounds.front();
  const std::int64_t key_max = bounds.back();
  std::mt19937_64 rng(config.seed);

  const auto t_query = Clock::now();
  for (double sf : config.selectivities) {
    SelectivityResult s;
    s.selectivity = sf;
    s.queries = config.queries_per_selectivity;
    s.predicted_prob = cost::prob_selected(sf, config.resolution, config.density);
    double pages_sum = 0;
    double tuples_sum = 0;
    for (std::uint32_t q = 0; q < config.queries_per_selectivity; ++q) {
      const auto pred = random_range(rng, sf, key_min, key_max);
      SearchStats stats;
      const auto got = index.search(table, pred, &stats);
      const auto want = dense.query(pred);
      if (got != want)
        throw CorrectnessError("search disagrees with the dense baseline for " +
                               pred.to_string() + ": " + std::to_string(got.size()) + " vs " +
                               std::to_string(want.size()) + " tuples");
      ++r.queries_checked;
      pages_sum += static_cast<double>(stats.pages_selected) / static_cast<double>(r.num_pages);
      tuples_sum += static_cast<double>(got.size()) / static_cast<double>(r.cardinality);
    }
    if (s.queries > 0) {
      s.measured_pages_fraction = pages_sum / s.queries;
      s.measured_tuple_fraction = tuples_sum / s.queries;
    }
    s.abs_error = std::abs(s.measured_pages_fraction - s.predicted_prob);
    r.per_selectivity.push_back(s);
  }
  r.query_ms = ms_since(t_query);
  r.exact = true;

  // Entry lookups as performed by the insert path, at random pages.
  std::uniform_int_distribution<PageId> page(0, r.num_pages - 1);
  std::uint64_t probe_sum = 0;
  for (std::uint32_t i = 0; i < config.lookup_samples; ++i) {
    std::size_t probes = 0;
    if (!index.locate_entry(page(rng), &probes))
      throw CorrectnessError("a summarized page has no index entry");
    probe_sum += probes;
    r.max_lookup_probes = std::max<std::uint64_t>(r.max_lookup_probes, probes);
  }
  if (config.lookup_samples > 0)
    r.mean_lookup_probes = static_cast<double>(probe_sum) / config.lookup_samples;
  r.lookup_probe_bound =
      static_cast<std::uint64_t>(std::ceil(std::log2(static_cast<double>(r.num_entries)))) + 1;

  cost::CostParams params;
  params.resolution = config.resolution;
  params.density = config.density;
  params.selectivity = config.selectivities.empty() ? 1e-3 : config.selectivities.front();
  params.cardinality = r.cardinality;
  params.page_card = r.page_card;
  r.predicted = cost::estimate(params);
  r.predicted_lookup_probes = std::log2(static_cast<double>(std::max<std::uint64_t>(1, r.num_entries)));

  r.tuples_per_entry_rel_error = rel_error(r.mean_tuples_per_entry, r.predicted.tuples_per_entry);
  r.num_entries_rel_error = rel_error(static_cast<double>(r.num_entries), r.predicted.num_entries);
  return r;
}

std::string to_json(const BenchReport& report, bool include_timing, int indent) {
  return report_json(report, include_timing).dump(indent);
}

std::string to_json(const std::vector<BenchReport>& reports, bool include_timing, int indent) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(report_json(r, include_timing));
  return arr.dump(indent);
}

}  // namespace hippo::bench
