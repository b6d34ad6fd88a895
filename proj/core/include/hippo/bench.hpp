#pragma once

// Measures a Hippo index on an existing table and compares the measurements
// with the analytical cost model.

#include <cstdint>
#include <string>
#include <vector>

#include "hippo/costmodel.hpp"
#include "hippo/hippo_index.hpp"
#include "hippo/pagestore.hpp"

namespace hippo::bench {

struct BenchConfig {
  std::uint32_t resolution = 400;
  double density = 0.2;
  std::vector<double> selectivities = {1e-5, 1e-4, 1e-3, 1e-2};
  std::uint32_t queries_per_selectivity = 200;
  std::uint32_t lookup_samples = 1000;
  std::uint64_t seed = 42;
  // Echoed into the report; the table itself is not regenerated.
  std::string distribution = "unknown";
};

struct SelectivityResult {
  double selectivity = 0;
  std::uint32_t queries = 0;
  double measured_pages_fraction = 0;
  double measured_tuple_fraction = 0;  // realized selectivity
  double predicted_prob = 0;
  double abs_error = 0;  // |measured_pages_fraction - predicted_prob|
};

struct BenchReport {
  // config echo
  std::uint64_t cardinality = 0;
  std::uint32_t page_card = 0;
  std::uint64_t num_pages = 0;
  std::uint32_t resolution = 0;
  double density = 0;
  std::uint64_t seed = 0;
  std::string distribution;

  // measured
  std::uint64_t index_bytes = 0;
  std::uint64_t dense_bytes = 0;
  std::uint64_t num_entries = 0;
  // Over entries closed by the density rule (the trailing entry is excluded
  // when there is more than one entry).
  double mean_tuples_per_entry = 0;
  double mean_pages_per_entry = 0;
  std::vector<SelectivityResult> per_selectivity;
  double mean_lookup_probes = 0;
  std::uint64_t max_lookup_probes = 0;
  std::uint64_t lookup_probe_bound = 0;  // ceil(log2(num_entries)) + 1
  bool exact = false;
  std::uint64_t queries_checked = 0;

  // predicted
  cost::CostEstimate predicted;  // for the first selectivity
  double predicted_lookup_probes = 0;  // log2(num_entries)

  // relative errors (measured vs predicted)
  double tuples_per_entry_rel_error = 0;
  double num_entries_rel_error = 0;
  double storage_ratio = 0;  // dense_bytes / index_bytes, measurement only

  // wall clock, excluded from error computation
  double build_ms = 0;
  double query_ms = 0;
};

// Builds Hippo and the dense baseline over the table, runs the randomized
// range queries, and fills in the report. Every query result is compared with
// the dense baseline first; any mismatch throws CorrectnessError.
BenchReport run_bench(const TableFile& table, const BenchConfig& config);

// include_timing=false drops the wall-clock fields so reports are
// byte-for-byte reproducible.
std::string to_json(const BenchReport& report, bool include_timing = true, int indent = 2);
std::string to_json(const std::vector<BenchReport>& reports, bool include_timing = true,
                    int indent = 2);

// Mean live tuples per entry, excluding the trailing entry when there is
// more than one. Pages with no live tuples still count toward page means.
struct EntryStats {
  double mean_tuples = 0;
  double mean_pages = 0;
  std::uint64_t entries_counted = 0;
};
EntryStats entry_stats(const HippoIndex& index, const TableFile& table);

}  // namespace hippo::bench
