// hippo: command-line driver for tables, Hippo indexes and benchmark reports.
//
// Exit codes: 0 success, 2 an index answer disagreed with the reference,
// 1 any other error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hippo/baseline.hpp"
#include "hippo/bench.hpp"
#include "hippo/costmodel.hpp"
#include "hippo/error.hpp"
#include "hippo/hippo_index.hpp"
#include "hippo/workload.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace hippo;

namespace {

struct Options {
  std::string table;
  std::string index;
  std::uint32_t resolution = 400;
  double density = 0.2;
  std::uint32_t page_card = 50;
  std::uint64_t seed = 42;
  std::string pred;
  bool json = false;

  // gen
  std::uint64_t count = 100'000;
  std::string dist = "uniform";
  std::int64_t key_min = 0;
  std::int64_t key_max = 1'000'000;
  std::uint16_t payload_bytes = 8;

  // query
  bool dump = false;
  bool verify = false;

  // insert
  std::vector<std::int64_t> keys;
  std::uint64_t random_inserts = 0;

  // estimate
  double selectivity = 0.001;
  std::uint64_t cardinality = 1'000'000;

  // bench
  std::vector<std::uint32_t> resolutions;
  std::vector<double> densities;
  std::vector<double> selectivities = {1e-5, 1e-4, 1e-3, 1e-2};
  std::uint32_t queries = 200;
  bool no_timing = false;
};

void emit(const Options& o, const json& j, const std::string& text) {
  if (o.json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text << "\n";
}

// Index file plus the table it was built for (or --table when given).
struct Opened {
  HippoIndex index;
  TableFile table;
};

Opened open_index(const Options& o) {
  auto index = HippoIndex::load(o.index);
  const std::string table_path = o.table.empty() ? index.table_path() : o.table;
  auto table = TableFile::open(table_path);
  return {std::move(index), std::move(table)};
}

json entries_summary(const HippoIndex& idx) {
  return {{"num_entries", idx.num_entries()},
          {"summarized_pages", idx.summarized_pages()},
          {"index_bytes", idx.byte_size()}};
}

int cmd_gen(const Options& o) {
  bench::GenConfig cfg;
  cfg.count = o.count;
  cfg.dist = bench::DistributionSpec::parse(o.dist);
  cfg.key_min = o.key_min;
  cfg.key_max = o.key_max;
  cfg.page_card = o.page_card;
  cfg.seed = o.seed;
  cfg.payload_bytes = o.payload_bytes;
  const auto t = bench::generate_table(o.table, cfg);
  emit(o,
       {{"table", o.table}, {"tuples", o.count}, {"pages", t.num_pages()},
        {"page_card", o.page_card}, {"distribution", cfg.dist.to_string()}, {"seed", o.seed}},
       "generated " + std::to_string(o.count) + " tuples in " + std::to_string(t.num_pages()) +
           " pages: " + o.table);
  return 0;
}

int cmd_build(const Options& o) {
  const auto table = TableFile::open(o.table);
  auto idx = HippoIndex::build(table, o.resolution, o.density);
  idx.set_table_path(fs::absolute(o.table).string());
  idx.save(o.index);
  auto j = entries_summary(idx);
  j["resolution"] = o.resolution;
  j["density"] = idx.density_threshold().value();
  j["index"] = o.index;
  emit(o, j,
       "built " + std::to_string(idx.num_entries()) + " entries over " +
           std::to_string(table.num_pages()) + " pages (" + std::to_string(idx.byte_size()) +
           " bytes): " + o.index);
  return 0;
}

int cmd_query(const Options& o) {
  const auto pred = Predicate::parse(o.pred);
  const auto [idx, table] = open_index(o);
  SearchStats stats;
  const auto ids = idx.search(table, pred, &stats);
  if (o.verify && ids != oracle_scan(table, pred))
    throw CorrectnessError("search result differs from a full scan for " + pred.to_string());

  json tuples = json::array();
  std::ostringstream text;
  text << ids.size() << " tuples (" << stats.pages_selected << " of " << table.num_pages()
       << " pages inspected)";
  if (o.dump) {
    for (const auto& id : ids) {
      std::int64_t key = 0;
      table.for_each_live(id.page, [&](std::uint32_t slot, std::int64_t k) {
        if (slot == id.slot) key = k;
      });
      tuples.push_back({{"page", id.page}, {"slot", id.slot}, {"key", key}});
      text << "\n" << to_string(id) << " key=" << key;
    }
  }
  json j = {{"predicate", pred.to_string()},
            {"count", ids.size()},
            {"entries_selected", stats.entries_selected},
            {"pages_selected", stats.pages_selected},
            {"tuples_inspected", stats.tuples_inspected}};
  if (o.dump) j["tuples"] = tuples;
  emit(o, j, text.str());
  return 0;
}

int cmd_insert(const Options& o) {
  auto [idx, table] = open_index(o);
  std::vector<std::int64_t> keys = o.keys;
  std::mt19937_64 rng(o.seed);
  const auto bounds = idx.histogram().boundaries();
  std::uniform_int_distribution<std::int64_t> any(bounds.front(), bounds.back());
  for (std::uint64_t i = 0; i < o.random_inserts; ++i) keys.push_back(any(rng));

  std::size_t updated = 0, created = 0, relocated = 0, max_probes = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto r = idx.insert(table, keys[i], bench::make_payload(i, o.payload_bytes));
    updated += r.entry_updated;
    created += r.entry_created;
    relocated += r.relocated;
    max_probes = std::max(max_probes, r.probes);
  }
  table.flush();
  idx.save(o.index);
  auto j = entries_summary(idx);
  j["inserted"] = keys.size();
  j["entries_updated"] = updated;
  j["entries_created"] = created;
  j["entries_relocated"] = relocated;
  j["max_probes"] = max_probes;
  emit(o, j,
       "inserted " + std::to_string(keys.size()) + " tuples; " + std::to_string(updated) +
           " entry updates, " + std::to_string(created) + " new entries, " +
           std::to_string(relocated) + " relocations");
  return 0;
}

int cmd_delete(const Options& o) {
  const auto pred = Predicate::parse(o.pred);
  auto table = TableFile::open(o.table);
  const auto ids = oracle_scan(table, pred);
  for (const auto& id : ids) table.delete_tuple(id);
  table.flush();
  emit(o, {{"deleted", ids.size()}, {"predicate", pred.to_string()}},
       "deleted " + std::to_string(ids.size()) + " tuples");
  return 0;
}

int cmd_vacuum(const Options& o) {
  auto [idx, table] = open_index(o);
  const auto report = idx.vacuum(table);
  table.flush();
  idx.save(o.index);
  std::size_t relocated = 0;
  json entries = json::array();
  for (const auto& e : report.entries) {
    relocated += e.relocated;
    entries.push_back({{"start_page", e.start_page},
                       {"end_page", e.end_page},
                       {"buckets_before", e.before.count_ones()},
                       {"buckets_after", e.after.count_ones()},
                       {"relocated", e.relocated}});
  }
  auto j = entries_summary(idx);
  j["pages_vacuumed"] = report.pages_vacuumed;
  j["entries_resummarized"] = entries;
  emit(o, j,
       "vacuumed " + std::to_string(report.pages_vacuumed) + " pages; re-summarized " +
           std::to_string(report.entries.size()) + " entries (" + std::to_string(relocated) +
           " relocated)");
  return 0;
}

int cmd_estimate(const Options& o) {
  cost::CostParams p;
  p.resolution = o.resolution;
  p.density = o.density;
  p.selectivity = o.selectivity;
  p.cardinality = o.cardinality;
  p.page_card = o.page_card;
  const auto e = cost::estimate(p);
  json j = {{"resolution", p.resolution},
            {"density", p.density},
            {"selectivity", p.selectivity},
            {"cardinality", p.cardinality},
            {"page_card", p.page_card},
            {"prob_selected", e.prob_selected},
            {"est_query_tuples", e.est_query_tuples},
            {"tuples_per_entry", e.tuples_per_entry},
            {"pages_per_entry", e.pages_per_entry},
            {"num_entries", e.num_entries},
            {"init_cost", e.init_cost},
            {"insert_cost", e.insert_cost},
            {"density_in_model_range", e.density_in_model_range}};
  std::ostringstream text;
  text << "prob_selected     " << e.prob_selected << "\n"
       << "est_query_tuples  " << e.est_query_tuples << "\n"
       << "tuples_per_entry  " << e.tuples_per_entry << "\n"
       << "pages_per_entry   " << e.pages_per_entry
       << (e.density_in_model_range ? "" : "  (D below pageCard/H)") << "\n"
       << "num_entries       " << e.num_entries << "\n"
       << "init_cost         " << e.init_cost << "\n"
       << "insert_cost       " << e.insert_cost;
  emit(o, j, text.str());
  return 0;
}

int cmd_bench(const Options& o) {
  const auto table = TableFile::open(o.table);
  const auto hs = o.resolutions.empty() ? std::vector<std::uint32_t>{o.resolution} : o.resolutions;
  const auto ds = o.densities.empty() ? std::vector<double>{o.density} : o.densities;
  std::vector<bench::BenchReport> reports;
  for (auto h : hs)
    for (auto d : ds) {
      bench::BenchConfig cfg;
      cfg.resolution = h;
      cfg.density = d;
      cfg.selectivities = o.selectivities;
      cfg.queries_per_selectivity = o.queries;
      cfg.seed = o.seed;
      cfg.distribution = o.dist;
      reports.push_back(bench::run_bench(table, cfg));
    }
  if (o.json) {
    std::cout << (reports.size() == 1 ? bench::to_json(reports[0], !o.no_timing)
                                      : bench::to_json(reports, !o.no_timing))
              << "\n";
    return 0;
  }
  for (const auto& r : reports) {
    std::printf("H=%u D=%.3g: %llu entries, %llu bytes (dense %llu, %.1fx smaller)\n",
                r.resolution, r.density, static_cast<unsigned long long>(r.num_entries),
                static_cast<unsigned long long>(r.index_bytes),
                static_cast<unsigned long long>(r.dense_bytes), r.storage_ratio);
    std::printf("  tuples/entry %.1f (model %.1f), lookup probes max %llu (bound %llu)\n",
                r.mean_tuples_per_entry, r.predicted.tuples_per_entry,
                static_cast<unsigned long long>(r.max_lookup_probes),
                static_cast<unsigned long long>(r.lookup_probe_bound));
    for (const auto& s : r.per_selectivity)
      std::printf("  SF=%-8g pages selected %.3f (model %.3f)\n", s.selectivity,
                  s.measured_pages_fraction, s.predicted_prob);
    std::printf("  %llu queries checked against the dense index\n",
                static_cast<unsigned long long>(r.queries_checked));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hippo sparse index tool"};
  app.require_subcommand(1);
  Options o;

  auto add_json = [&](CLI::App* c) { c->add_flag("--json", o.json, "Print JSON"); };
  auto add_index = [&](CLI::App* c) {
    c->add_option("--index", o.index, "Index file")->required();
    c->add_option("--table", o.table, "Table file (default: the one recorded in the index)");
  };
  auto add_params = [&](CLI::App* c) {
    c->add_option("--resolution,-H", o.resolution, "Histogram buckets H")->capture_default_str();
    c->add_option("--density,-D", o.density, "Partial histogram density threshold D")
        ->capture_default_str();
  };

  auto* gen = app.add_subcommand("gen", "Generate a synthetic table");
  gen->add_option("--table", o.table, "Output table file")->required();
  gen->add_option("--n,--count", o.count, "Number of tuples")->capture_default_str();
  gen->add_option("--dist", o.dist, "uniform | zipf | zipf:S")->capture_default_str();
  gen->add_option("--key-min", o.key_min, "Smallest key (inclusive)")->capture_default_str();
  gen->add_option("--key-max", o.key_max, "Largest key (exclusive)")->capture_default_str();
  gen->add_option("--pagecard", o.page_card, "Tuples per page")->capture_default_str();
  gen->add_option("--payload", o.payload_bytes, "Payload bytes per tuple")->capture_default_str();
  gen->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  add_json(gen);

  auto* build = app.add_subcommand("build", "Build a Hippo index over a table");
  build->add_option("--table", o.table, "Table file")->required();
  build->add_option("--index", o.index, "Output index file")->required();
  add_params(build);
  add_json(build);

  auto* query = app.add_subcommand("query", "Run a predicate through the index");
  add_index(query);
  query->add_option("--pred", o.pred, "Predicate, e.g. \"key > 5 AND key <= 9\"")->required();
  query->add_flag("--dump", o.dump, "List matching tuples");
  query->add_flag("--verify", o.verify, "Compare with a full table scan");
  add_json(query);

  auto* insert = app.add_subcommand("insert", "Insert tuples and update the index");
  add_index(insert);
  insert->add_option("--key", o.keys, "Key to insert (repeatable)");
  insert->add_option("--random", o.random_inserts, "Also insert this many random keys");
  insert->add_option("--seed", o.seed, "Seed for random keys")->capture_default_str();
  add_json(insert);

  auto* del = app.add_subcommand("delete", "Delete tuples matching a predicate (no index update)");
  del->add_option("--table", o.table, "Table file")->required();
  del->add_option("--pred", o.pred, "Predicate")->required();
  add_json(del);

  auto* vacuum = app.add_subcommand("vacuum", "Vacuum pages with deletions and re-summarize");
  add_index(vacuum);
  add_json(vacuum);

  auto* est = app.add_subcommand("estimate", "Evaluate the cost model");
  add_params(est);
  est->add_option("--selectivity,--sf", o.selectivity, "Query selectivity SF")
      ->capture_default_str();
  est->add_option("--cardinality,--card", o.cardinality, "Table tuples")->capture_default_str();
  est->add_option("--pagecard", o.page_card, "Tuples per page")->capture_default_str();
  add_json(est);

  auto* bench_cmd = app.add_subcommand("bench", "Measure an index against the cost model");
  bench_cmd->add_option("--table", o.table, "Table file")->required();
  bench_cmd->add_option("--resolution,-H", o.resolutions, "Histogram buckets (comma list)")
      ->delimiter(',');
  bench_cmd->add_option("--density,-D", o.densities, "Density thresholds (comma list)")
      ->delimiter(',');
  bench_cmd->add_option("--sf", o.selectivities, "Selectivities (comma list)")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--queries", o.queries, "Queries per selectivity")->capture_default_str();
  bench_cmd->add_option("--seed", o.seed, "Query seed")->capture_default_str();
  bench_cmd->add_option("--dist", o.dist, "Distribution label echoed in the report");
  bench_cmd->add_flag("--no-timing", o.no_timing, "Omit wall-clock fields");
  add_json(bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*gen) return cmd_gen(o);
    if (*build) return cmd_build(o);
    if (*query) return cmd_query(o);
    if (*insert) return cmd_insert(o);
    if (*del) return cmd_delete(o);
    if (*vacuum) return cmd_vacuum(o);
    if (*est) return cmd_estimate(o);
    if (*bench_cmd) return cmd_bench(o);
  } catch (const CorrectnessError& e) {
    std::cerr << "hippo: correctness failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hippo: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
