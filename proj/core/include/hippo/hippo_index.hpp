#pragma once

// Hippo: a sparse index that stores, per contiguous page range of the parent
// table, the set of complete-histogram buckets hit by the tuples in that range
// (a "partial histogram", kept as a compressed bitmap).
//
// Search converts the predicate to a bucket bitmap, keeps every page range
// whose partial histogram shares a bucket with it, and inspects those pages
// tuple by tuple, so results are exact. Inserts update the index eagerly;
// deletes are only noted in page headers and folded in by vacuum().
//
// Storage. Entries live in an append-only region; each record is
//   start_page u64, end_page u64, enc_len u16, encoded bitmap (enc_len bytes)
// An entry that grows past its encoded length is re-appended at the tail and
// the old bytes are left as garbage. The sorted list holds the region offsets
// of the live entries in ascending page order and is what binary search runs
// over.
//
// Index file (little-endian):
//   "HIPX", version u32, H u32, D in micro-units u32, num_entries u64,
//   sorted_list_offset u64, entries_offset u64, table path (u16 len + bytes),
//   histogram block {H u32, (H+1) x i64},
//   sorted list (num_entries x u64 region offsets),
//   entry region (to end of file).
//
// Concurrency: one writer XOR many readers. search/filter_pages/locate_entry
// are const and safe to run concurrently.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hippo/bitset.hpp"
#include "hippo/histogram.hpp"
#include "hippo/pagestore.hpp"
#include "hippo/predicate.hpp"

namespace hippo {

struct IndexEntry {
  PageId start_page = 0;
  PageId end_page = 0;
  BucketBitmap partial;

  PageId page_count() const { return end_page - start_page + 1; }
  bool operator==(const IndexEntry&) const = default;
};

// Density threshold D held in millionths so that every comparison against it
// is exact integer arithmetic and survives a save/load round trip.
class DensityThreshold {
 public:
  // Throws std::invalid_argument unless 0 < d <= 1.
  explicit DensityThreshold(double d);
  static DensityThreshold from_micros(std::uint32_t micros);

  std::uint32_t micros() const { return micros_; }
  double value() const { return micros_ / 1e6; }

  // ones / nbits > D
  bool exceeded_by(std::uint32_t ones, std::uint32_t nbits) const;
  // ones / nbits < D
  bool not_reached_by(std::uint32_t ones, std::uint32_t nbits) const;

 private:
  DensityThreshold() = default;
  std::uint32_t micros_ = 0;
};

struct EntryLocation {
  std::size_t position = 0;  // index into the sorted list
  std::uint64_t address = 0;  // offset in the entry region
  PageId start_page = 0;
  PageId end_page = 0;
};

struct SearchStats {
  std::size_t entries_selected = 0;
  std::uint64_t pages_selected = 0;
  std::uint64_t tuples_inspected = 0;
};

struct InsertResult {
  TupleId tuple;
  std::size_t probes = 0;      // sorted-list probes spent locating the entry
  bool entry_updated = false;  // the entry gained a bucket or a page
  bool entry_created = false;
  bool relocated = false;  // the updated entry moved to the region tail
};

struct ResummarizedEntry {
  PageId start_page = 0;
  PageId end_page = 0;
  BucketBitmap before;
  BucketBitmap after;
  bool relocated = false;
};

struct VacuumReport {
  std::vector<ResummarizedEntry> entries;
  std::uint64_t pages_vacuumed = 0;
};

class HippoIndex {
 public:
  // Builds the complete histogram from the table, then groups pages.
  // Throws std::invalid_argument on an empty table or bad H / D.
  static HippoIndex build(const TableFile& table, std::uint32_t resolution, double density);
  // Groups pages against an already-retrieved complete histogram.
  static HippoIndex build(const TableFile& table, CompleteHistogram histogram, double density);

  static HippoIndex load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  std::vector<std::uint8_t> serialize() const;
  static HippoIndex deserialize(std::span<const std::uint8_t> bytes);

  // Exact answer: tuples of the table satisfying pred, sorted by id.
  // Throws StaleIndexError if the table has pages the index does not cover.
  std::vector<TupleId> search(const TableFile& table, const Predicate& pred,
                              SearchStats* stats = nullptr) const;

  // Marks the pages of every entry whose partial histogram intersects
  // pred_bitmap. Throws std::invalid_argument when widths differ.
  std::vector<bool> filter_pages(const BucketBitmap& pred_bitmap,
                                 std::size_t* entries_selected = nullptr) const;

  // Binary search over the sorted list for the entry summarizing page.
  // At most ceil(log2(num_entries)) + 1 probes.
  std::optional<EntryLocation> locate_entry(PageId page, std::size_t* probes = nullptr) const;

  // Appends the tuple to the table and folds it into the index.
  InsertResult insert(TableFile& table, std::int64_t key,
                      std::span<const std::uint8_t> payload = {});

  // Folds in tuples appended to the table without going through insert():
  // re-reads the last summarized page and summarizes any new pages.
  void absorb_appends(const TableFile& table);

  // Vacuums pages with deletion notes and re-summarizes each affected entry
  // over its original page range.
  VacuumReport vacuum(TableFile& table);

  std::uint32_t resolution() const { return histogram_.resolution(); }
  const DensityThreshold& density_threshold() const { return density_; }
  const CompleteHistogram& histogram() const { return histogram_; }
  const std::string& table_path() const { return table_path_; }
  void set_table_path(std::string path) { table_path_ = std::move(path); }

  std::size_t num_entries() const { return sorted_.size(); }
  // Pages 0..summarized_pages()-1 are covered by entries.
  PageId summarized_pages() const;
  // Entries in ascending page order.
  std::vector<IndexEntry> entries() const;
  IndexEntry entry_at(std::uint64_t address) const;
  std::span<const std::uint64_t> sorted_list() const { return sorted_; }
  std::size_t region_bytes() const { return region_.size(); }
  // Size of the serialized index file.
  std::size_t byte_size() const;

 private:
  HippoIndex(CompleteHistogram hist, DensityThreshold density);

  PageId start_at(std::uint64_t address) const;
  PageId end_at(std::uint64_t address) const;
  std::uint64_t append_entry(PageId start, PageId end, const BucketBitmap& partial);
  // Rewrites the entry at sorted position pos; returns true if it moved.
  bool rewrite_entry(std::size_t pos, PageId start, PageId end, const BucketBitmap& partial);
  BucketBitmap summarize_pages(const TableFile& table, PageId first, PageId last) const;
  void check_fresh(const TableFile& table) const;

  CompleteHistogram histogram_;
  DensityThreshold density_;
  std::string table_path_;
  std::vector<std::uint8_t> region_;
  std::vector<std::uint64_t> sorted_;
};

}  // namespace hippo
