#include "hippo/hippo_index.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "byte_io.hpp"
#include "hippo/error.hpp"

namespace hippo {
namespace {

constexpr char kMagic[4] = {'H', 'I', 'P', 'X'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kFixedHeaderBytes = 40;
// start_page u64, end_page u64, enc_len u16
constexpr std::size_t kEntryHeaderBytes = 18;

}  // namespace

// ---------------------------------------------------------------------------
// DensityThreshold

DensityThreshold::DensityThreshold(double d) {
  if (!(d > 0.0) || d > 1.0)
    throw std::invalid_argument("density threshold must be in (0, 1], got " + std::to_string(d));
  micros_ = static_cast<std::uint32_t>(std::llround(d * 1e6));
  if (micros_ == 0) throw std::invalid_argument("density threshold below one millionth");
}

DensityThreshold DensityThreshold::from_micros(std::uint32_t micros) {
  if (micros == 0 || micros > 1'000'000)
    throw std::invalid_argument("density threshold must be in (0, 1]");
  DensityThreshold t;
  t.micros_ = micros;
  return t;
}

bool DensityThreshold::exceeded_by(std::uint32_t ones, std::uint32_t nbits) const {
  return std::uint64_t{ones} * 1'000'000 > std::uint64_t{micros_} * nbits;
}

bool DensityThreshold::not_reached_by(std::uint32_t ones, std::uint32_t nbits) const {
  return std::uint64_t{ones} * 1'000'000 < std::uint64_t{micros_} * nbits;
}

// ---------------------------------------------------------------------------
// Entry region

HippoIndex::HippoIndex(CompleteHistogram hist, DensityThreshold density)
    : histogram_(std::move(hist)), density_(density) {}

PageId HippoIndex::start_at(std::uint64_t address) const {
  return detail::load<std::uint64_t>(region_.data() + address);
}

PageId HippoIndex::end_at(std::uint64_t address) const {
  return detail::load<std::uint64_t>(region_.data() + address + 8);
}

IndexEntry HippoIndex::entry_at(std::uint64_t address) const {
  if (address + kEntryHeaderBytes > region_.size())
    throw FormatError("entry address " + std::to_string(address) + " outside entry region");
  const std::uint8_t* p = region_.data() + address;
  const auto len = detail::load<std::uint16_t>(p + 16);
  if (address + kEntryHeaderBytes + len > region_.size())
    throw FormatError("entry at " + std::to_string(address) + " overruns entry region");
  return {detail::load<std::uint64_t>(p), detail::load<std::uint64_t>(p + 8),
          BucketBitmap::decode({p + kEntryHeaderBytes, len}, resolution())};
}

std::uint64_t HippoIndex::append_entry(PageId start, PageId end, const BucketBitmap& partial) {
  const auto enc = partial.encode();
  const std::uint64_t addr = region_.size();
  region_.resize(addr + kEntryHeaderBytes + enc.size());
  std::uint8_t* p = region_.data() + addr;
  detail::store<std::uint64_t>(p, start);
  detail::store<std::uint64_t>(p + 8, end);
  detail::store<std::uint16_t>(p + 16, static_cast<std::uint16_t>(enc.size()));
  std::memcpy(p + kEntryHeaderBytes, enc.data(), enc.size());
  return addr;
}

bool HippoIndex::rewrite_entry(std::size_t pos, PageId start, PageId end,
                               const BucketBitmap& partial) {
  const std::uint64_t addr = sorted_[pos];
  const auto enc = partial.encode();
  std::uint8_t* p = region_.data() + addr;
  const auto old_len = detail::load<std::uint16_t>(p + 16);
  if (enc.size() <= old_len) {
    detail::store<std::uint64_t>(p, start);
    detail::store<std::uint64_t>(p + 8, end);
    detail::store<std::uint16_t>(p + 16, static_cast<std::uint16_t>(enc.size()));
    std::memcpy(p + kEntryHeaderBytes, enc.data(), enc.size());
    return false;
  }
  sorted_[pos] = append_entry(start, end, partial);
  return true;
}

PageId HippoIndex::summarized_pages() const {
  if (sorted_.empty()) return 0;
  return end_at(sorted_.back()) + 1;
}

std::vector<IndexEntry> HippoIndex::entries() const {
  std::vector<IndexEntry> out;
  out.reserve(sorted_.size());
  for (auto addr : sorted_) out.push_back(entry_at(addr));
  return out;
}

BucketBitmap HippoIndex::summarize_pages(const TableFile& table, PageId first,
                                         PageId last) const {
  BucketBitmap bm(resolution());
  for (PageId p = first; p <= last; ++p)
    table.for_each_live(p, [&](std::uint32_t, std::int64_t key) {
      bm.set_bucket(histogram_.bucket_of(key));
    });
  return bm;
}

void HippoIndex::check_fresh(const TableFile& table) const {
  if (table.num_pages() != summarized_pages())
    throw StaleIndexError("index summarizes " + std::to_string(summarized_pages()) +
                          " pages but the table has " + std::to_string(table.num_pages()));
}

// ---------------------------------------------------------------------------
// Initialization

HippoIndex HippoIndex::build(const TableFile& table, std::uint32_t resolution, double density) {
  DensityThreshold threshold(density);
  return build(table, build_histogram(table, resolution), threshold.value());
}

HippoIndex HippoIndex::build(const TableFile& table, CompleteHistogram histogram,
                             double density) {
  if (table.num_pages() == 0) throw std::invalid_argument("cannot index an empty table");
  HippoIndex idx(std::move(histogram), DensityThreshold(density));
  idx.table_path_ = table.path().string();

  const auto h = idx.resolution();
  BucketBitmap working(h);
  PageId start = 0;
  for (PageId page = 0; page < table.num_pages(); ++page) {
    table.for_each_live(page, [&](std::uint32_t, std::int64_t key) {
      working.set_bucket(idx.histogram_.bucket_of(key));
    });
    if (idx.density_.exceeded_by(working.count_ones(), h)) {
      idx.sorted_.push_back(idx.append_entry(start, page, working));
      working.clear();
      start = page + 1;
    }
  }
  if (start < table.num_pages())
    idx.sorted_.push_back(idx.append_entry(start, table.num_pages() - 1, working));
  return idx;
}

// ---------------------------------------------------------------------------
// Search

std::vector<bool> HippoIndex::filter_pages(const BucketBitmap& pred_bitmap,
                                           std::size_t* entries_selected) const {
  if (pred_bitmap.nbits() != resolution())
    throw std::invalid_argument("predicate bitmap has " + std::to_string(pred_bitmap.nbits()) +
                                " bits, index resolution is " + std::to_string(resolution()));
  std::vector<bool> pages(summarized_pages(), false);
  std::size_t selected = 0;
  for (auto addr : sorted_) {
    const auto entry = entry_at(addr);
    if (!entry.partial.intersects(pred_bitmap)) continue;
    ++selected;
    for (PageId p = entry.start_page; p <= entry.end_page; ++p) pages[p] = true;
  }
  if (entries_selected) *entries_selected = selected;
  return pages;
}

std::vector<TupleId> HippoIndex::search(const TableFile& table, const Predicate& pred,
                                        SearchStats* stats) const {
  check_fresh(table);
  SearchStats local;
  std::vector<TupleId> out;
  const auto pred_bitmap = convert_predicate(pred, histogram_);
  const auto interval = pred.key_interval();
  if (!pred_bitmap.none() && interval) {
    const auto pages = filter_pages(pred_bitmap, &local.entries_selected);
    for (PageId p = 0; p < pages.size(); ++p) {
      if (!pages[p]) continue;
      ++local.pages_selected;
      table.for_each_live(p, [&](std::uint32_t slot, std::int64_t key) {
        ++local.tuples_inspected;
        if (interval->contains(key)) out.push_back({p, slot});
      });
    }
  }
  if (stats) *stats = local;
  return out;
}

// ---------------------------------------------------------------------------
// Maintenance

std::optional<EntryLocation> HippoIndex::locate_entry(PageId page, std::size_t* probes) const {
  std::size_t n_probes = 0;
  std::optional<EntryLocation> found;
  if (!sorted_.empty()) {
    // Invariant: start(sorted_[lo]) <= page. Entry 0 starts at page 0.
    std::size_t lo = 0;
    std::size_t hi = sorted_.size();
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      ++n_probes;
      if (start_at(sorted_[mid]) <= page)
        lo = mid;
      else
        hi = mid;
    }
    ++n_probes;
    const auto addr = sorted_[lo];
    const auto start = start_at(addr);
    const auto end = end_at(addr);
    if (start <= page && page <= end) found = EntryLocation{lo, addr, start, end};
  }
  if (probes) *probes = n_probes;
  return found;
}

InsertResult HippoIndex::insert(TableFile& table, std::int64_t key,
                                std::span<const std::uint8_t> payload) {
  check_fresh(table);
  const BucketId bucket = histogram_.bucket_of(key);
  InsertResult result;
  result.tuple = table.append_tuple(key, payload);
  const PageId page = result.tuple.page;

  const auto loc = locate_entry(page, &result.probes);
  if (loc) {
    auto entry = entry_at(loc->address);
    if (!entry.partial.test(bucket)) {
      entry.partial.set_bucket(bucket);
      result.relocated = rewrite_entry(loc->position, entry.start_page, entry.end_page,
                                       entry.partial);
      result.entry_updated = true;
    }
    return result;
  }

  // A new page past the last summarized one.
  if (sorted_.empty() || page != summarized_pages())
    throw StaleIndexError("inserted tuple landed on page " + std::to_string(page) +
                          " which the index cannot place");
  const std::size_t last_pos = sorted_.size() - 1;
  auto last = entry_at(sorted_[last_pos]);
  if (density_.not_reached_by(last.partial.count_ones(), resolution())) {
    last.partial.set_bucket(bucket);
    result.relocated = rewrite_entry(last_pos, last.start_page, page, last.partial);
    result.entry_updated = true;
  } else {
    BucketBitmap fresh(resolution());
    fresh.set_bucket(bucket);
    sorted_.push_back(append_entry(page, page, fresh));
    result.entry_created = true;
  }
  return result;
}

void HippoIndex::absorb_appends(const TableFile& table) {
  const PageId covered = summarized_pages();
  if (sorted_.empty() || table.num_pages() < covered)
    throw StaleIndexError("table has fewer pages than the index summarizes");

  const std::size_t last_pos = sorted_.size() - 1;
  auto last = entry_at(sorted_[last_pos]);
  auto merged = last.partial | summarize_pages(table, covered - 1, covered - 1);
  if (merged != last.partial) rewrite_entry(last_pos, last.start_page, last.end_page, merged);

  for (PageId page = covered; page < table.num_pages(); ++page) {
    const auto page_buckets = summarize_pages(table, page, page);
    const std::size_t pos = sorted_.size() - 1;
    auto tail = entry_at(sorted_[pos]);
    if (density_.not_reached_by(tail.partial.count_ones(), resolution()))
      rewrite_entry(pos, tail.start_page, page, tail.partial | page_buckets);
    else
      sorted_.push_back(append_entry(page, page, page_buckets));
  }
}

VacuumReport HippoIndex::vacuum(TableFile& table) {
  check_fresh(table);
  VacuumReport report;
  for (std::size_t pos = 0; pos < sorted_.size(); ++pos) {
    const auto start = start_at(sorted_[pos]);
    const auto end = end_at(sorted_[pos]);
    bool touched = false;
    for (PageId p = start; p <= end; ++p) {
      if (!table.has_deletions(p)) continue;
      table.vacuum_page(p);
      ++report.pages_vacuumed;
      touched = true;
    }
    if (!touched) continue;
    ResummarizedEntry r;
    r.start_page = start;
    r.end_page = end;
    r.before = entry_at(sorted_[pos]).partial;
    r.after = summarize_pages(table, start, end);
    if (r.after != r.before) r.relocated = rewrite_entry(pos, start, end, r.after);
    report.entries.push_back(std::move(r));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Persistence

std::size_t HippoIndex::byte_size() const {
  return kFixedHeaderBytes + 2 + table_path_.size() + 4 + 8 * (std::size_t{resolution()} + 1) +
         8 * sorted_.size() + region_.size();
}

std::vector<std::uint8_t> HippoIndex::serialize() const {
  if (table_path_.size() > 0xFFFF) throw std::invalid_argument("table path too long");
  const auto hist = histogram_.serialize();
  const std::uint64_t sorted_offset = kFixedHeaderBytes + 2 + table_path_.size() + hist.size();
  const std::uint64_t entries_offset = sorted_offset + 8 * sorted_.size();

  detail::ByteWriter w;
  w.bytes().reserve(entries_offset + region_.size());
  w.put_bytes({reinterpret_cast<const std::uint8_t*>(kMagic), 4});
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint32_t>(resolution());
  w.put<std::uint32_t>(density_.micros());
  w.put<std::uint64_t>(sorted_.size());
  w.put<std::uint64_t>(sorted_offset);
  w.put<std::uint64_t>(entries_offset);
  w.put<std::uint16_t>(static_cast<std::uint16_t>(table_path_.size()));
  w.put_string(table_path_);
  w.put_bytes(hist);
  for (auto a : sorted_) w.put<std::uint64_t>(a);
  w.put_bytes(region_);
  return w.take();
}

HippoIndex HippoIndex::deserialize(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  const auto magic = r.get_bytes(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw FormatError("not a Hippo index file");
  if (r.get<std::uint32_t>() != kVersion) throw FormatError("unsupported index version");
  const auto h = r.get<std::uint32_t>();
  const auto micros = r.get<std::uint32_t>();
  const auto n = r.get<std::uint64_t>();
  const auto sorted_offset = r.get<std::uint64_t>();
  const auto entries_offset = r.get<std::uint64_t>();
  const auto path_len = r.get<std::uint16_t>();
  auto path = r.get_string(path_len);

  std::size_t hist_len = 0;
  auto hist = CompleteHistogram::deserialize(bytes.subspan(r.position()), &hist_len);
  if (hist.resolution() != h) throw FormatError("histogram resolution disagrees with header");
  if (micros == 0 || micros > 1'000'000) throw FormatError("bad density threshold");
  if (sorted_offset != r.position() + hist_len || n > (bytes.size() - sorted_offset) / 8 ||
      entries_offset != sorted_offset + 8 * n || entries_offset > bytes.size())
    throw FormatError("inconsistent index section offsets");

  HippoIndex idx(std::move(hist), DensityThreshold::from_micros(micros));
  idx.table_path_ = std::move(path);
  r.seek(sorted_offset);
  idx.sorted_.resize(n);
  for (auto& a : idx.sorted_) a = r.get<std::uint64_t>();
  idx.region_.assign(bytes.begin() + static_cast<std::ptrdiff_t>(entries_offset), bytes.end());

  // Entries must tile pages 0..k-1 in sorted order.
  PageId expect = 0;
  for (auto addr : idx.sorted_) {
    const auto e = idx.entry_at(addr);
    if (e.start_page != expect || e.end_page < e.start_page)
      throw FormatError("index entries do not partition the table pages");
    expect = e.end_page + 1;
  }
  return idx;
}

void HippoIndex::save(const std::filesystem::path& path) const {
  detail::write_file(path.string(), serialize());
}

HippoIndex HippoIndex::load(const std::filesystem::path& path) {
  return deserialize(detail::read_file(path.string()));
}

}  // namespace hippo
