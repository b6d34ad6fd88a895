#include "hippo/histogram.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "byte_io.hpp"
#include "hippo/error.hpp"
#include "hippo/pagestore.hpp"

namespace hippo {

CompleteHistogram CompleteHistogram::from_keys(std::vector<std::int64_t> keys,
                                               std::uint32_t resolution) {
  if (keys.empty()) throw std::invalid_argument("cannot build a histogram over no keys");
  if (resolution == 0) throw std::invalid_argument("histogram resolution must be at least 1");
  if (resolution > keys.size())
    throw std::invalid_argument("histogram resolution " + std::to_string(resolution) +
                                " exceeds cardinality " + std::to_string(keys.size()));
  std::sort(keys.begin(), keys.end());
  const std::uint64_t card = keys.size();
  std::vector<std::int64_t> bounds;
  bounds.reserve(resolution + 1);
  for (std::uint64_t k = 0; k < resolution; ++k) bounds.push_back(keys[k * card / resolution]);
  bounds.push_back(keys.back());
  return CompleteHistogram(std::move(bounds));
}

CompleteHistogram::CompleteHistogram(std::vector<std::int64_t> boundaries)
    : bounds_(std::move(boundaries)) {
  if (bounds_.size() < 2) throw std::invalid_argument("a histogram needs at least one bucket");
  if (!std::is_sorted(bounds_.begin(), bounds_.end()))
    throw std::invalid_argument("histogram boundaries must be non-decreasing");
}

BucketId CompleteHistogram::bucket_of(std::int64_t key) const {
  const auto h = resolution();
  // First boundary >= key. A key equal to b_j starts bucket j+1.
  const auto it = std::lower_bound(bounds_.begin(), bounds_.end(), key);
  auto j = static_cast<std::uint64_t>(it - bounds_.begin());
  if (it != bounds_.end() && *it == key) ++j;
  return static_cast<BucketId>(std::clamp<std::uint64_t>(j, 1, h));
}

std::optional<BucketRange> CompleteHistogram::hit_range(std::optional<std::int64_t> lo,
                                                        std::optional<std::int64_t> hi,
                                                        bool lo_inclusive,
                                                        bool hi_inclusive) const {
  if (lo && hi && *lo > *hi) throw std::invalid_argument("range lower bound exceeds upper bound");
  constexpr auto kMin = std::numeric_limits<std::int64_t>::min();
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();

  // Reduce to the closed integer interval [first_key, last_key].
  std::int64_t first_key = kMin;
  std::int64_t last_key = kMax;
  if (lo) {
    if (!lo_inclusive && *lo == kMax) return std::nullopt;
    first_key = lo_inclusive ? *lo : *lo + 1;
  }
  if (hi) {
    if (!hi_inclusive && *hi == kMin) return std::nullopt;
    last_key = hi_inclusive ? *hi : *hi - 1;
  }
  if (first_key > last_key) return std::nullopt;
  // bucket_of is monotone in the key, so the hit set is contiguous.
  return BucketRange{bucket_of(first_key), bucket_of(last_key)};
}

BucketBitmap CompleteHistogram::buckets_hit_by_range(std::optional<std::int64_t> lo,
                                                     std::optional<std::int64_t> hi,
                                                     bool lo_inclusive, bool hi_inclusive) const {
  BucketBitmap bm(resolution());
  if (auto r = hit_range(lo, hi, lo_inclusive, hi_inclusive)) bm.set_range(r->first, r->last);
  return bm;
}

std::vector<std::uint8_t> CompleteHistogram::serialize() const {
  detail::ByteWriter w;
  w.put<std::uint32_t>(resolution());
  for (auto b : bounds_) w.put<std::int64_t>(b);
  return w.take();
}

CompleteHistogram CompleteHistogram::deserialize(std::span<const std::uint8_t> bytes,
                                                 std::size_t* consumed) {
  detail::ByteReader r(bytes);
  const auto h = r.get<std::uint32_t>();
  if (h == 0 || (static_cast<std::uint64_t>(h) + 1) * 8 > r.remaining())
    throw FormatError("bad histogram block");
  std::vector<std::int64_t> bounds(h + 1);
  for (auto& b : bounds) b = r.get<std::int64_t>();
  if (!std::is_sorted(bounds.begin(), bounds.end()))
    throw FormatError("histogram boundaries are not sorted");
  if (consumed) *consumed = r.position();
  return CompleteHistogram(std::move(bounds));
}

CompleteHistogram build_histogram(const TableFile& table, std::uint32_t resolution) {
  std::vector<std::int64_t> keys;
  keys.reserve(table.num_pages() * table.page_card());
  for (PageId p = 0; p < table.num_pages(); ++p)
    table.for_each_live(p, [&](std::uint32_t, std::int64_t key) { keys.push_back(key); });
  if (keys.empty()) throw std::invalid_argument("cannot build a histogram over an empty table");
  return CompleteHistogram::from_keys(std::move(keys), resolution);
}

}  // namespace hippo
