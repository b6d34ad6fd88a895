#include "hippo/baseline.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include "byte_io.hpp"
#include "hippo/error.hpp"

namespace hippo {
namespace {

constexpr char kMagic[4] = {'H', 'I', 'P', 'D'};
constexpr std::size_t kHeaderBytes = 12;
constexpr std::size_t kPairBytes = 20;

}  // namespace

std::vector<TupleId> oracle_scan(const TableFile& table, const Predicate& pred) {
  std::vector<TupleId> out;
  for (PageId p = 0; p < table.num_pages(); ++p)
    table.for_each_live(p, [&](std::uint32_t slot, std::int64_t key) {
      if (pred.matches(key)) out.push_back({p, slot});
    });
  return out;
}

DenseIndex DenseIndex::build(const TableFile& table) {
  DenseIndex d;
  for (PageId p = 0; p < table.num_pages(); ++p)
    table.for_each_live(p, [&](std::uint32_t slot, std::int64_t key) {
      d.pairs_.push_back({key, {p, slot}});
    });
  if (d.pairs_.empty()) throw std::invalid_argument("cannot build a dense index on an empty table");
  std::sort(d.pairs_.begin(), d.pairs_.end());
  d.table_pages_ = table.num_pages();
  return d;
}

std::vector<TupleId> DenseIndex::query(const Predicate& pred) const {
  std::vector<TupleId> out;
  const auto iv = pred.key_interval();
  if (!iv) return out;
  const auto first = std::lower_bound(pairs_.begin(), pairs_.end(), iv->lo,
                                      [](const Pair& p, std::int64_t k) { return p.key < k; });
  const auto last = std::upper_bound(first, pairs_.end(), iv->hi,
                                     [](std::int64_t k, const Pair& p) { return k < p.key; });
  out.reserve(static_cast<std::size_t>(last - first));
  for (auto it = first; it != last; ++it) out.push_back(it->id);
  std::sort(out.begin(), out.end());
  return out;
}

void DenseIndex::check_fresh(const TableFile& table) const {
  std::uint64_t live = 0;
  for (PageId p = 0; p < table.num_pages(); ++p)
    table.for_each_live(p, [&](std::uint32_t, std::int64_t) { ++live; });
  if (live != pairs_.size() || table.num_pages() != table_pages_)
    throw StaleIndexError("dense index covers " + std::to_string(pairs_.size()) +
                          " tuples but the table has " + std::to_string(live));
}

std::size_t DenseIndex::byte_size() const { return kHeaderBytes + kPairBytes * pairs_.size(); }

void DenseIndex::save(const std::filesystem::path& path) const {
  detail::ByteWriter w;
  w.bytes().reserve(byte_size());
  w.put_bytes({reinterpret_cast<const std::uint8_t*>(kMagic), 4});
  w.put<std::uint64_t>(pairs_.size());
  for (const auto& p : pairs_) {
    w.put<std::int64_t>(p.key);
    w.put<std::uint64_t>(p.id.page);
    w.put<std::uint32_t>(p.id.slot);
  }
  detail::write_file(path.string(), w.bytes());
}

DenseIndex DenseIndex::load(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path.string());
  detail::ByteReader r(bytes);
  if (std::memcmp(r.get_bytes(4).data(), kMagic, 4) != 0)
    throw FormatError("not a dense index file: " + path.string());
  const auto n = r.get<std::uint64_t>();
  if (n > r.remaining() / kPairBytes || r.remaining() != n * kPairBytes)
    throw FormatError("dense index size disagrees with its header");
  DenseIndex d;
  d.pairs_.resize(n);
  PageId max_page = 0;
  for (auto& p : d.pairs_) {
    p.key = r.get<std::int64_t>();
    p.id.page = r.get<std::uint64_t>();
    p.id.slot = r.get<std::uint32_t>();
    max_page = std::max(max_page, p.id.page);
  }
  if (!std::is_sorted(d.pairs_.begin(), d.pairs_.end()))
    throw FormatError("dense index pairs are not sorted");
  // The file does not record the page count; infer it from the tuples.
  d.table_pages_ = n == 0 ? 0 : max_page + 1;
  return d;
}

}  // namespace hippo
