#pragma once

// Reference implementations used to check Hippo and to size it against a
// dense per-tuple index.
//
//   oracle_scan  reads every page and filters tuples one by one
//   DenseIndex   sorted (key, tuple id) array with binary-search lookup; the
//                on-disk form is "HIPD", count u64, count x (key i64,
//                page u64, slot u32)

#include <cstdint>
#include <filesystem>
#include <vector>

#include "hippo/pagestore.hpp"
#include "hippo/predicate.hpp"

namespace hippo {

std::vector<TupleId> oracle_scan(const TableFile& table, const Predicate& pred);

class DenseIndex {
 public:
  struct Pair {
    std::int64_t key = 0;
    TupleId id;

    auto operator<=>(const Pair&) const = default;
  };

  // Throws std::invalid_argument on an empty table.
  static DenseIndex build(const TableFile& table);
  static DenseIndex load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  // Matching tuple ids sorted by (page, slot).
  std::vector<TupleId> query(const Predicate& pred) const;

  // Throws StaleIndexError when the table's live tuples differ in number or
  // page count from those indexed.
  void check_fresh(const TableFile& table) const;

  std::size_t size() const { return pairs_.size(); }
  const std::vector<Pair>& pairs() const { return pairs_; }
  std::size_t byte_size() const;

 private:
  std::vector<Pair> pairs_;
  std::uint64_t table_pages_ = 0;
};

}  // namespace hippo
