#pragma once

// Complete equi-depth (height-balanced) histogram over the indexed key.
//
// H buckets described by H+1 non-decreasing boundaries b_0..b_H. Bucket i
// (1-based) covers [b_{i-1}, b_i) for i < H and [b_{H-1}, b_H] for i = H.
// Keys outside [b_0, b_H] clamp to bucket 1 or H, so keys inserted after the
// build still map to a bucket. When several boundaries are equal the key is
// assigned to the first bucket that starts at it.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hippo/bitset.hpp"

namespace hippo {

class TableFile;

// Inclusive range of bucket ids.
struct BucketRange {
  BucketId first = 1;
  BucketId last = 1;

  bool operator==(const BucketRange&) const = default;
};

class CompleteHistogram {
 public:
  // Takes ownership of the key multiset and sorts it. Boundary k is the key
  // at sorted index floor(k * Card / H) for k < H; b_H is the maximum key.
  // Throws std::invalid_argument when keys is empty, H == 0 or H > Card.
  static CompleteHistogram from_keys(std::vector<std::int64_t> keys, std::uint32_t resolution);

  // Throws std::invalid_argument unless there are at least two boundaries
  // and they are non-decreasing.
  explicit CompleteHistogram(std::vector<std::int64_t> boundaries);

  std::uint32_t resolution() const { return static_cast<std::uint32_t>(bounds_.size() - 1); }
  std::span<const std::int64_t> boundaries() const { return bounds_; }

  // Binary search over the boundaries; clamps out-of-range keys.
  BucketId bucket_of(std::int64_t key) const;

  // Buckets intersecting the integer interval described by the bounds; an
  // absent bound is unbounded. Returns nullopt when no integer satisfies the
  // bounds (e.g. lo == hi with an exclusive side). Throws
  // std::invalid_argument when lo > hi.
  std::optional<BucketRange> hit_range(std::optional<std::int64_t> lo,
                                       std::optional<std::int64_t> hi, bool lo_inclusive = true,
                                       bool hi_inclusive = true) const;

  // Same as hit_range, as an H-bit bitmap (all zeros when nothing is hit).
  BucketBitmap buckets_hit_by_range(std::optional<std::int64_t> lo,
                                    std::optional<std::int64_t> hi, bool lo_inclusive = true,
                                    bool hi_inclusive = true) const;

  // {H u32, (H+1) x i64}
  std::vector<std::uint8_t> serialize() const;
  static CompleteHistogram deserialize(std::span<const std::uint8_t> bytes,
                                       std::size_t* consumed = nullptr);

  bool operator==(const CompleteHistogram&) const = default;

 private:
  std::vector<std::int64_t> bounds_;
};

// Builds the histogram from every live key of the table.
CompleteHistogram build_histogram(const TableFile& table, std::uint32_t resolution);

}  // namespace hippo
