#pragma once

// BucketBitmap: a fixed-width set of histogram buckets. Bucket ids are
// 1-based; bucket i lives in bit i-1. Used both for partial histograms and
// for the buckets a predicate hits.
//
// Encoded form: one tag byte followed by a body.
//   tag 0  raw      body = ceil(nbits/8) bytes, bit i-1 at byte (i-1)/8, bit (i-1)%8
//   tag 1  runs     body = first bit value (u8), then LEB128 lengths of the
//                   alternating runs, which sum to nbits
// The run form is used only when strictly shorter than the raw form, so the
// encoding is canonical and never longer than ceil(nbits/8) + 1 bytes.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hippo {

using BucketId = std::uint32_t;

class BucketBitmap {
 public:
  BucketBitmap() = default;
  explicit BucketBitmap(std::uint32_t nbits);

  // Parses "01110"-style strings, leftmost character = bucket 1.
  static BucketBitmap from_string(std::string_view bits);
  static BucketBitmap all_ones(std::uint32_t nbits);

  std::uint32_t nbits() const { return nbits_; }

  // Throws std::out_of_range unless 1 <= bucket <= nbits. Idempotent.
  void set_bucket(BucketId bucket);
  // Sets buckets first..last inclusive.
  void set_range(BucketId first, BucketId last);
  bool test(BucketId bucket) const;
  void clear();

  std::uint32_t count_ones() const;
  bool none() const;
  // count_ones / nbits.
  double density() const;

  // True iff some bucket is set in both. Word-at-a-time with early exit.
  // Throws std::invalid_argument on width mismatch.
  bool intersects(const BucketBitmap& other) const;

  BucketBitmap& operator|=(const BucketBitmap& other);
  BucketBitmap& operator&=(const BucketBitmap& other);
  friend BucketBitmap operator&(BucketBitmap a, const BucketBitmap& b) { return a &= b; }
  friend BucketBitmap operator|(BucketBitmap a, const BucketBitmap& b) { return a |= b; }
  bool operator==(const BucketBitmap&) const = default;

  std::vector<BucketId> buckets() const;
  std::string to_string() const;

  std::vector<std::uint8_t> encode() const;
  // Throws FormatError on malformed input. Non-canonical but well-formed
  // input (e.g. raw form where runs would be shorter) is accepted.
  static BucketBitmap decode(std::span<const std::uint8_t> bytes, std::uint32_t nbits);

  std::span<const std::uint64_t> words() const { return words_; }

 private:
  void check_width(const BucketBitmap& other) const;

  std::uint32_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace hippo
