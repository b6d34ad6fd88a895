#include "hippo/bitset.hpp"

#include <gtest/gtest.h>

#include <random>

#include "hippo/error.hpp"

namespace hippo {
namespace {

BucketBitmap random_bitmap(std::mt19937_64& rng, std::uint32_t nbits, double p) {
  std::bernoulli_distribution bit(p);
  BucketBitmap bm(nbits);
  for (BucketId b = 1; b <= nbits; ++b)
    if (bit(rng)) bm.set_bucket(b);
  return bm;
}

TEST(BucketBitmap, SetBucketsGivesExpectedString) {
  BucketBitmap bm(5);
  for (BucketId b : {2, 3, 4}) bm.set_bucket(b);
  EXPECT_EQ(bm.to_string(), "01110");
  EXPECT_EQ(bm, BucketBitmap::from_string("01110"));
}

TEST(BucketBitmap, SetIsIdempotent) {
  BucketBitmap a(5);
  a.set_bucket(3);
  auto b = a;
  b.set_bucket(3);
  EXPECT_EQ(a, b);
}

TEST(BucketBitmap, OutOfRangeBucket) {
  BucketBitmap bm(5);
  EXPECT_THROW(bm.set_bucket(6), std::out_of_range);
  EXPECT_THROW(bm.set_bucket(0), std::out_of_range);
  EXPECT_FALSE(bm.test(6));
}

TEST(BucketBitmap, FromStringRejectsJunk) {
  EXPECT_THROW(BucketBitmap::from_string("01a"), std::invalid_argument);
}

TEST(BucketBitmap, Intersects) {
  const auto row = BucketBitmap::from_string("01110");
  EXPECT_TRUE(BucketBitmap::from_string("00100").intersects(row));
  EXPECT_FALSE(BucketBitmap::from_string("00001").intersects(row));
  EXPECT_FALSE(row.intersects(BucketBitmap(5)));
  EXPECT_THROW(row.intersects(BucketBitmap(6)), std::invalid_argument);
}

TEST(BucketBitmap, IntersectsMatchesPerBitOracle) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const std::uint32_t n = 1 + rng() % 300;
    const double p = (rng() % 100) / 1000.0;
    const auto a = random_bitmap(rng, n, p);
    const auto b = random_bitmap(rng, n, p);
    bool naive = false;
    for (BucketId k = 1; k <= n; ++k) naive |= a.test(k) && b.test(k);
    EXPECT_EQ(a.intersects(b), naive);
    EXPECT_EQ(a.intersects(b), (a & b).count_ones() > 0);
  }
}

TEST(BucketBitmap, Density) {
  EXPECT_DOUBLE_EQ(BucketBitmap::from_string("01110").density(), 0.6);
  EXPECT_DOUBLE_EQ(BucketBitmap::all_ones(400).density(), 1.0);
  EXPECT_DOUBLE_EQ(BucketBitmap(400).density(), 0.0);
}

TEST(BucketBitmap, DensityIsMonotone) {
  std::mt19937_64 rng(5);
  BucketBitmap bm(97);
  double last = 0;
  for (int i = 0; i < 300; ++i) {
    bm.set_bucket(1 + rng() % 97);
    EXPECT_GE(bm.density(), last);
    last = bm.density();
  }
}

TEST(BucketBitmap, SetRangeMatchesSingleBits) {
  for (std::uint32_t n : {1u, 63u, 64u, 65u, 200u}) {
    for (BucketId first = 1; first <= n; first += 7) {
      for (BucketId last = first; last <= n; last += 11) {
        BucketBitmap a(n);
        a.set_range(first, last);
        BucketBitmap b(n);
        for (BucketId k = first; k <= last; ++k) b.set_bucket(k);
        ASSERT_EQ(a, b) << n << " " << first << " " << last;
      }
    }
  }
}

TEST(BucketBitmap, BucketsListsSetBits) {
  const auto bm = BucketBitmap::from_string("10010001");
  EXPECT_EQ(bm.buckets(), (std::vector<BucketId>{1, 4, 8}));
}

TEST(BitmapEncoding, RoundTripRandom) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 10000; ++i) {
    const std::uint32_t n = 1 + rng() % 1000;
    const double p = std::uniform_real_distribution<double>(0, 1)(rng);
    const auto bm = random_bitmap(rng, n, p * p);
    const auto enc = bm.encode();
    ASSERT_EQ(BucketBitmap::decode(enc, n), bm);
    ASSERT_LE(enc.size(), (n + 7) / 8 + 2);
  }
}

TEST(BitmapEncoding, Canonical) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_bitmap(rng, 120, 0.1);
    BucketBitmap b(120);
    for (auto k : a.buckets()) b.set_bucket(k);
    EXPECT_EQ(a.encode(), b.encode());
  }
}

TEST(BitmapEncoding, AllZerosIsSmall) {
  EXPECT_LE(BucketBitmap(400).encode().size(), 8u);
}

TEST(BitmapEncoding, AlternatingFallsBackToRaw) {
  BucketBitmap bm(400);
  for (BucketId k = 1; k <= 400; k += 2) bm.set_bucket(k);
  const auto enc = bm.encode();
  EXPECT_LE(enc.size(), 52u);
  EXPECT_EQ(enc[0], 0);  // raw
}

TEST(BitmapEncoding, SmallBitmapIsRaw) {
  // For five bits the raw form is always two bytes.
  EXPECT_EQ(BucketBitmap::from_string("01110").encode(), (std::vector<std::uint8_t>{0, 0x0e}));
  EXPECT_EQ(BucketBitmap::from_string("00000").encode().size(), 2u);
}

TEST(BitmapEncoding, RunsForSparseWideBitmap) {
  BucketBitmap bm(64);
  bm.set_range(10, 20);
  const auto enc = bm.encode();
  // tag, first bit 0, runs 9, 11, 44
  EXPECT_EQ(enc, (std::vector<std::uint8_t>{1, 0, 9, 11, 44}));
  bm.set_bucket(1);
  EXPECT_GT(bm.encode().size(), enc.size());
}

TEST(BitmapEncoding, DecodeAcceptsNonCanonicalRaw) {
  std::vector<std::uint8_t> raw(1 + 8, 0);
  raw[1] = 0x01;
  const auto bm = BucketBitmap::decode(raw, 64);
  EXPECT_EQ(bm.buckets(), (std::vector<BucketId>{1}));
}

TEST(BitmapEncoding, DecodeRejectsMalformed) {
  using Bytes = std::vector<std::uint8_t>;
  EXPECT_THROW(BucketBitmap::decode(Bytes{}, 5), FormatError);
  EXPECT_THROW(BucketBitmap::decode(Bytes{7, 0}, 5), FormatError);        // unknown tag
  EXPECT_THROW(BucketBitmap::decode(Bytes{0}, 5), FormatError);           // raw too short
  EXPECT_THROW(BucketBitmap::decode(Bytes{0, 0x20}, 5), FormatError);     // bit past nbits
  EXPECT_THROW(BucketBitmap::decode(Bytes{1, 0, 3}, 5), FormatError);     // runs sum short
  EXPECT_THROW(BucketBitmap::decode(Bytes{1, 0, 3, 3}, 5), FormatError);  // runs sum long
  EXPECT_THROW(BucketBitmap::decode(Bytes{1, 0, 0x80}, 5), FormatError);  // cut varint
  EXPECT_THROW(BucketBitmap::decode(Bytes{1, 0, 0, 5}, 5), FormatError);  // zero-length run
}

}  // namespace
}  // namespace hippo
