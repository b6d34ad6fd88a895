#include "hippo/pagestore.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "hippo/error.hpp"
#include "test_util.hpp"

namespace hippo {
namespace {

using testing::TempDir;

std::vector<std::uint8_t> bytes_of(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(TableFile, CreateEmpty) {
  TempDir dir;
  auto t = TableFile::create(dir.file("t"), 50);
  EXPECT_EQ(t.num_pages(), 0u);
  EXPECT_EQ(t.page_card(), 50u);
  EXPECT_EQ(t.page_size(), 8192u);
  t.flush();
  EXPECT_EQ(std::filesystem::file_size(dir.file("t")), kPageSize);
}

TEST(TableFile, RejectsZeroAndOversizedPageCard) {
  TempDir dir;
  EXPECT_THROW(TableFile::create(dir.file("t"), 0), std::invalid_argument);
  EXPECT_THROW(TableFile::create(dir.file("t"), kMaxPageCard + 1), std::invalid_argument);
}

TEST(TableFile, CreateInUnwritableDirectoryIsIoError) {
  EXPECT_THROW(TableFile::create("/nonexistent-dir/t", 5), IoError);
}

TEST(TableFile, OneTuplePerPage) {
  TempDir dir;
  auto t = TableFile::create(dir.file("t"), 1);
  EXPECT_EQ(t.append_tuple(1), (TupleId{0, 0}));
  EXPECT_EQ(t.append_tuple(2), (TupleId{1, 0}));
  EXPECT_EQ(t.num_pages(), 2u);
}

TEST(TableFile, HundredTuplesFillTwoPages) {
  TempDir dir;
  auto t = TableFile::create(dir.file("t"), 50);
  for (int i = 0; i < 100; ++i) t.append_tuple(i);
  EXPECT_EQ(t.num_pages(), 2u);
  EXPECT_EQ(t.tuple_count(0), 50u);
  EXPECT_EQ(t.tuple_count(1), 50u);
}

TEST(TableFile, AppendFillsLastPageThenAllocates) {
  TempDir dir;
  auto t = TableFile::create(dir.file("t"), 5);
  EXPECT_EQ(t.append_tuple(10), (TupleId{0, 0}));
  for (std::uint32_t s = 1; s < 5; ++s) EXPECT_EQ(t.append_tuple(10 + s), (TupleId{0, s}));
  EXPECT_EQ(t.num_pages(), 1u);
  EXPECT_EQ(t.append_tuple(99), (TupleId{1, 0}));
  EXPECT_EQ(t.num_pages(), 2u);
}

TEST(TableFile, RejectsTupleThatCannotFit) {
  TempDir dir;
  auto t = TableFile::create(dir.file("t"), 2);
  std::vector<std::uint8_t> big(5000, 7);
  t.append_tuple(1, big);
  // Second slot exists but the page has no room for another 5000 bytes.
  EXPECT_THROW(t.append_tuple(2, big), std::invalid_argument);
  std::vector<std::uint8_t> huge(kPageSize, 1);
  EXPECT_THROW(t.append_tuple(3, huge), std::invalid_argument);
  EXPECT_EQ(t.num_pages(), 1u);
  EXPECT_EQ(t.tuple_count(0), 1u);
}

TEST(TableFile, DeleteSetsFlagAndHidesTuple) {
  TempDir dir;
  auto t = testing::table_with_keys(dir.file("t"), 5, {1, 2, 3, 4, 5});
  EXPECT_FALSE(t.has_deletions(0));
  t.delete_tuple({0, 2});
  EXPECT_TRUE(t.has_deletions(0));
  const auto live = t.scan_page(0);
  ASSERT_EQ(live.size(), 4u);
  for (const auto& tup : live) EXPECT_NE(tup.key, 3);
  EXPECT_EQ(t.tuple_count(0), 5u);  // slot kept until vacuum
}

TEST(TableFile, DoubleDeleteAndUnknownTupleFail) {
  TempDir dir;
  auto t = testing::table_with_keys(dir.file("t"), 5, {1, 2, 3});
  t.delete_tuple({0, 1});
  EXPECT_THROW(t.delete_tuple({0, 1}), TupleNotFound);
  EXPECT_THROW(t.delete_tuple({0, 3}), TupleNotFound);
  EXPECT_THROW(t.delete_tuple({4, 0}), TupleNotFound);
}

TEST(TableFile, ScanReturnsSlotOrder) {
  TempDir dir;
  auto t = testing::table_with_keys(dir.file("t"), 5, {50, 40, 30, 20, 10});
  const auto live = t.scan_page(0);
  ASSERT_EQ(live.size(), 5u);
  for (std::uint32_t i = 0; i < 5; ++i) {
    EXPECT_EQ(live[i].id, (TupleId{0, i}));
    EXPECT_EQ(live[i].key, 50 - 10 * static_cast<int>(i));
  }
  t.delete_tuple({0, 0});
  t.delete_tuple({0, 3});
  EXPECT_EQ(t.scan_page(0).size(), 3u);
}

TEST(TableFile, ScanOutOfRange) {
  TempDir dir;
  auto t = TableFile::create(dir.file("t"), 5);
  EXPECT_THROW(t.scan_page(0), std::out_of_range);
  EXPECT_THROW(t.vacuum_page(0), std::out_of_range);
}

TEST(TableFile, VacuumCompactsAndClearsFlag) {
  TempDir dir;
  auto t = testing::table_with_keys(dir.file("t"), 5, {1, 2, 3, 4, 5});
  t.delete_tuple({0, 1});
  t.delete_tuple({0, 3});
  const auto before = t.scan_page(0);
  t.vacuum_page(0);
  EXPECT_FALSE(t.has_deletions(0));
  EXPECT_EQ(t.tuple_count(0), 3u);
  const auto after = t.scan_page(0);
  ASSERT_EQ(after.size(), before.size());
  for (std::size_t i = 0; i < after.size(); ++i) {
    EXPECT_EQ(after[i].key, before[i].key);
    EXPECT_EQ(after[i].id, (TupleId{0, static_cast<std::uint32_t>(i)}));
  }
}

TEST(TableFile, VacuumIsIdempotent) {
  TempDir dir;
  {
    auto t = testing::table_with_keys(dir.file("t"), 5, {1, 2, 3, 4, 5, 6});
    t.vacuum_page(0);  // clean page: no-op
  }
  const auto clean = bytes_of(dir.file("t"));
  {
    auto t = TableFile::open(dir.file("t"));
    t.vacuum_page(0);
  }
  EXPECT_EQ(bytes_of(dir.file("t")), clean);

  {
    auto t = TableFile::open(dir.file("t"));
    t.delete_tuple({0, 0});
    t.vacuum_page(0);
  }
  const auto once = bytes_of(dir.file("t"));
  {
    auto t = TableFile::open(dir.file("t"));
    t.vacuum_page(0);
  }
  EXPECT_EQ(bytes_of(dir.file("t")), once);
}

TEST(TableFile, AppendAfterVacuumReusesSpace) {
  TempDir dir;
  auto t = testing::table_with_keys(dir.file("t"), 3, {1, 2, 3});
  t.delete_tuple({0, 1});
  t.vacuum_page(0);
  EXPECT_EQ(t.append_tuple(9), (TupleId{0, 2}));
  const auto live = t.scan_page(0);
  ASSERT_EQ(live.size(), 3u);
  EXPECT_EQ(live[2].key, 9);
}

TEST(TableFile, ReopenRoundTripProperty) {
  TempDir dir;
  std::mt19937_64 rng(7);
  for (int round = 0; round < 20; ++round) {
    const auto path = dir.file("t" + std::to_string(round));
    const std::uint32_t page_card = 1 + rng() % 60;
    const int n = static_cast<int>(rng() % 500);
    std::vector<std::vector<Tuple>> expected;
    {
      auto t = TableFile::create(path, page_card);
      for (int i = 0; i < n; ++i) {
        std::vector<std::uint8_t> payload(rng() % 24);
        for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
        t.append_tuple(static_cast<std::int64_t>(rng()), payload);
      }
      for (PageId p = 0; p < t.num_pages(); ++p) {
        EXPECT_LE(t.tuple_count(p), page_card);
        if (p + 1 < t.num_pages()) EXPECT_EQ(t.tuple_count(p), page_card);
        expected.push_back(t.scan_page(p));
      }
    }
    auto t = TableFile::open(path);
    ASSERT_EQ(t.num_pages(), expected.size());
    EXPECT_EQ(t.page_card(), page_card);
    for (PageId p = 0; p < t.num_pages(); ++p) EXPECT_EQ(t.scan_page(p), expected[p]);
  }
}

TEST(TableFile, VacuumKeepsLiveTuplesProperty) {
  TempDir dir;
  std::mt19937_64 rng(11);
  auto t = TableFile::create(dir.file("t"), 40);
  for (int i = 0; i < 400; ++i) t.append_tuple(static_cast<std::int64_t>(rng() % 1000));
  for (int i = 0; i < 150; ++i) {
    const TupleId id{rng() % t.num_pages(), static_cast<std::uint32_t>(rng() % 40)};
    if (t.is_live(id)) t.delete_tuple(id);
  }
  for (PageId p = 0; p < t.num_pages(); ++p) {
    std::vector<std::int64_t> before;
    for (const auto& tup : t.scan_page(p)) before.push_back(tup.key);
    t.vacuum_page(p);
    std::vector<std::int64_t> after;
    for (const auto& tup : t.scan_page(p)) after.push_back(tup.key);
    EXPECT_EQ(after, before);
    EXPECT_FALSE(t.has_deletions(p));
    EXPECT_EQ(t.tuple_count(p), after.size());
  }
}

TEST(TableFile, OpenRejectsForeignFile) {
  TempDir dir;
  {
    std::ofstream out(dir.file("junk"), std::ios::binary);
    out << std::string(100, 'x');
  }
  EXPECT_THROW(TableFile::open(dir.file("junk")), FormatError);
  EXPECT_THROW(TableFile::open(dir.file("missing")), IoError);
}

}  // namespace
}  // namespace hippo
