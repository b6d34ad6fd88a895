#pragma once

// Slotted heap-page table file.
//
// File layout (little-endian):
//   page 0 (header page): magic "HIPT", version u32, page_card u32,
//                         page_size u32, num_pages u64, zero padding
//   data page i at byte offset (i + 1) * kPageSize:
//     tuple_count u16, has_deletions u8,
//     slot directory: tuple_count x (offset u16, dead u8),
//     tuple records packed from the end of the page towards the directory:
//       key i64, payload_len u16, payload bytes
//
// Deleted tuples keep their slot (dead = 1) until vacuum_page compacts the
// page. Appends only ever go to the last page.
//
// Concurrency: any number of concurrent readers, or one writer. No locking.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hippo {

inline constexpr std::size_t kPageSize = 8192;
inline constexpr std::size_t kPageHeaderBytes = 3;
inline constexpr std::size_t kSlotBytes = 3;
inline constexpr std::size_t kRecordHeaderBytes = 10;
// Most tuples a page can hold (empty payloads).
inline constexpr std::uint32_t kMaxPageCard =
    (kPageSize - kPageHeaderBytes) / (kSlotBytes + kRecordHeaderBytes);

using PageId = std::uint64_t;

struct TupleId {
  PageId page = 0;
  std::uint32_t slot = 0;

  auto operator<=>(const TupleId&) const = default;
};

std::string to_string(const TupleId& id);

struct Tuple {
  TupleId id;
  std::int64_t key = 0;
  std::vector<std::uint8_t> payload;

  bool operator==(const Tuple&) const = default;
};

class TableFile {
 public:
  // Creates (truncating) an empty table. Throws std::invalid_argument when
  // page_card is 0 or larger than kMaxPageCard, IoError on I/O failure.
  static TableFile create(const std::filesystem::path& path, std::uint32_t page_card);
  static TableFile open(const std::filesystem::path& path);

  TableFile(TableFile&& other) noexcept;
  TableFile& operator=(TableFile&& other) noexcept;
  TableFile(const TableFile&) = delete;
  TableFile& operator=(const TableFile&) = delete;
  ~TableFile();

  // Places the tuple in the last page if it has a free slot, otherwise in a
  // freshly allocated page. Throws std::invalid_argument when the record does
  // not fit in the page's remaining bytes.
  TupleId append_tuple(std::int64_t key, std::span<const std::uint8_t> payload = {});

  // Tombstones the slot and sets the page's has_deletions flag.
  // Throws TupleNotFound for unknown or already-dead tuples.
  void delete_tuple(TupleId id);

  // Live tuples of the page in slot order. Throws std::out_of_range.
  std::vector<Tuple> scan_page(PageId page) const;

  // Visits (slot, key) of every live tuple without copying payloads.
  void for_each_live(PageId page,
                     const std::function<void(std::uint32_t slot, std::int64_t key)>& fn) const;

  // Physically drops dead slots; survivors keep their relative order and are
  // renumbered from 0. Clears has_deletions. No-op on clean pages.
  void vacuum_page(PageId page);

  bool has_deletions(PageId page) const;
  // Number of slots (live and dead) on the page.
  std::uint16_t tuple_count(PageId page) const;
  bool is_live(TupleId id) const;

  std::uint64_t num_pages() const { return num_pages_; }
  std::uint32_t page_card() const { return page_card_; }
  std::uint32_t page_size() const { return static_cast<std::uint32_t>(kPageSize); }
  const std::filesystem::path& path() const { return path_; }

  // Writes the buffered page and the header.
  void flush();

 private:
  using PageBuf = std::vector<std::uint8_t>;

  TableFile(std::filesystem::path path, int fd, std::uint32_t page_card, std::uint64_t num_pages);

  void check_page(PageId page) const;
  void read_page(PageId page, std::uint8_t* out) const;
  const std::uint8_t* page_for_read(PageId page, PageBuf& scratch) const;
  std::uint8_t* page_for_write(PageId page);
  void write_back();
  void write_header();
  void close() noexcept;

  std::filesystem::path path_;
  int fd_ = -1;
  std::uint32_t page_card_ = 0;
  std::uint64_t num_pages_ = 0;

  // One-page write-back buffer; reads of the buffered page are served from it.
  PageBuf cache_;
  PageId cache_page_ = 0;
  bool cache_valid_ = false;
  bool cache_dirty_ = false;
  bool header_dirty_ = false;
};

}  // namespace hippo
