#include "hippo/pagestore.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <utility>

#include "byte_io.hpp"
#include "hippo/error.hpp"

namespace hippo {
namespace {

using detail::load;
using detail::store;

constexpr char kMagic[4] = {'H', 'I', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

std::string errno_message(const std::string& what, const std::filesystem::path& path) {
  return what + " " + path.string() + ": " + std::strerror(errno);
}

// Accessors over one raw data page.
struct PageLayout {
  static std::uint16_t count(const std::uint8_t* p) { return load<std::uint16_t>(p); }
  static void set_count(std::uint8_t* p, std::uint16_t n) { store<std::uint16_t>(p, n); }
  static bool deletions(const std::uint8_t* p) { return p[2] != 0; }
  static void set_deletions(std::uint8_t* p, bool v) { p[2] = v ? 1 : 0; }

  static const std::uint8_t* slot(const std::uint8_t* p, std::size_t i) {
    return p + kPageHeaderBytes + i * kSlotBytes;
  }
  static std::uint8_t* slot(std::uint8_t* p, std::size_t i) {
    return p + kPageHeaderBytes + i * kSlotBytes;
  }
  static std::uint16_t offset(const std::uint8_t* p, std::size_t i) {
    return load<std::uint16_t>(slot(p, i));
  }
  static bool dead(const std::uint8_t* p, std::size_t i) { return slot(p, i)[2] != 0; }

  // Lowest byte used by tuple records; kPageSize on an empty page.
  static std::size_t data_start(const std::uint8_t* p) {
    std::size_t lo = kPageSize;
    for (std::size_t i = 0, n = count(p); i < n; ++i) lo = std::min<std::size_t>(lo, offset(p, i));
    return lo;
  }

  static std::int64_t key(const std::uint8_t* p, std::size_t i) {
    return load<std::int64_t>(p + offset(p, i));
  }

  static std::span<const std::uint8_t> payload(const std::uint8_t* p, std::size_t i) {
    const auto off = offset(p, i);
    const auto len = load<std::uint16_t>(p + off + 8);
    return {p + off + kRecordHeaderBytes, len};
  }

  static void validate(const std::uint8_t* p, std::uint32_t page_card) {
    const auto n = count(p);
    if (n > page_card || kPageHeaderBytes + n * kSlotBytes > kPageSize)
      throw FormatError("page slot count exceeds capacity");
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = offset(p, i);
      if (off < kPageHeaderBytes + n * kSlotBytes || off + kRecordHeaderBytes > kPageSize)
        throw FormatError("slot offset out of page bounds");
      const auto len = load<std::uint16_t>(p + off + 8);
      if (off + kRecordHeaderBytes + len > kPageSize) throw FormatError("tuple overruns page");
    }
  }
};

}  // namespace

std::string to_string(const TupleId& id) {
  return "(" + std::to_string(id.page) + "," + std::to_string(id.slot) + ")";
}

TableFile::TableFile(std::filesystem::path path, int fd, std::uint32_t page_card,
                     std::uint64_t num_pages)
    : path_(std::move(path)),
      fd_(fd),
      page_card_(page_card),
      num_pages_(num_pages),
      cache_(kPageSize, 0) {}

TableFile::TableFile(TableFile&& other) noexcept
    : path_(std::move(other.path_)),
      fd_(std::exchange(other.fd_, -1)),
      page_card_(other.page_card_),
      num_pages_(other.num_pages_),
      cache_(std::move(other.cache_)),
      cache_page_(other.cache_page_),
      cache_valid_(std::exchange(other.cache_valid_, false)),
      cache_dirty_(std::exchange(other.cache_dirty_, false)),
      header_dirty_(std::exchange(other.header_dirty_, false)) {}

TableFile& TableFile::operator=(TableFile&& other) noexcept {
  if (this != &other) {
    close();
    path_ = std::move(other.path_);
    fd_ = std::exchange(other.fd_, -1);
    page_card_ = other.page_card_;
    num_pages_ = other.num_pages_;
    cache_ = std::move(other.cache_);
    cache_page_ = other.cache_page_;
    cache_valid_ = std::exchange(other.cache_valid_, false);
    cache_dirty_ = std::exchange(other.cache_dirty_, false);
    header_dirty_ = std::exchange(other.header_dirty_, false);
  }
  return *this;
}

TableFile::~TableFile() { close(); }

void TableFile::close() noexcept {
  if (fd_ < 0) return;
  try {
    flush();
  } catch (...) {
    // Destructors must not throw; callers wanting the error call flush().
  }
  ::close(fd_);
  fd_ = -1;
}

TableFile TableFile::create(const std::filesystem::path& path, std::uint32_t page_card) {
  if (page_card == 0) throw std::invalid_argument("page_card must be at least 1");
  if (page_card > kMaxPageCard)
    throw std::invalid_argument("page_card " + std::to_string(page_card) +
                                " exceeds the page capacity of " + std::to_string(kMaxPageCard));
  const int fd = ::open(path.c_str(), O_RDWR | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) throw IoError(errno_message("cannot create", path));
  TableFile t(path, fd, page_card, 0);
  t.write_header();
  return t;
}

TableFile TableFile::open(const std::filesystem::path& path) {
  const int fd = ::open(path.c_str(), O_RDWR);
  if (fd < 0) throw IoError(errno_message("cannot open", path));
  std::uint8_t hdr[24];
  const auto got = ::pread(fd, hdr, sizeof hdr, 0);
  if (got != static_cast<ssize_t>(sizeof hdr)) {
    ::close(fd);
    throw FormatError("table header truncated: " + path.string());
  }
  if (std::memcmp(hdr, kMagic, 4) != 0 || load<std::uint32_t>(hdr + 4) != kVersion ||
      load<std::uint32_t>(hdr + 12) != kPageSize) {
    ::close(fd);
    throw FormatError("not a table file: " + path.string());
  }
  const auto page_card = load<std::uint32_t>(hdr + 8);
  const auto num_pages = load<std::uint64_t>(hdr + 16);
  if (page_card == 0 || page_card > kMaxPageCard) {
    ::close(fd);
    throw FormatError("bad page_card in table header: " + path.string());
  }
  return TableFile(path, fd, page_card, num_pages);
}

void TableFile::write_header() {
  std::vector<std::uint8_t> page(kPageSize, 0);
  std::memcpy(page.data(), kMagic, 4);
  store<std::uint32_t>(page.data() + 4, kVersion);
  store<std::uint32_t>(page.data() + 8, page_card_);
  store<std::uint32_t>(page.data() + 12, static_cast<std::uint32_t>(kPageSize));
  store<std::uint64_t>(page.data() + 16, num_pages_);
  if (::pwrite(fd_, page.data(), kPageSize, 0) != static_cast<ssize_t>(kPageSize))
    throw IoError(errno_message("cannot write header of", path_));
  header_dirty_ = false;
}

void TableFile::flush() {
  if (fd_ < 0) return;
  write_back();
  if (header_dirty_) write_header();
}

void TableFile::write_back() {
  if (!cache_valid_ || !cache_dirty_) return;
  const auto off = static_cast<off_t>((cache_page_ + 1) * kPageSize);
  if (::pwrite(fd_, cache_.data(), kPageSize, off) != static_cast<ssize_t>(kPageSize))
    throw IoError(errno_message("cannot write page of", path_));
  cache_dirty_ = false;
}

void TableFile::check_page(PageId page) const {
  if (page >= num_pages_)
    throw std::out_of_range("page " + std::to_string(page) + " out of range (num_pages=" +
                            std::to_string(num_pages_) + ")");
}

void TableFile::read_page(PageId page, std::uint8_t* out) const {
  const auto off = static_cast<off_t>((page + 1) * kPageSize);
  const auto got = ::pread(fd_, out, kPageSize, off);
  if (got != static_cast<ssize_t>(kPageSize)) {
    if (got < 0) throw IoError(errno_message("cannot read page of", path_));
    throw FormatError("table file truncated at page " + std::to_string(page));
  }
  PageLayout::validate(out, page_card_);
}

const std::uint8_t* TableFile::page_for_read(PageId page, PageBuf& scratch) const {
  check_page(page);
  if (cache_valid_ && cache_page_ == page) return cache_.data();
  scratch.resize(kPageSize);
  read_page(page, scratch.data());
  return scratch.data();
}

std::uint8_t* TableFile::page_for_write(PageId page) {
  if (cache_valid_ && cache_page_ == page) return cache_.data();
  write_back();
  cache_valid_ = false;
  read_page(page, cache_.data());
  cache_page_ = page;
  cache_valid_ = true;
  return cache_.data();
}

TupleId TableFile::append_tuple(std::int64_t key, std::span<const std::uint8_t> payload) {
  const std::size_t rec = kRecordHeaderBytes + payload.size();
  if (payload.size() > 0xFFFF || kPageHeaderBytes + kSlotBytes + rec > kPageSize)
    throw std::invalid_argument("tuple payload of " + std::to_string(payload.size()) +
                                " bytes cannot fit in a page");

  std::uint8_t* p = nullptr;
  if (num_pages_ > 0) {
    p = page_for_write(num_pages_ - 1);
    if (PageLayout::count(p) >= page_card_) p = nullptr;
  }
  if (p == nullptr) {
    write_back();
    std::fill(cache_.begin(), cache_.end(), 0);
    cache_page_ = num_pages_;
    cache_valid_ = true;
    cache_dirty_ = true;
    ++num_pages_;
    header_dirty_ = true;
    p = cache_.data();
  }

  const std::size_t n = PageLayout::count(p);
  const std::size_t dir_end = kPageHeaderBytes + (n + 1) * kSlotBytes;
  const std::size_t start = PageLayout::data_start(p);
  if (start < dir_end + rec)
    throw std::invalid_argument("tuple does not fit in the remaining space of page " +
                                std::to_string(num_pages_ - 1));

  const std::size_t off = start - rec;
  store<std::int64_t>(p + off, key);
  store<std::uint16_t>(p + off + 8, static_cast<std::uint16_t>(payload.size()));
  if (!payload.empty()) std::memcpy(p + off + kRecordHeaderBytes, payload.data(), payload.size());
  std::uint8_t* s = PageLayout::slot(p, n);
  store<std::uint16_t>(s, static_cast<std::uint16_t>(off));
  s[2] = 0;
  PageLayout::set_count(p, static_cast<std::uint16_t>(n + 1));
  cache_dirty_ = true;
  return {num_pages_ - 1, static_cast<std::uint32_t>(n)};
}

void TableFile::delete_tuple(TupleId id) {
  if (id.page >= num_pages_) throw TupleNotFound("no tuple " + to_string(id));
  std::uint8_t* p = page_for_write(id.page);
  if (id.slot >= PageLayout::count(p) || PageLayout::dead(p, id.slot))
    throw TupleNotFound("no live tuple " + to_string(id));
  PageLayout::slot(p, id.slot)[2] = 1;
  PageLayout::set_deletions(p, true);
  cache_dirty_ = true;
}

std::vector<Tuple> TableFile::scan_page(PageId page) const {
  PageBuf scratch;
  const std::uint8_t* p = page_for_read(page, scratch);
  std::vector<Tuple> out;
  const std::size_t n = PageLayout::count(p);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (PageLayout::dead(p, i)) continue;
    auto pl = PageLayout::payload(p, i);
    out.push_back({{page, static_cast<std::uint32_t>(i)},
                   PageLayout::key(p, i),
                   std::vector<std::uint8_t>(pl.begin(), pl.end())});
  }
  return out;
}

void TableFile::for_each_live(
    PageId page, const std::function<void(std::uint32_t, std::int64_t)>& fn) const {
  PageBuf scratch;
  const std::uint8_t* p = page_for_read(page, scratch);
  for (std::size_t i = 0, n = PageLayout::count(p); i < n; ++i)
    if (!PageLayout::dead(p, i)) fn(static_cast<std::uint32_t>(i), PageLayout::key(p, i));
}

void TableFile::vacuum_page(PageId page) {
  check_page(page);
  std::uint8_t* p = page_for_write(page);
  if (!PageLayout::deletions(p)) return;

  PageBuf fresh(kPageSize, 0);
  std::size_t next_off = kPageSize;
  std::uint16_t kept = 0;
  for (std::size_t i = 0, n = PageLayout::count(p); i < n; ++i) {
    if (PageLayout::dead(p, i)) continue;
    const auto pl = PageLayout::payload(p, i);
    const std::size_t rec = kRecordHeaderBytes + pl.size();
    next_off -= rec;
    std::memcpy(fresh.data() + next_off, p + PageLayout::offset(p, i), rec);
    std::uint8_t* s = PageLayout::slot(fresh.data(), kept);
    store<std::uint16_t>(s, static_cast<std::uint16_t>(next_off));
    ++kept;
  }
  PageLayout::set_count(fresh.data(), kept);
  std::memcpy(p, fresh.data(), kPageSize);
  cache_dirty_ = true;
}

bool TableFile::has_deletions(PageId page) const {
  PageBuf scratch;
  return PageLayout::deletions(page_for_read(page, scratch));
}

std::uint16_t TableFile::tuple_count(PageId page) const {
  PageBuf scratch;
  return PageLayout::count(page_for_read(page, scratch));
}

bool TableFile::is_live(TupleId id) const {
  if (id.page >= num_pages_) return false;
  PageBuf scratch;
  const std::uint8_t* p = page_for_read(id.page, scratch);
  return id.slot < PageLayout::count(p) && !PageLayout::dead(p, id.slot);
}

}  // namespace hippo
