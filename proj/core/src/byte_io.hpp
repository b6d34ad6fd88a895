#pragma once

// Little-endian load/store helpers shared by the on-disk formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "hippo/error.hpp"

namespace hippo::detail {

static_assert(std::endian::native == std::endian::little,
              "on-disk formats are little-endian and stored by memcpy");

template <typename T>
  requires std::is_trivially_copyable_v<T>
T load(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
  requires std::is_trivially_copyable_v<T>
void store(std::uint8_t* p, T v) {
  std::memcpy(p, &v, sizeof(T));
}

// Append-only byte sink.
class ByteWriter {
 public:
  template <typename T>
  void put(T v) {
    const auto at = buf_.size();
    buf_.resize(at + sizeof(T));
    store(buf_.data() + at, v);
  }
  void put_bytes(std::span<const std::uint8_t> bytes) {
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
  }
  void put_string(std::string_view s) {
    put_bytes({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
  }
  std::size_t size() const { return buf_.size(); }
  std::vector<std::uint8_t>& bytes() { return buf_; }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

// Bounds-checked cursor over a byte span; throws FormatError on overrun.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v = load<T>(bytes_.data() + pos_);
    pos_ += sizeof(T);
    return v;
  }
  std::span<const std::uint8_t> get_bytes(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::string get_string(std::size_t n) {
    auto s = get_bytes(n);
    return {reinterpret_cast<const char*>(s.data()), s.size()};
  }
  void seek(std::size_t pos) {
    if (pos > bytes_.size()) throw FormatError("seek past end of buffer");
    pos_ = pos;
  }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (n > bytes_.size() - pos_) throw FormatError("truncated input");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace hippo::detail
