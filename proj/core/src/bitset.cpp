#include "hippo/bitset.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <stdexcept>

#include "hippo/error.hpp"

namespace hippo {
namespace {

constexpr std::uint8_t kTagRaw = 0;
constexpr std::uint8_t kTagRuns = 1;

std::size_t word_count(std::uint32_t nbits) { return (nbits + 63) / 64; }
std::size_t raw_bytes(std::uint32_t nbits) { return (nbits + 7) / 8; }

void put_varint(std::vector<std::uint8_t>& out, std::uint32_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

std::size_t varint_size(std::uint32_t v) {
  std::size_t n = 1;
  while (v >= 0x80) {
    v >>= 7;
    ++n;
  }
  return n;
}

std::uint32_t get_varint(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 35; shift += 7) {
    if (pos >= bytes.size()) throw FormatError("truncated run length");
    const std::uint8_t b = bytes[pos++];
    v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
    if ((b & 0x80) == 0) {
      if (v > 0xFFFFFFFFu) break;
      if (b == 0 && shift > 0) throw FormatError("non-minimal run length");
      return static_cast<std::uint32_t>(v);
    }
  }
  throw FormatError("run length overflow");
}

// Lengths of the maximal runs of equal bits, in order.
std::vector<std::uint32_t> runs_of(const BucketBitmap& bm) {
  std::vector<std::uint32_t> runs;
  if (bm.nbits() == 0) return runs;
  bool cur = bm.test(1);
  std::uint32_t len = 0;
  for (BucketId b = 1; b <= bm.nbits(); ++b) {
    const bool v = bm.test(b);
    if (v == cur) {
      ++len;
    } else {
      runs.push_back(len);
      cur = v;
      len = 1;
    }
  }
  runs.push_back(len);
  return runs;
}

std::size_t runs_body_size(const std::vector<std::uint32_t>& runs) {
  std::size_t n = 1;
  for (auto r : runs) n += varint_size(r);
  return n;
}

}  // namespace

BucketBitmap::BucketBitmap(std::uint32_t nbits) : nbits_(nbits), words_(word_count(nbits), 0) {}

BucketBitmap BucketBitmap::from_string(std::string_view bits) {
  BucketBitmap bm(static_cast<std::uint32_t>(bits.size()));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1')
      bm.set_bucket(static_cast<BucketId>(i + 1));
    else if (bits[i] != '0')
      throw std::invalid_argument("bitmap string may only contain 0 and 1");
  }
  return bm;
}

BucketBitmap BucketBitmap::all_ones(std::uint32_t nbits) {
  BucketBitmap bm(nbits);
  if (nbits > 0) bm.set_range(1, nbits);
  return bm;
}

void BucketBitmap::set_bucket(BucketId bucket) {
  if (bucket < 1 || bucket > nbits_)
    throw std::out_of_range("bucket " + std::to_string(bucket) + " outside 1.." +
                            std::to_string(nbits_));
  const auto bit = bucket - 1;
  words_[bit / 64] |= std::uint64_t{1} << (bit % 64);
}

void BucketBitmap::set_range(BucketId first, BucketId last) {
  if (first < 1 || last > nbits_ || first > last)
    throw std::out_of_range("bucket range " + std::to_string(first) + ".." +
                            std::to_string(last) + " outside 1.." + std::to_string(nbits_));
  std::uint32_t bit = first - 1;
  const std::uint32_t end = last;  // one past the last bit
  while (bit < end) {
    const std::uint32_t in_word = bit % 64;
    const std::uint32_t n = std::min<std::uint32_t>(64 - in_word, end - bit);
    const std::uint64_t mask = n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1) << in_word;
    words_[bit / 64] |= mask;
    bit += n;
  }
}

bool BucketBitmap::test(BucketId bucket) const {
  if (bucket < 1 || bucket > nbits_) return false;
  const auto bit = bucket - 1;
  return (words_[bit / 64] >> (bit % 64)) & 1u;
}

void BucketBitmap::clear() { std::fill(words_.begin(), words_.end(), 0); }

std::uint32_t BucketBitmap::count_ones() const {
  std::uint32_t n = 0;
  for (auto w : words_) n += static_cast<std::uint32_t>(std::popcount(w));
  return n;
}

bool BucketBitmap::none() const {
  for (auto w : words_)
    if (w != 0) return false;
  return true;
}

double BucketBitmap::density() const {
  if (nbits_ == 0) throw std::invalid_argument("density of a zero-width bitmap");
  return static_cast<double>(count_ones()) / nbits_;
}

void BucketBitmap::check_width(const BucketBitmap& other) const {
  if (nbits_ != other.nbits_)
    throw std::invalid_argument("bitmap width mismatch: " + std::to_string(nbits_) + " vs " +
                                std::to_string(other.nbits_));
}

bool BucketBitmap::intersects(const BucketBitmap& other) const {
  check_width(other);
  for (std::size_t i = 0; i < words_.size(); ++i)
    if ((words_[i] & other.words_[i]) != 0) return true;
  return false;
}

BucketBitmap& BucketBitmap::operator|=(const BucketBitmap& other) {
  check_width(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

BucketBitmap& BucketBitmap::operator&=(const BucketBitmap& other) {
  check_width(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

std::vector<BucketId> BucketBitmap::buckets() const {
  std::vector<BucketId> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    auto word = words_[w];
    while (word != 0) {
      const int bit = std::countr_zero(word);
      out.push_back(static_cast<BucketId>(w * 64 + bit + 1));
      word &= word - 1;
    }
  }
  return out;
}

std::string BucketBitmap::to_string() const {
  std::string s(nbits_, '0');
  for (BucketId b = 1; b <= nbits_; ++b)
    if (test(b)) s[b - 1] = '1';
  return s;
}

std::vector<std::uint8_t> BucketBitmap::encode() const {
  const auto runs = runs_of(*this);
  const std::size_t raw = raw_bytes(nbits_);
  std::vector<std::uint8_t> out;
  if (!runs.empty() && runs_body_size(runs) < raw) {
    out.reserve(1 + runs_body_size(runs));
    out.push_back(kTagRuns);
    out.push_back(test(1) ? 1 : 0);
    for (auto r : runs) put_varint(out, r);
    return out;
  }
  out.assign(1 + raw, 0);
  out[0] = kTagRaw;
  if (raw > 0) std::memcpy(out.data() + 1, words_.data(), raw);
  return out;
}

BucketBitmap BucketBitmap::decode(std::span<const std::uint8_t> bytes, std::uint32_t nbits) {
  if (bytes.empty()) throw FormatError("empty bitmap encoding");
  BucketBitmap bm(nbits);
  const std::size_t raw = raw_bytes(nbits);
  if (bytes[0] == kTagRaw) {
    if (bytes.size() != 1 + raw) throw FormatError("raw bitmap has wrong length");
    if (raw > 0) {
      std::memcpy(bm.words_.data(), bytes.data() + 1, raw);
      if (nbits % 64 != 0 && (bm.words_.back() >> (nbits % 64)) != 0)
        throw FormatError("raw bitmap has padding bits set");
    }
    return bm;
  }
  if (bytes[0] != kTagRuns) throw FormatError("unknown bitmap encoding tag");
  if (bytes.size() < 2 || bytes[1] > 1) throw FormatError("bad run-length header");
  bool value = bytes[1] == 1;
  std::size_t pos = 2;
  std::uint64_t covered = 0;
  while (pos < bytes.size()) {
    const auto len = get_varint(bytes, pos);
    if (len == 0) throw FormatError("zero-length run");
    if (covered + len > nbits) throw FormatError("runs exceed bitmap width");
    if (value) bm.set_range(static_cast<BucketId>(covered + 1), static_cast<BucketId>(covered + len));
    covered += len;
    value = !value;
  }
  if (covered != nbits) throw FormatError("runs do not cover bitmap width");
  return bm;
}

}  // namespace hippo
