#include "hippo/predicate.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <stdexcept>

#include "hippo/histogram.hpp"

namespace hippo {
namespace {

constexpr auto kMin = std::numeric_limits<std::int64_t>::min();
constexpr auto kMax = std::numeric_limits<std::int64_t>::max();

std::optional<KeyInterval> interval_of(const Atom& atom) {
  if (const auto* eq = std::get_if<Equality>(&atom)) return KeyInterval{eq->key, eq->key};
  const auto& r = std::get<Range>(atom);
  std::int64_t lo = kMin;
  std::int64_t hi = kMax;
  if (r.lo) {
    if (!r.lo_inclusive && *r.lo == kMax) return std::nullopt;
    lo = r.lo_inclusive ? *r.lo : *r.lo + 1;
  }
  if (r.hi) {
    if (!r.hi_inclusive && *r.hi == kMin) return std::nullopt;
    hi = r.hi_inclusive ? *r.hi : *r.hi - 1;
  }
  if (lo > hi) return std::nullopt;
  return KeyInterval{lo, hi};
}

BucketBitmap hits_of(const Atom& atom, const CompleteHistogram& hist) {
  if (const auto* eq = std::get_if<Equality>(&atom))
    return hist.buckets_hit_by_range(eq->key, eq->key);
  const auto& r = std::get<Range>(atom);
  return hist.buckets_hit_by_range(r.lo, r.hi, r.lo_inclusive, r.hi_inclusive);
}

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }

  std::string_view word() {
    skip_ws();
    const auto start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    return s_.substr(start, pos_ - start);
  }

  std::string_view op() {
    skip_ws();
    const auto start = pos_;
    while (pos_ < s_.size() && (s_[pos_] == '<' || s_[pos_] == '>' || s_[pos_] == '='))
      ++pos_;
    return s_.substr(start, pos_ - start);
  }

  std::int64_t number() {
    skip_ws();
    std::int64_t v = 0;
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec == std::errc::result_out_of_range) fail("integer out of range");
    if (ec != std::errc() || ptr == first) fail("expected an integer");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("predicate parse error at offset " + std::to_string(pos_) + ": " +
                                what + " in \"" + std::string(s_) + "\"");
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

}  // namespace

Predicate::Predicate(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("a predicate needs at least one atom");
  for (const auto& a : atoms_) {
    const auto* r = std::get_if<Range>(&a);
    if (!r || !r->lo || !r->hi) continue;
    if (*r->lo > *r->hi) throw std::invalid_argument("range lower bound exceeds upper bound");
    if (*r->lo == *r->hi && !(r->lo_inclusive && r->hi_inclusive))
      throw std::invalid_argument("range with equal bounds must include both");
  }
}

Predicate Predicate::equals(std::int64_t key) { return Predicate({Equality{key}}); }

Predicate Predicate::between(std::int64_t lo, std::int64_t hi) {
  return Predicate({Range{lo, hi, true, true}});
}

Predicate Predicate::greater_than(std::int64_t k, bool inclusive) {
  return Predicate({Range{k, std::nullopt, inclusive, true}});
}

Predicate Predicate::less_than(std::int64_t k, bool inclusive) {
  return Predicate({Range{std::nullopt, k, true, inclusive}});
}

Predicate Predicate::parse(std::string_view text) {
  Lexer lex(text);
  std::vector<Atom> atoms;
  while (true) {
    if (lex.at_end()) lex.fail("expected 'key'");
    if (!iequals(lex.word(), "key")) lex.fail("expected 'key'");
    const auto op = lex.op();
    const auto n = lex.number();
    if (op == "=")
      atoms.emplace_back(Equality{n});
    else if (op == ">")
      atoms.emplace_back(Range{n, std::nullopt, false, true});
    else if (op == ">=")
      atoms.emplace_back(Range{n, std::nullopt, true, true});
    else if (op == "<")
      atoms.emplace_back(Range{std::nullopt, n, true, false});
    else if (op == "<=")
      atoms.emplace_back(Range{std::nullopt, n, true, true});
    else
      lex.fail("unknown comparison operator '" + std::string(op) + "'");
    if (lex.at_end()) break;
    if (!iequals(lex.word(), "and")) lex.fail("expected AND");
  }
  return Predicate(std::move(atoms));
}

Predicate Predicate::operator&&(const Predicate& other) const {
  auto atoms = atoms_;
  atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
  return Predicate(std::move(atoms));
}

bool Predicate::matches(std::int64_t key) const {
  for (const auto& a : atoms_) {
    const auto iv = interval_of(a);
    if (!iv || !iv->contains(key)) return false;
  }
  return true;
}

std::optional<KeyInterval> Predicate::key_interval() const {
  KeyInterval acc{kMin, kMax};
  for (const auto& a : atoms_) {
    const auto iv = interval_of(a);
    if (!iv) return std::nullopt;
    acc.lo = std::max(acc.lo, iv->lo);
    acc.hi = std::min(acc.hi, iv->hi);
    if (acc.lo > acc.hi) return std::nullopt;
  }
  return acc;
}

std::string Predicate::to_string() const {
  std::string out;
  auto add = [&](const char* op, std::int64_t v) {
    if (!out.empty()) out += " AND ";
    out += "key ";
    out += op;
    out += ' ';
    out += std::to_string(v);
  };
  for (const auto& a : atoms_) {
    if (const auto* eq = std::get_if<Equality>(&a)) {
      add("=", eq->key);
      continue;
    }
    const auto& r = std::get<Range>(a);
    if (r.lo) add(r.lo_inclusive ? ">=" : ">", *r.lo);
    if (r.hi) add(r.hi_inclusive ? "<=" : "<", *r.hi);
    if (!r.lo && !r.hi) add(">=", kMin);
  }
  return out;
}

BucketBitmap convert_predicate(const Predicate& pred, const CompleteHistogram& hist) {
  BucketBitmap acc = BucketBitmap::all_ones(hist.resolution());
  for (const auto& a : pred.atoms()) {
    acc &= hits_of(a, hist);
    if (acc.none()) break;
  }
  return acc;
}

}  // namespace hippo
