#pragma once

// Conjunctive predicates over the single integer key, and their conversion to
// the set of complete-histogram buckets they hit.
//
// Text syntax:  key OP N [AND key OP N]...   with OP in = > >= < <=

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hippo/bitset.hpp"

namespace hippo {

class CompleteHistogram;

struct Equality {
  std::int64_t key = 0;

  bool operator==(const Equality&) const = default;
};

struct Range {
  std::optional<std::int64_t> lo;
  std::optional<std::int64_t> hi;
  bool lo_inclusive = true;
  bool hi_inclusive = true;

  bool operator==(const Range&) const = default;
};

using Atom = std::variant<Equality, Range>;

// Closed integer interval.
struct KeyInterval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  bool contains(std::int64_t k) const { return lo <= k && k <= hi; }
  bool operator==(const KeyInterval&) const = default;
};

class Predicate {
 public:
  // Throws std::invalid_argument for an empty atom list or a range whose
  // lower bound exceeds its upper bound.
  explicit Predicate(std::vector<Atom> atoms);

  static Predicate equals(std::int64_t key);
  static Predicate between(std::int64_t lo, std::int64_t hi);  // inclusive
  static Predicate greater_than(std::int64_t k, bool inclusive = false);
  static Predicate less_than(std::int64_t k, bool inclusive = false);

  // Throws std::invalid_argument with a message pointing at the bad token.
  static Predicate parse(std::string_view text);

  const std::vector<Atom>& atoms() const { return atoms_; }

  // Conjunction with another predicate.
  Predicate operator&&(const Predicate& other) const;

  bool matches(std::int64_t key) const;

  // The integer keys satisfying every atom; nullopt when none do.
  std::optional<KeyInterval> key_interval() const;

  std::string to_string() const;

  bool operator==(const Predicate&) const = default;

 private:
  std::vector<Atom> atoms_;
};

// Per-atom hit sets intersected bucket-wise. An unsatisfiable conjunction
// yields the all-zeros bitmap.
BucketBitmap convert_predicate(const Predicate& pred, const CompleteHistogram& hist);

}  // namespace hippo
