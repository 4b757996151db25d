#pragma once

// Array data model: an n-dimensional array is a finite partial function from
// integer index tuples to values. Associations are kept sorted by index so
// every array has one canonical enumeration.

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "arrac/error.hpp"

namespace arrac {

using Coord = std::int64_t;

/// A fixed-arity tuple of signed integer coordinates, ordered lexicographically.
struct Index {
  std::vector<Coord> coords;

  Index() = default;
  Index(std::initializer_list<Coord> init) : coords(init) {}
  explicit Index(std::vector<Coord> c) : coords(std::move(c)) {}

  std::size_t arity() const noexcept { return coords.size(); }
  Coord operator[](std::size_t dim) const { return coords[dim]; }

  friend bool operator==(const Index&, const Index&) = default;
  friend auto operator<=>(const Index&, const Index&) = default;
};

/// Concatenation of two indices (the index part of a cross product).
inline Index concat(const Index& a, const Index& b) {
  std::vector<Coord> c;
  c.reserve(a.arity() + b.arity());
  c.insert(c.end(), a.coords.begin(), a.coords.end());
  c.insert(c.end(), b.coords.begin(), b.coords.end());
  return Index(std::move(c));
}

using IndexSet = std::set<Index>;

class Array;

/// Tagged scalar, tuple, or nested array. `Undef` is a stored value, distinct
/// from an index being absent from an array's support.
class Value {
 public:
  enum class Tag { Int, Float, Str, Undef, Tuple, Array };

  Value() : v_(UndefTag{}) {}

  static Value integer(std::int64_t i) { return Value(Storage(std::in_place_index<0>, i)); }

  /// NaN is rejected so that equality stays total.
  static Value real(double d) {
    if (std::isnan(d)) {
      throw Error(ErrorCode::InvalidValue, "NaN cannot be stored as a value");
    }
    return Value(Storage(std::in_place_index<1>, d));
  }

  static Value string(std::string s) { return Value(Storage(std::in_place_index<2>, std::move(s))); }
  static Value undef() { return Value(); }

  static Value tuple(std::vector<Value> items) {
    if (items.empty()) {
      throw Error(ErrorCode::InvalidValue, "tuple values need at least one component");
    }
    return Value(Storage(std::in_place_index<4>, std::move(items)));
  }

  static Value array(Array a);

  Tag tag() const noexcept { return static_cast<Tag>(v_.index()); }
  bool isInt() const noexcept { return tag() == Tag::Int; }
  bool isFloat() const noexcept { return tag() == Tag::Float; }
  bool isStr() const noexcept { return tag() == Tag::Str; }
  bool isUndef() const noexcept { return tag() == Tag::Undef; }
  bool isTuple() const noexcept { return tag() == Tag::Tuple; }
  bool isArray() const noexcept { return tag() == Tag::Array; }

  std::int64_t asInt() const { return std::get<0>(v_); }
  double asFloat() const { return std::get<1>(v_); }
  const std::string& asStr() const { return std::get<2>(v_); }
  const std::vector<Value>& asTuple() const { return std::get<4>(v_); }
  const Array& asArray() const { return *std::get<5>(v_); }

  friend bool operator==(const Value& a, const Value& b) { return compare(a, b) == 0; }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b) { return compare(a, b); }

  /// Total structural order: by tag first, then by content. Floats that are
  /// numerically equal but differ in bits (0.0 and -0.0) are distinct.
  static std::strong_ordering compare(const Value& a, const Value& b);

 private:
  struct UndefTag {};
  using Storage = std::variant<std::int64_t, double, std::string, UndefTag, std::vector<Value>,
                               std::shared_ptr<const Array>>;

  explicit Value(Storage v) : v_(std::move(v)) {}

  Storage v_;
};

/// An immutable n-dimensional sparse array.
///
/// Invariants: arity >= 1, every index has `arity` coordinates, and no two
/// associations share an index (the functional constraint). Entries are
/// stored in ascending index order.
class Array {
 public:
  using Entry = std::pair<Index, Value>;

  /// The empty array of the given arity.
  explicit Array(std::size_t arity) : arity_(checkArity(arity)) {}

  /// Builds an array from arbitrary pairs: sorts, merges identical
  /// duplicates, and rejects conflicting ones.
  static Array fromEntries(std::size_t arity, std::vector<Entry> entries) {
    Array out(arity);
    for (const auto& [index, value] : entries) {
      out.checkIndex(index);
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.first < b.first; });
    std::vector<Entry> merged;
    merged.reserve(entries.size());
    for (auto& e : entries) {
      if (!merged.empty() && merged.back().first == e.first) {
        if (merged.back().second != e.second) {
          throw Error(ErrorCode::ConsistencyViolation,
                      "index is associated with two different values", e.first.coords);
        }
        continue;
      }
      merged.push_back(std::move(e));
    }
    out.entries_ = std::move(merged);
    return out;
  }

  /// Fast path for entries that are usually already in strictly ascending
  /// index order; anything else goes through fromEntries.
  static Array fromSorted(std::size_t arity, std::vector<Entry> entries) {
    Array out(arity);
    for (std::size_t k = 0; k < entries.size(); ++k) {
      out.checkIndex(entries[k].first);
      if (k > 0 && !(entries[k - 1].first < entries[k].first)) {
        return fromEntries(arity, std::move(entries));
      }
    }
    out.entries_ = std::move(entries);
    return out;
  }

  std::size_t arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  std::span<const Entry> entries() const noexcept { return entries_; }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  /// Binary search; nullptr when the index is not in the support.
  const Value* find(const Index& index) const {
    checkIndex(index);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                               [](const Entry& e, const Index& i) { return e.first < i; });
    if (it == entries_.end() || it->first != index) {
      return nullptr;
    }
    return &it->second;
  }

  bool contains(const Index& index) const { return find(index) != nullptr; }

  friend bool operator==(const Array& a, const Array& b) {
    return a.arity_ == b.arity_ && a.entries_ == b.entries_;
  }

  friend std::strong_ordering operator<=>(const Array& a, const Array& b) {
    if (auto c = a.arity_ <=> b.arity_; c != 0) {
      return c;
    }
    return std::lexicographical_compare_three_way(
        a.entries_.begin(), a.entries_.end(), b.entries_.begin(), b.entries_.end(),
        [](const Entry& x, const Entry& y) -> std::strong_ordering {
          if (auto c = x.first <=> y.first; c != 0) {
            return c;
          }
          return Value::compare(x.second, y.second);
        });
  }

  void checkIndex(const Index& index) const {
    if (index.arity() != arity_) {
      throw Error(ErrorCode::ArityMismatch,
                  "index has " + std::to_string(index.arity()) + " coordinates, array arity is " +
                      std::to_string(arity_),
                  index.coords);
    }
  }

 private:
  static std::size_t checkArity(std::size_t arity) {
    if (arity == 0) {
      throw Error(ErrorCode::BadArity, "array arity must be at least 1");
    }
    return arity;
  }

  std::size_t arity_;
  std::vector<Entry> entries_;
};

inline Value Value::array(Array a) {
  return Value(Storage(std::in_place_index<5>, std::make_shared<const Array>(std::move(a))));
}

inline std::strong_ordering Value::compare(const Value& a, const Value& b) {
  if (auto c = a.v_.index() <=> b.v_.index(); c != 0) {
    return c;
  }
  switch (a.tag()) {
    case Tag::Int:
      return a.asInt() <=> b.asInt();
    case Tag::Float: {
      double x = a.asFloat();
      double y = b.asFloat();
      if (x < y) return std::strong_ordering::less;
      if (y < x) return std::strong_ordering::greater;
      return std::bit_cast<std::int64_t>(x) <=> std::bit_cast<std::int64_t>(y);
    }
    case Tag::Str:
      return a.asStr().compare(b.asStr()) <=> 0;
    case Tag::Undef:
      return std::strong_ordering::equal;
    case Tag::Tuple: {
      const auto& x = a.asTuple();
      const auto& y = b.asTuple();
      return std::lexicographical_compare_three_way(x.begin(), x.end(), y.begin(), y.end(),
                                                    &Value::compare);
    }
    case Tag::Array: {
      const auto& pa = std::get<5>(a.v_);
      const auto& pb = std::get<5>(b.v_);
      if (pa == pb) return std::strong_ordering::equal;
      return *pa <=> *pb;
    }
  }
  return std::strong_ordering::equal;
}

/// Constructs an array from (index, value) pairs.
/// Throws ArityMismatch or ConsistencyViolation.
inline Array makeArray(std::size_t arity, std::vector<Array::Entry> pairs) {
  return Array::fromEntries(arity, std::move(pairs));
}

/// The value stored at `index`, or nullopt if `index` is outside the support.
/// A stored Undef comes back as a present Undef value.
inline std::optional<Value> lookup(const Array& a, const Index& index) {
  if (const Value* v = a.find(index)) {
    return *v;
  }
  return std::nullopt;
}

inline IndexSet support(const Array& a) {
  IndexSet out;
  for (const auto& e : a) {
    out.insert(out.end(), e.first);
  }
  return out;
}

inline bool arrayEquals(const Array& a, const Array& b) { return a == b; }

}  // namespace arrac
