#pragma once

// The core operators (projection, selection, cross product, union; index
// transformations live in transform.hpp) and the joins derived from them.
// Every operator takes immutable arrays and returns a new one.

#include <map>
#include <utility>
#include <vector>

#include "arrac/core.hpp"
#include "arrac/predicate.hpp"
#include "arrac/transform.hpp"

namespace arrac {

/// A join condition: pairs (dim of the left operand, dim of the right operand)
/// whose coordinates must be equal.
using JoinOn = std::vector<std::pair<std::size_t, std::size_t>>;

/// Keeps the associations whose index is in `keep`. The arity is unchanged.
/// Members of `keep` outside the support are ignored.
inline Array project(const Array& a, const IndexSet& keep) {
  for (const Index& i : keep) {
    a.checkIndex(i);
  }
  std::vector<Array::Entry> out;
  // Walk whichever side is smaller.
  if (keep.size() < a.size()) {
    for (const Index& i : keep) {
      if (const Value* v = a.find(i)) out.emplace_back(i, *v);
    }
  } else {
    for (const auto& e : a) {
      if (keep.count(e.first)) out.push_back(e);
    }
  }
  return Array::fromSorted(a.arity(), std::move(out));
}

/// Projection onto an index set described by a coordinate-only predicate.
/// Throws BadPredicate if the predicate inspects values.
inline Array project(const Array& a, const Predicate& indexCondition) {
  if (valueReferences(indexCondition).any()) {
    throw Error(ErrorCode::BadPredicate, "projection conditions may only refer to coordinates");
  }
  validatePredicate(indexCondition, a.arity());
  std::vector<Array::Entry> out;
  static const Value probe;
  for (const auto& e : a) {
    if (holds(indexCondition, e.first, probe)) out.push_back(e);
  }
  return Array::fromSorted(a.arity(), std::move(out));
}

/// Keeps the associations for which `c` holds. The arity is unchanged.
inline Array select(const Array& a, const Predicate& c) {
  validatePredicate(c, a.arity());
  std::vector<Array::Entry> out;
  for (const auto& e : a) {
    if (holds(c, e.first, e.second)) out.push_back(e);
  }
  return Array::fromSorted(a.arity(), std::move(out));
}

/// Cross product: every pair of associations, with concatenated indices and
/// the pair of values as a 2-tuple. Arity is the sum, size the product.
inline Array cross(const Array& a, const Array& b) {
  std::vector<Array::Entry> out;
  out.reserve(a.size() * b.size());
  for (const auto& [ia, va] : a) {
    for (const auto& [ib, vb] : b) {
      out.emplace_back(concat(ia, ib), Value::tuple({va, vb}));
    }
  }
  // Lexicographic order of (ia, ib) pairs is lexicographic order of ia∘ib
  // because all left indices share one arity.
  return Array::fromSorted(a.arity() + b.arity(), std::move(out));
}

/// Union of two same-arity arrays. Throws ConsistencyViolation, with the
/// conflicting index as witness, if an index maps to different values.
inline Array unite(const Array& a, const Array& b) {
  if (a.arity() != b.arity()) {
    throw Error(ErrorCode::ArityMismatch, "union of arrays with arity " +
                                              std::to_string(a.arity()) + " and " +
                                              std::to_string(b.arity()));
  }
  std::vector<Array::Entry> out;
  out.reserve(a.size() + b.size());
  auto x = a.begin();
  auto y = b.begin();
  while (x != a.end() && y != b.end()) {
    if (x->first < y->first) {
      out.push_back(*x++);
    } else if (y->first < x->first) {
      out.push_back(*y++);
    } else {
      if (x->second != y->second) {
        throw Error(ErrorCode::ConsistencyViolation,
                    "union operands disagree on the value at an index", x->first.coords);
      }
      out.push_back(*x++);
      ++y;
    }
  }
  out.insert(out.end(), x, a.end());
  out.insert(out.end(), y, b.end());
  return Array::fromSorted(a.arity(), std::move(out));
}

/// The predicate p of σ_p(A×B) for the join condition `on`, where the left
/// operand has arity `leftArity`.
inline Predicate joinCondition(std::size_t leftArity, const JoinOn& on) {
  std::vector<Predicate> terms;
  terms.reserve(on.size());
  for (const auto& [da, db] : on) {
    terms.push_back(coordCmp(CmpOp::Eq, da, leftArity + db));
  }
  return conj(std::move(terms));
}

namespace detail {

inline void validateOn(const Array& a, const Array& b, const JoinOn& on) {
  for (const auto& [da, db] : on) {
    if (da >= a.arity() || db >= b.arity()) {
      throw Error(ErrorCode::PredicateArity,
                  "join pair " + std::to_string(da) + ":" + std::to_string(db) +
                      " does not fit arities " + std::to_string(a.arity()) + " and " +
                      std::to_string(b.arity()));
    }
  }
}

inline std::vector<Coord> joinKey(const Index& i, const JoinOn& on, bool left) {
  std::vector<Coord> key;
  key.reserve(on.size());
  for (const auto& [da, db] : on) key.push_back(i[left ? da : db]);
  return key;
}

/// Right-side associations grouped by join key.
inline std::map<std::vector<Coord>, std::vector<const Array::Entry*>> buildSide(const Array& b,
                                                                                const JoinOn& on) {
  std::map<std::vector<Coord>, std::vector<const Array::Entry*>> table;
  for (const auto& e : b) table[joinKey(e.first, on, false)].push_back(&e);
  return table;
}

}  // namespace detail

/// Equi-join on index coordinates: equal to
/// select(cross(a, b), joinCondition(a.arity(), on)), computed by hashing the
/// right operand on its join key.
inline Array equiJoin(const Array& a, const Array& b, const JoinOn& on) {
  detail::validateOn(a, b, on);
  auto table = detail::buildSide(b, on);
  std::vector<Array::Entry> out;
  for (const auto& [ia, va] : a) {
    auto it = table.find(detail::joinKey(ia, on, true));
    if (it == table.end()) continue;
    for (const Array::Entry* eb : it->second) {
      out.emplace_back(concat(ia, eb->first), Value::tuple({va, eb->second}));
    }
  }
  return Array::fromSorted(a.arity() + b.arity(), std::move(out));
}

namespace detail {

inline Array filterByMatch(const Array& a, const Array& b, const JoinOn& on, bool wantMatch) {
  validateOn(a, b, on);
  auto table = buildSide(b, on);
  std::vector<Array::Entry> out;
  for (const auto& e : a) {
    bool matched = table.count(joinKey(e.first, on, true)) > 0;
    if (matched == wantMatch) out.push_back(e);
  }
  return Array::fromSorted(a.arity(), std::move(out));
}

}  // namespace detail

/// The associations of `a` with at least one partner in `b` under `on`.
/// Result has a's arity and a's values.
inline Array semiJoin(const Array& a, const Array& b, const JoinOn& on) {
  return detail::filterByMatch(a, b, on, true);
}

/// The associations of `a` with no partner in `b` under `on`; the
/// complement of semiJoin within `a`.
inline Array antiJoin(const Array& a, const Array& b, const JoinOn& on) {
  return detail::filterByMatch(a, b, on, false);
}

/// Pairs every dim of `a` with the same dim of `b` (both must share arity).
inline JoinOn onAllDims(std::size_t arity) {
  JoinOn on;
  for (std::size_t d = 0; d < arity; ++d) on.emplace_back(d, d);
  return on;
}

}  // namespace arrac
