#pragma once

// Partitioning arrays into fragments and putting them back together, with
// both directions written as algebra expressions.
//
// Naming follows the array-algebra convention, which is the reverse of the
// relational one:
//   vertical   = split the *index set* into disjoint pieces (relational
//                "horizontal"/row split); recombined by union.
//   horizontal = split every *value tuple* into component slices, duplicating
//                the index in each fragment (relational "vertical"/column
//                split); recombined by equi-join on the index.

#include <algorithm>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "arrac/algebra.hpp"
#include "arrac/core.hpp"
#include "arrac/predicate.hpp"
#include "arrac/transform.hpp"

namespace arrac {

struct VerticalSplit {
  std::vector<Predicate> predicates;  // one coordinate/value condition per fragment
  friend bool operator==(const VerticalSplit&, const VerticalSplit&) = default;
};

struct HorizontalSplit {
  std::vector<std::vector<std::size_t>> slices;  // ascending tuple positions per fragment
  std::size_t tupleArity = 0;
  friend bool operator==(const HorizontalSplit&, const HorizontalSplit&) = default;
};

using PartitionScheme = std::variant<VerticalSplit, HorizontalSplit>;

struct Fragment {
  std::size_t id;
  Array data;
  std::size_t shard;
};

/// Fragments plus everything needed to reassemble them without the original.
struct Placement {
  std::vector<Fragment> fragments;  // ascending id
  PartitionScheme scheme;
  std::size_t originArity;
};

namespace detail {

inline std::size_t shardFor(std::size_t id, std::size_t shardCount) {
  return shardCount == 0 ? id : id % shardCount;
}

}  // namespace detail

/// Splits `a` by index predicates. Every association must satisfy exactly
/// one predicate: NotExhaustive / NotDisjoint name a witness index otherwise.
/// `shardCount` 0 places each fragment on its own shard.
inline Placement partitionVertical(const Array& a, const std::vector<Predicate>& predicates,
                                   std::size_t shardCount = 0) {
  for (const auto& p : predicates) {
    validatePredicate(p, a.arity());
  }
  for (const auto& [index, value] : a) {
    std::size_t hits = 0;
    for (const auto& p : predicates) {
      hits += holds(p, index, value) ? 1 : 0;
    }
    if (hits == 0) {
      throw Error(ErrorCode::NotExhaustive, "index matches no fragment predicate", index.coords);
    }
    if (hits > 1) {
      throw Error(ErrorCode::NotDisjoint, "index matches " + std::to_string(hits) +
                                              " fragment predicates",
                  index.coords);
    }
  }
  Placement out{{}, VerticalSplit{predicates}, a.arity()};
  for (std::size_t k = 0; k < predicates.size(); ++k) {
    out.fragments.push_back({k, select(a, predicates[k]), detail::shardFor(k, shardCount)});
  }
  return out;
}

namespace detail {

/// Value of one horizontal fragment: the component itself for a one-position
/// slice, otherwise the tuple of the slice's components.
inline Value sliceValue(const Value& v, const std::vector<std::size_t>& slice) {
  const auto& items = v.asTuple();
  if (slice.size() == 1) return items[slice.front()];
  std::vector<Value> part;
  part.reserve(slice.size());
  for (std::size_t pos : slice) part.push_back(items[pos]);
  return Value::tuple(std::move(part));
}

inline HorizontalSplit normalizeSlices(std::vector<std::vector<std::size_t>> slices,
                                       std::size_t tupleArity) {
  if (slices.empty()) throw Error(ErrorCode::BadSlices, "no slices given");
  std::vector<int> owner(tupleArity, -1);
  for (std::size_t k = 0; k < slices.size(); ++k) {
    auto& s = slices[k];
    if (s.empty()) throw Error(ErrorCode::BadSlices, "slice " + std::to_string(k) + " is empty");
    std::sort(s.begin(), s.end());
    for (std::size_t pos : s) {
      if (pos >= tupleArity) {
        throw Error(ErrorCode::BadSlices, "position " + std::to_string(pos) +
                                              " is outside tuples of arity " +
                                              std::to_string(tupleArity));
      }
      if (owner[pos] != -1) {
        throw Error(ErrorCode::BadSlices, "position " + std::to_string(pos) +
                                              " appears in more than one slice");
      }
      owner[pos] = static_cast<int>(k);
    }
  }
  for (std::size_t pos = 0; pos < tupleArity; ++pos) {
    if (owner[pos] == -1) {
      throw Error(ErrorCode::BadSlices, "position " + std::to_string(pos) + " is in no slice");
    }
  }
  return HorizontalSplit{std::move(slices), tupleArity};
}

}  // namespace detail

/// Splits every value tuple of `a` into the given position slices; fragment k
/// has a's full support. Values must be tuples of one common arity.
inline Placement partitionHorizontal(const Array& a, std::vector<std::vector<std::size_t>> slices,
                                     std::size_t shardCount = 0) {
  std::optional<std::size_t> tupleArity;
  for (const auto& [index, value] : a) {
    if (!value.isTuple()) {
      throw Error(ErrorCode::NotTupleValued, "horizontal partitioning needs tuple values",
                  index.coords);
    }
    if (tupleArity && *tupleArity != value.asTuple().size()) {
      throw Error(ErrorCode::NotTupleValued, "value tuples differ in arity", index.coords);
    }
    tupleArity = value.asTuple().size();
  }
  if (!tupleArity) {
    // Empty array: the slices themselves define the tuple shape.
    std::size_t top = 0;
    for (const auto& s : slices) {
      for (std::size_t pos : s) top = std::max(top, pos + 1);
    }
    tupleArity = top;
  }
  HorizontalSplit split = detail::normalizeSlices(std::move(slices), *tupleArity);

  Placement out{{}, split, a.arity()};
  for (std::size_t k = 0; k < split.slices.size(); ++k) {
    std::vector<Array::Entry> entries;
    entries.reserve(a.size());
    for (const auto& [index, value] : a) {
      entries.emplace_back(index, detail::sliceValue(value, split.slices[k]));
    }
    out.fragments.push_back({k, Array::fromSorted(a.arity(), std::move(entries)),
                             detail::shardFor(k, shardCount)});
  }
  return out;
}

namespace detail {

inline std::vector<const Fragment*> byId(const Placement& p) {
  std::vector<const Fragment*> order;
  for (const auto& f : p.fragments) order.push_back(&f);
  std::sort(order.begin(), order.end(),
            [](const Fragment* x, const Fragment* y) { return x->id < y->id; });
  return order;
}

inline void checkFragmentArity(const Placement& p) {
  for (const auto& f : p.fragments) {
    if (f.data.arity() != p.originArity) {
      throw Error(ErrorCode::FragmentMismatch,
                  "fragment " + std::to_string(f.id) + " has arity " +
                      std::to_string(f.data.arity()) + ", placement expects " +
                      std::to_string(p.originArity));
    }
  }
}

inline Array reassembleVertical(const Placement& p) {
  Array acc(p.originArity);
  for (const Fragment* f : byId(p)) {
    acc = unite(acc, f->data);
  }
  return acc;
}

inline Array reassembleHorizontal(const Placement& p, const HorizontalSplit& split) {
  auto order = byId(p);
  if (order.size() != split.slices.size()) {
    throw Error(ErrorCode::FragmentMismatch, "placement has " + std::to_string(order.size()) +
                                                 " fragments for " +
                                                 std::to_string(split.slices.size()) + " slices");
  }
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k]->id != k) {
      throw Error(ErrorCode::FragmentMismatch, "horizontal fragment ids must be 0.." +
                                                   std::to_string(order.size() - 1));
    }
  }
  // Every fragment duplicates the same index set.
  const Array& first = order.front()->data;
  for (const Fragment* f : order) {
    if (f->data.size() == first.size() &&
        std::equal(first.begin(), first.end(), f->data.begin(),
                   [](const auto& x, const auto& y) { return x.first == y.first; })) {
      continue;
    }
    IndexSet a = support(first);
    IndexSet b = support(f->data);
    std::vector<Index> diff;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(diff));
    throw Error(ErrorCode::FragmentMismatch,
                "fragment " + std::to_string(f->id) + " does not share the index set of fragment " +
                    std::to_string(order.front()->id),
                diff.front().coords);
  }

  // Fold: acc ⋈ fragment on every index dim, then drop the duplicated dims.
  const std::size_t n = p.originArity;
  TransformSpec dropCopy(n, RemoveDim{n});
  JoinOn on = onAllDims(n);
  Array acc = first;
  for (std::size_t k = 1; k < order.size(); ++k) {
    acc = transform(equiJoin(acc, order[k]->data, on), dropCopy);
  }

  // acc values are left-nested pairs ((v0, v1), v2)...; unwind and scatter
  // each fragment's components back to their tuple positions.
  std::vector<Array::Entry> out;
  out.reserve(acc.size());
  for (const auto& [index, nested] : acc) {
    std::vector<const Value*> parts(order.size());
    const Value* cur = &nested;
    for (std::size_t k = order.size(); k-- > 1;) {
      parts[k] = &cur->asTuple()[1];
      cur = &cur->asTuple()[0];
    }
    parts[0] = cur;

    std::vector<Value> items(split.tupleArity);
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto& slice = split.slices[k];
      if (slice.size() == 1) {
        items[slice.front()] = *parts[k];
        continue;
      }
      if (!parts[k]->isTuple() || parts[k]->asTuple().size() != slice.size()) {
        throw Error(ErrorCode::FragmentMismatch,
                    "fragment " + std::to_string(order[k]->id) +
                        " value does not match its slice width",
                    index.coords);
      }
      for (std::size_t j = 0; j < slice.size(); ++j) items[slice[j]] = parts[k]->asTuple()[j];
    }
    out.emplace_back(index, Value::tuple(std::move(items)));
  }
  return Array::fromSorted(n, std::move(out));
}

}  // namespace detail

/// Rebuilds the partitioned array from the placement alone.
/// Vertical: union of the fragments in id order (ConsistencyViolation on
/// conflicting overlap). Horizontal: equi-join on all index dims, removal of
/// the duplicated index copy, and re-flattening of the value components.
inline Array reassemble(const Placement& p) {
  detail::checkFragmentArity(p);
  if (const auto* h = std::get_if<HorizontalSplit>(&p.scheme)) {
    if (p.fragments.empty()) return Array(p.originArity);
    return detail::reassembleHorizontal(p, *h);
  }
  return detail::reassembleVertical(p);
}

namespace detail {

template <typename Fn>
Predicate mapValueLeaves(const Predicate& p, const Fn& fn) {
  return std::visit(Overloaded{
                        [&](const ValueCmp& c) -> Predicate { return fn(c); },
                        [&](const AndPred& a) -> Predicate {
                          AndPred out;
                          for (const auto& t : a.terms) out.terms.push_back(mapValueLeaves(t, fn));
                          return out;
                        },
                        [&](const OrPred& o) -> Predicate {
                          OrPred out;
                          for (const auto& t : o.terms) out.terms.push_back(mapValueLeaves(t, fn));
                          return out;
                        },
                        [&](const NotPred& n) -> Predicate {
                          return NotPred{mapValueLeaves(*n.term, fn)};
                        },
                        [&](const auto& leaf) -> Predicate { return leaf; },
                    },
                    p.node);
}

}  // namespace detail

/// Applies a selection fragment-wise. For horizontal placements the
/// predicate may use index coordinates freely but value components from one
/// slice only (NotPushable otherwise); the other fragments are then narrowed
/// to the surviving indices with a semi-join.
inline Placement pushSelect(const Placement& p, const Predicate& c) {
  validatePredicate(c, p.originArity);
  Placement out{{}, p.scheme, p.originArity};

  const auto* h = std::get_if<HorizontalSplit>(&p.scheme);
  if (h == nullptr) {
    for (const auto& f : p.fragments) out.fragments.push_back({f.id, select(f.data, c), f.shard});
    return out;
  }

  ValueReferences refs = valueReferences(c);
  if (!refs.any()) {
    for (const auto& f : p.fragments) out.fragments.push_back({f.id, select(f.data, c), f.shard});
    return out;
  }

  auto sliceOf = [&](std::size_t pos) -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < h->slices.size(); ++k) {
      if (std::binary_search(h->slices[k].begin(), h->slices[k].end(), pos)) return k;
    }
    return std::nullopt;
  };

  std::set<std::size_t> touched;
  for (std::size_t pos : refs.components) {
    if (auto k = sliceOf(pos)) touched.insert(*k);
  }
  if (refs.whole) {
    if (h->slices.size() != 1 || h->slices.front().size() == 1) {
      throw Error(ErrorCode::NotPushable, "predicate compares whole values across slices");
    }
    touched.insert(0);
  }
  if (touched.size() > 1) {
    throw Error(ErrorCode::NotPushable, "predicate compares value components from " +
                                            std::to_string(touched.size()) + " slices");
  }
  if (touched.empty()) {
    // Only out-of-range components: those leaves are false everywhere.
    touched.insert(0);
  }
  const std::size_t slice = *touched.begin();
  const auto& positions = h->slices[slice];

  Predicate local = detail::mapValueLeaves(c, [&](const ValueCmp& leaf) -> Predicate {
    if (!leaf.component) return leaf;
    auto it = std::lower_bound(positions.begin(), positions.end(), *leaf.component);
    if (it == positions.end() || *it != *leaf.component) return disj({});
    if (positions.size() == 1) return ValueCmp{leaf.op, leaf.constant, std::nullopt};
    return ValueCmp{leaf.op, leaf.constant, static_cast<std::size_t>(it - positions.begin())};
  });

  const Fragment* owner = nullptr;
  for (const auto& f : p.fragments) {
    if (f.id == slice) owner = &f;
  }
  if (owner == nullptr) {
    throw Error(ErrorCode::FragmentMismatch, "no fragment for slice " + std::to_string(slice));
  }
  Array filtered = select(owner->data, local);
  JoinOn on = onAllDims(p.originArity);
  for (const auto& f : p.fragments) {
    out.fragments.push_back(
        {f.id, f.id == slice ? filtered : semiJoin(f.data, filtered, on), f.shard});
  }
  return out;
}

}  // namespace arrac
