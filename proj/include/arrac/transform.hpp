#pragma once

// Index transformations: bijective maps on an array's support that permute,
// translate, compact, add, or remove dimensions. Values are carried along
// unchanged and the number of associations never changes.

#include <limits>
#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "arrac/core.hpp"
#include "arrac/predicate.hpp"  // detail::Overloaded

namespace arrac {

/// new[k] = old[perm[k]]
struct Permute {
  std::vector<std::size_t> perm;
  friend bool operator==(const Permute&, const Permute&) = default;
};

struct Translate {
  std::size_t dim;
  Coord offset;
  friend bool operator==(const Translate&, const Translate&) = default;
};

/// Inserts a new coordinate with a fixed value before `position` (0..arity).
struct InsertDim {
  std::size_t position;
  Coord constant;
  friend bool operator==(const InsertDim&, const InsertDim&) = default;
};

/// Drops the coordinate at `position`; the surviving coordinates must stay
/// pairwise distinct over the support.
struct RemoveDim {
  std::size_t position;
  friend bool operator==(const RemoveDim&, const RemoveDim&) = default;
};

/// Maps the sorted distinct coordinates of `dim` to 0..k-1.
struct Compact {
  std::size_t dim;
  friend bool operator==(const Compact&, const Compact&) = default;
};

/// Rewrites coordinates of `dim` through an explicit injective table.
/// Produced when inverting Compact.
struct Remap {
  std::size_t dim;
  std::map<Coord, Coord> table;
  friend bool operator==(const Remap&, const Remap&) = default;
};

/// Re-inserts a coordinate at `position`, looked up by the index it is
/// inserted into. Produced when inverting RemoveDim.
struct Reinsert {
  std::size_t position;
  std::map<Index, Coord> table;
  friend bool operator==(const Reinsert&, const Reinsert&) = default;
};

using TransformStep = std::variant<Permute, Translate, InsertDim, RemoveDim, Compact, Remap, Reinsert>;
using TransformSpec = std::vector<TransformStep>;

/// Data recorded while applying a spec, needed to invert the steps whose
/// inverse depends on the support (Compact and RemoveDim).
struct TransformTrace {
  std::vector<std::optional<TransformStep>> recordedInverse;
};

namespace detail {

inline Error badStep(const std::string& msg) { return Error(ErrorCode::BadStep, msg); }

inline void requireDim(std::size_t dim, std::size_t arity, const char* what) {
  if (dim >= arity) {
    throw badStep(std::string(what) + " names dim " + std::to_string(dim) + " of a " +
                  std::to_string(arity) + "-d index");
  }
}

inline Coord checkedAdd(Coord a, Coord b) {
  Coord r;
  if (__builtin_add_overflow(a, b, &r)) {
    throw badStep("coordinate overflow in translate");
  }
  return r;
}

}  // namespace detail

/// Arity after applying `step` to indices of arity `arity`.
/// Throws BadStep for positions or permutations that do not fit.
inline std::size_t arityAfter(const TransformStep& step, std::size_t arity) {
  return std::visit(
      detail::Overloaded{
          [&](const Permute& p) {
            if (p.perm.size() != arity) {
              throw detail::badStep("permutation of length " + std::to_string(p.perm.size()) +
                                    " applied to arity " + std::to_string(arity));
            }
            std::vector<bool> seen(arity, false);
            for (std::size_t k : p.perm) {
              if (k >= arity || seen[k]) throw detail::badStep("not a permutation");
              seen[k] = true;
            }
            return arity;
          },
          [&](const Translate& t) {
            detail::requireDim(t.dim, arity, "translate");
            return arity;
          },
          [&](const InsertDim& s) {
            if (s.position > arity) detail::requireDim(s.position, arity + 1, "insert");
            return arity + 1;
          },
          [&](const RemoveDim& s) {
            detail::requireDim(s.position, arity, "remove");
            if (arity == 1) throw detail::badStep("cannot remove the only dimension");
            return arity - 1;
          },
          [&](const Compact& s) {
            detail::requireDim(s.dim, arity, "compact");
            return arity;
          },
          [&](const Remap& s) {
            detail::requireDim(s.dim, arity, "remap");
            std::set<Coord> targets;
            for (const auto& [from, to] : s.table) {
              if (!targets.insert(to).second) throw detail::badStep("remap table is not injective");
            }
            return arity;
          },
          [&](const Reinsert& s) {
            if (s.position > arity) detail::requireDim(s.position, arity + 1, "reinsert");
            return arity + 1;
          },
      },
      step);
}

inline std::size_t arityAfter(const TransformSpec& spec, std::size_t arity) {
  for (const auto& step : spec) {
    arity = arityAfter(step, arity);
  }
  return arity;
}

namespace detail {

/// Maps one index through a step whose per-index behaviour does not depend on
/// the rest of the support. Compact must be resolved to a Remap first.
inline Index mapIndex(const TransformStep& step, const Index& in) {
  std::vector<Coord> c = in.coords;
  std::visit(Overloaded{
                 [&](const Permute& p) {
                   for (std::size_t k = 0; k < p.perm.size(); ++k) c[k] = in[p.perm[k]];
                 },
                 [&](const Translate& t) { c[t.dim] = checkedAdd(c[t.dim], t.offset); },
                 [&](const InsertDim& s) {
                   c.insert(c.begin() + static_cast<std::ptrdiff_t>(s.position), s.constant);
                 },
                 [&](const RemoveDim& s) {
                   c.erase(c.begin() + static_cast<std::ptrdiff_t>(s.position));
                 },
                 [&](const Compact&) { throw badStep("unresolved compact step"); },
                 [&](const Remap& s) {
                   auto it = s.table.find(c[s.dim]);
                   if (it == s.table.end()) {
                     throw Error(ErrorCode::NotInvertible,
                                 "coordinate " + std::to_string(c[s.dim]) + " has no remap entry",
                                 in.coords);
                   }
                   c[s.dim] = it->second;
                 },
                 [&](const Reinsert& s) {
                   auto it = s.table.find(in);
                   if (it == s.table.end()) {
                     throw Error(ErrorCode::NotInvertible, "index has no recorded coordinate",
                                 in.coords);
                   }
                   c.insert(c.begin() + static_cast<std::ptrdiff_t>(s.position), it->second);
                 },
             },
             step);
  return Index(std::move(c));
}

/// Compact's forward table for the current support.
inline Remap compactTable(std::size_t dim, std::span<const Array::Entry> entries) {
  std::set<Coord> distinct;
  for (const auto& e : entries) distinct.insert(e.first[dim]);
  Remap r{dim, {}};
  Coord next = 0;
  for (Coord c : distinct) r.table.emplace(c, next++);
  return r;
}

inline Remap invertTable(const Remap& r) {
  Remap inv{r.dim, {}};
  for (const auto& [from, to] : r.table) inv.table.emplace(to, from);
  return inv;
}

}  // namespace detail

/// Applies `spec` and returns the result together with the data needed to
/// invert it. Throws NotInjective if two support indices collapse.
inline std::pair<Array, TransformTrace> transformTraced(const Array& a, const TransformSpec& spec) {
  std::size_t arity = a.arity();
  std::vector<Array::Entry> current(a.begin(), a.end());
  TransformTrace trace;
  trace.recordedInverse.reserve(spec.size());

  for (const auto& step : spec) {
    std::size_t next = arityAfter(step, arity);
    std::optional<TransformStep> inverse;
    TransformStep resolved = step;
    if (const auto* c = std::get_if<Compact>(&step)) {
      Remap forward = detail::compactTable(c->dim, current);
      inverse = detail::invertTable(forward);
      resolved = std::move(forward);
    }

    if (const auto* r = std::get_if<RemoveDim>(&step)) {
      // The removed coordinate of every association, keyed by its reduced index.
      Reinsert back{r->position, {}};
      for (const auto& e : current) {
        back.table.emplace(detail::mapIndex(*r, e.first), e.first[r->position]);
      }
      inverse = std::move(back);
    }

    std::vector<Array::Entry> mapped;
    mapped.reserve(current.size());
    for (auto& [index, value] : current) {
      mapped.emplace_back(detail::mapIndex(resolved, index), std::move(value));
    }
    std::sort(mapped.begin(), mapped.end(),
              [](const Array::Entry& x, const Array::Entry& y) { return x.first < y.first; });
    for (std::size_t k = 1; k < mapped.size(); ++k) {
      if (mapped[k - 1].first == mapped[k].first) {
        throw Error(ErrorCode::NotInjective, "two support indices map to the same index",
                    mapped[k].first.coords);
      }
    }

    current = std::move(mapped);
    arity = next;
    trace.recordedInverse.push_back(std::move(inverse));
  }
  return {Array::fromSorted(arity, std::move(current)), std::move(trace)};
}


inline Array transform(const Array& a, const TransformSpec& spec) {
  return transformTraced(a, spec).first;
}

/// Inverse of `spec`, checked against the support it produced.
///
/// Permute, Translate, InsertDim, Remap and Reinsert invert on their own.
/// Compact and RemoveDim need the entries recorded in `trace` by
/// transformTraced; without them NotInvertible is thrown.
inline TransformSpec invert(const TransformSpec& spec, const IndexSet& supportAfter,
                            const TransformTrace& trace = {}) {
  if (!trace.recordedInverse.empty() && trace.recordedInverse.size() != spec.size()) {
    throw Error(ErrorCode::NotInvertible, "trace does not belong to this transform");
  }
  auto recorded = [&](std::size_t k) -> TransformStep {
    if (trace.recordedInverse.empty() || !trace.recordedInverse[k]) {
      throw Error(ErrorCode::NotInvertible,
                  "step " + std::to_string(k) + " needs recorded coordinates to be inverted");
    }
    return *trace.recordedInverse[k];
  };

  TransformSpec inverse;
  inverse.reserve(spec.size());
  for (std::size_t k = spec.size(); k-- > 0;) {
    inverse.push_back(std::visit(
        detail::Overloaded{
            [](const Permute& p) -> TransformStep {
              Permute inv{std::vector<std::size_t>(p.perm.size())};
              for (std::size_t j = 0; j < p.perm.size(); ++j) {
                if (p.perm[j] >= p.perm.size()) throw detail::badStep("not a permutation");
                inv.perm[p.perm[j]] = j;
              }
              return inv;
            },
            [](const Translate& t) -> TransformStep {
              if (t.offset == std::numeric_limits<Coord>::min()) {
                throw Error(ErrorCode::NotInvertible, "translate offset has no negation");
              }
              return Translate{t.dim, -t.offset};
            },
            [](const InsertDim& s) -> TransformStep { return RemoveDim{s.position}; },
            [&](const RemoveDim&) -> TransformStep { return recorded(k); },
            [&](const Compact&) -> TransformStep { return recorded(k); },
            [](const Remap& r) -> TransformStep { return detail::invertTable(r); },
            [](const Reinsert& s) -> TransformStep { return RemoveDim{s.position}; },
        },
        spec[k]));
  }

  // Every index of the produced support must map back through the inverse.
  for (const Index& index : supportAfter) {
    Index cur = index;
    std::size_t arity = cur.arity();
    for (const auto& step : inverse) {
      arity = arityAfter(step, arity);
      cur = detail::mapIndex(step, cur);
    }
  }
  return inverse;
}

}  // namespace arrac
