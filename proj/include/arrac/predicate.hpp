#pragma once

// Selection and join conditions over one association (index + value).

#include <cstddef>
#include <optional>
#include <set>
#include <string_view>
#include <variant>
#include <vector>

#include "arrac/box.hpp"
#include "arrac/core.hpp"

namespace arrac {

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

inline std::string_view cmpOpSymbol(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

struct Predicate;

struct TruePred {
  friend bool operator==(const TruePred&, const TruePred&) = default;
};

/// Compares the association's value (or one tuple component of it) with a
/// constant. A missing component or a non-tuple value makes the leaf false.
struct ValueCmp {
  CmpOp op;
  Value constant;
  std::optional<std::size_t> component;

  friend bool operator==(const ValueCmp&, const ValueCmp&) = default;
};

/// Compares two coordinates of the association's index.
struct CoordCmp {
  CmpOp op;
  std::size_t dimA;
  std::size_t dimB;

  friend bool operator==(const CoordCmp&, const CoordCmp&) = default;
};

/// Compares one coordinate of the association's index with a constant.
struct CoordConst {
  CmpOp op;
  std::size_t dim;
  Coord constant;

  friend bool operator==(const CoordConst&, const CoordConst&) = default;
};

struct AndPred {
  std::vector<Predicate> terms;
  friend bool operator==(const AndPred&, const AndPred&) = default;
};

struct OrPred {
  std::vector<Predicate> terms;
  friend bool operator==(const OrPred&, const OrPred&) = default;
};

struct NotPred {
  Box<Predicate> term;
  friend bool operator==(const NotPred&, const NotPred&) = default;
};

struct Predicate {
  using Node = std::variant<TruePred, ValueCmp, CoordCmp, CoordConst, AndPred, OrPred, NotPred>;
  Node node;

  Predicate() : node(TruePred{}) {}
  Predicate(Node n) : node(std::move(n)) {}  // NOLINT(implicit)
  Predicate(TruePred n) : node(n) {}         // NOLINT(implicit)
  Predicate(ValueCmp n) : node(std::move(n)) {}  // NOLINT(implicit)
  Predicate(CoordCmp n) : node(n) {}             // NOLINT(implicit)
  Predicate(CoordConst n) : node(n) {}           // NOLINT(implicit)
  Predicate(AndPred n) : node(std::move(n)) {}   // NOLINT(implicit)
  Predicate(OrPred n) : node(std::move(n)) {}    // NOLINT(implicit)
  Predicate(NotPred n) : node(std::move(n)) {}   // NOLINT(implicit)

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

inline Predicate alwaysTrue() { return TruePred{}; }

inline Predicate valueCmp(CmpOp op, Value constant) {
  return ValueCmp{op, std::move(constant), std::nullopt};
}

inline Predicate componentCmp(CmpOp op, std::size_t component, Value constant) {
  return ValueCmp{op, std::move(constant), component};
}

inline Predicate coordCmp(CmpOp op, std::size_t dimA, std::size_t dimB) {
  return CoordCmp{op, dimA, dimB};
}

inline Predicate coordConst(CmpOp op, std::size_t dim, Coord constant) {
  return CoordConst{op, dim, constant};
}

/// Conjunction; collapses to `true` for no terms and to the term itself for one.
inline Predicate conj(std::vector<Predicate> terms) {
  if (terms.empty()) return alwaysTrue();
  if (terms.size() == 1) return std::move(terms.front());
  return AndPred{std::move(terms)};
}

inline Predicate disj(std::vector<Predicate> terms) {
  if (terms.empty()) return NotPred{alwaysTrue()};
  if (terms.size() == 1) return std::move(terms.front());
  return OrPred{std::move(terms)};
}

inline Predicate negate(Predicate p) { return NotPred{std::move(p)}; }

namespace detail {

template <typename T>
bool applyCmp(CmpOp op, const T& a, const T& b) {
  switch (op) {
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
  }
  return false;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace detail

/// Value comparison used by ValueCmp. Equality is structural; ordered
/// comparisons are defined for two ints, two floats, or two strings and are
/// false for every other pairing.
inline bool compareValues(CmpOp op, const Value& a, const Value& b) {
  if (op == CmpOp::Eq) return a == b;
  if (op == CmpOp::Ne) return a != b;
  if (a.tag() != b.tag()) return false;
  switch (a.tag()) {
    case Value::Tag::Int: return detail::applyCmp(op, a.asInt(), b.asInt());
    case Value::Tag::Float: return detail::applyCmp(op, a.asFloat(), b.asFloat());
    case Value::Tag::Str: return detail::applyCmp(op, a.asStr(), b.asStr());
    default: return false;
  }
}

/// Evaluates `p` on one association. Total: never throws for in-range dims.
inline bool holds(const Predicate& p, const Index& index, const Value& value) {
  return std::visit(
      detail::Overloaded{
          [](const TruePred&) { return true; },
          [&](const ValueCmp& c) {
            if (!c.component) return compareValues(c.op, value, c.constant);
            if (!value.isTuple() || *c.component >= value.asTuple().size()) return false;
            return compareValues(c.op, value.asTuple()[*c.component], c.constant);
          },
          [&](const CoordCmp& c) { return detail::applyCmp(c.op, index[c.dimA], index[c.dimB]); },
          [&](const CoordConst& c) { return detail::applyCmp(c.op, index[c.dim], c.constant); },
          [&](const AndPred& a) {
            return std::all_of(a.terms.begin(), a.terms.end(),
                               [&](const Predicate& t) { return holds(t, index, value); });
          },
          [&](const OrPred& o) {
            return std::any_of(o.terms.begin(), o.terms.end(),
                               [&](const Predicate& t) { return holds(t, index, value); });
          },
          [&](const NotPred& n) { return !holds(*n.term, index, value); },
      },
      p.node);
}

/// Largest coordinate position the predicate mentions, if any.
inline std::optional<std::size_t> maxDim(const Predicate& p) {
  std::optional<std::size_t> best;
  auto bump = [&](std::size_t d) { best = best ? std::max(*best, d) : d; };
  auto walk = [&](const auto& self, const Predicate& q) -> void {
    std::visit(detail::Overloaded{
                   [](const TruePred&) {},
                   [](const ValueCmp&) {},
                   [&](const CoordCmp& c) { bump(std::max(c.dimA, c.dimB)); },
                   [&](const CoordConst& c) { bump(c.dim); },
                   [&](const AndPred& a) { for (const auto& t : a.terms) self(self, t); },
                   [&](const OrPred& o) { for (const auto& t : o.terms) self(self, t); },
                   [&](const NotPred& n) { self(self, *n.term); },
               },
               q.node);
  };
  walk(walk, p);
  return best;
}

/// Throws PredicateArity if `p` names a coordinate outside `arity`.
inline void validatePredicate(const Predicate& p, std::size_t arity) {
  if (auto d = maxDim(p); d && *d >= arity) {
    throw Error(ErrorCode::PredicateArity, "predicate refers to dim " + std::to_string(*d) +
                                               " but the array has arity " + std::to_string(arity));
  }
}

/// Which parts of the value a predicate inspects.
struct ValueReferences {
  bool whole = false;                 // some leaf compares the entire value
  std::set<std::size_t> components;   // tuple positions compared by component leaves

  bool any() const { return whole || !components.empty(); }
};

inline ValueReferences valueReferences(const Predicate& p) {
  ValueReferences refs;
  auto walk = [&](const auto& self, const Predicate& q) -> void {
    std::visit(detail::Overloaded{
                   [](const TruePred&) {},
                   [&](const ValueCmp& c) {
                     if (c.component) {
                       refs.components.insert(*c.component);
                     } else {
                       refs.whole = true;
                     }
                   },
                   [](const CoordCmp&) {},
                   [](const CoordConst&) {},
                   [&](const AndPred& a) { for (const auto& t : a.terms) self(self, t); },
                   [&](const OrPred& o) { for (const auto& t : o.terms) self(self, t); },
                   [&](const NotPred& n) { self(self, *n.term); },
               },
               q.node);
  };
  walk(walk, p);
  return refs;
}

}  // namespace arrac
