#pragma once

// Static arity checking and eager bottom-up evaluation of query expressions
// against a catalog of named arrays.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "arrac/algebra.hpp"
#include "arrac/distribution.hpp"
#include "arrac/qlang/ast.hpp"

namespace arrac::qlang {

inline bool isIdentifier(std::string_view s) {
  if (s.empty()) return false;
  auto start = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!start(s.front())) return false;
  for (char c : s) {
    if (!start(c) && !(c >= '0' && c <= '9')) return false;
  }
  return true;
}

/// The database: named arrays.
class Catalog {
 public:
  /// Adds or replaces a binding. Names must be identifiers other than operator names.
  void bind(const std::string& name, Array a) {
    const auto& ops = operatorNames();
    if (!isIdentifier(name) || std::find(ops.begin(), ops.end(), name) != ops.end()) {
      throw Error(ErrorCode::InvalidValue, "'" + name + "' is not a valid array name");
    }
    arrays_.insert_or_assign(name, std::move(a));
  }

  const Array* find(const std::string& name) const {
    auto it = arrays_.find(name);
    return it == arrays_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, Array>& arrays() const noexcept { return arrays_; }

 private:
  std::map<std::string, Array> arrays_;
};

enum class ResultKind { Array, Placement };

struct NodeType {
  ResultKind kind = ResultKind::Array;
  std::size_t arity = 0;
  std::size_t fragments = 0;  // placements only

  friend bool operator==(const NodeType&, const NodeType&) = default;
};

/// Typecheck result, mirroring the expression tree child by child.
struct TypedExpr {
  NodeType type;
  std::vector<TypedExpr> children;
};

namespace detail {

[[noreturn]] inline void typeFail(ErrorCode code, const std::string& msg, const Expr& at) {
  Error err(code, msg, std::nullopt, at.span.begin);
  err.setSpan(at.span);
  throw err;
}

inline void requireArray(const TypedExpr& t, const Expr& at, const char* op) {
  if (t.type.kind != ResultKind::Array) {
    typeFail(ErrorCode::TypeError, std::string(op) + " expects an array, got a placement", at);
  }
}

inline void requirePlacement(const TypedExpr& t, const Expr& at, const char* op) {
  if (t.type.kind != ResultKind::Placement) {
    typeFail(ErrorCode::TypeError, std::string(op) + " expects a placement, got an array", at);
  }
}

inline void checkPredicateDims(const Predicate& p, std::size_t arity, const Expr& at) {
  if (auto d = maxDim(p); d && *d >= arity) {
    typeFail(ErrorCode::ArityError,
             "predicate refers to dim " + std::to_string(*d) + " of an arity-" +
                 std::to_string(arity) + " input",
             at);
  }
}

}  // namespace detail

/// Computes the result kind and arity of every node.
/// Throws UnboundName, ArityError or TypeError with the offending node's span.
inline TypedExpr typecheck(const Expr& e, const Catalog& cat) {
  using detail::typeFail;
  auto arrayOf = [](std::size_t arity) { return NodeType{ResultKind::Array, arity, 0}; };

  return std::visit(
      arrac::detail::Overloaded{
          [&](const RefExpr& r) -> TypedExpr {
            const Array* a = cat.find(r.name);
            if (a == nullptr) typeFail(ErrorCode::UnboundName, "no array named '" + r.name + "'", e);
            return {arrayOf(a->arity()), {}};
          },
          [&](const ProjectExpr& p) -> TypedExpr {
            TypedExpr in = typecheck(*p.input, cat);
            detail::requireArray(in, e, "project");
            std::size_t n = in.type.arity;
            if (const auto* set = std::get_if<IndexSet>(&p.keep)) {
              for (const Index& i : *set) {
                if (i.arity() != n) {
                  typeFail(ErrorCode::ArityError,
                           "index set member has " + std::to_string(i.arity()) +
                               " coordinates, input arity is " + std::to_string(n),
                           e);
                }
              }
            } else {
              const auto& cond = std::get<Predicate>(p.keep);
              if (valueReferences(cond).any()) {
                typeFail(ErrorCode::TypeError, "project conditions may only use coordinates", e);
              }
              detail::checkPredicateDims(cond, n, e);
            }
            return {arrayOf(n), {std::move(in)}};
          },
          [&](const SelectExpr& s) -> TypedExpr {
            TypedExpr in = typecheck(*s.input, cat);
            detail::checkPredicateDims(s.condition, in.type.arity, e);
            NodeType t = in.type;
            return {t, {std::move(in)}};
          },
          [&](const CrossExpr& c) -> TypedExpr {
            TypedExpr l = typecheck(*c.left, cat);
            TypedExpr r = typecheck(*c.right, cat);
            detail::requireArray(l, e, "cross");
            detail::requireArray(r, e, "cross");
            std::size_t n = l.type.arity + r.type.arity;
            return {arrayOf(n), {std::move(l), std::move(r)}};
          },
          [&](const TransformExpr& t) -> TypedExpr {
            TypedExpr in = typecheck(*t.input, cat);
            detail::requireArray(in, e, "transform");
            std::size_t n = 0;
            try {
              n = arityAfter(t.spec, in.type.arity);
            } catch (const Error& err) {
              typeFail(ErrorCode::ArityError, err.detail(), e);
            }
            return {arrayOf(n), {std::move(in)}};
          },
          [&](const UnionExpr& u) -> TypedExpr {
            TypedExpr l = typecheck(*u.left, cat);
            TypedExpr r = typecheck(*u.right, cat);
            detail::requireArray(l, e, "union");
            detail::requireArray(r, e, "union");
            if (l.type.arity != r.type.arity) {
              typeFail(ErrorCode::ArityError,
                       "union of arity " + std::to_string(l.type.arity) + " and arity " +
                           std::to_string(r.type.arity),
                       e);
            }
            std::size_t n = l.type.arity;
            return {arrayOf(n), {std::move(l), std::move(r)}};
          },
          [&](const JoinExpr& j) -> TypedExpr {
            TypedExpr l = typecheck(*j.left, cat);
            TypedExpr r = typecheck(*j.right, cat);
            detail::requireArray(l, e, "join");
            detail::requireArray(r, e, "join");
            for (const auto& [da, db] : j.on) {
              if (da >= l.type.arity || db >= r.type.arity) {
                typeFail(ErrorCode::ArityError,
                         "join pair " + std::to_string(da) + ":" + std::to_string(db) +
                             " does not fit arities " + std::to_string(l.type.arity) + " and " +
                             std::to_string(r.type.arity),
                         e);
              }
            }
            std::size_t n = j.kind == JoinKind::Equi ? l.type.arity + r.type.arity : l.type.arity;
            return {arrayOf(n), {std::move(l), std::move(r)}};
          },
          [&](const VPartitionExpr& v) -> TypedExpr {
            TypedExpr in = typecheck(*v.input, cat);
            detail::requireArray(in, e, "vpartition");
            for (const auto& p : v.predicates) detail::checkPredicateDims(p, in.type.arity, e);
            NodeType t{ResultKind::Placement, in.type.arity, v.predicates.size()};
            return {t, {std::move(in)}};
          },
          [&](const HPartitionExpr& h) -> TypedExpr {
            TypedExpr in = typecheck(*h.input, cat);
            detail::requireArray(in, e, "hpartition");
            std::set<std::size_t> seen;
            for (const auto& slice : h.slices) {
              for (std::size_t pos : slice) {
                if (!seen.insert(pos).second) {
                  typeFail(ErrorCode::ArityError,
                           "tuple position " + std::to_string(pos) + " is in two slices", e);
                }
              }
            }
            NodeType t{ResultKind::Placement, in.type.arity, h.slices.size()};
            return {t, {std::move(in)}};
          },
          [&](const ReassembleExpr& r) -> TypedExpr {
            TypedExpr in = typecheck(*r.placement, cat);
            detail::requirePlacement(in, e, "reassemble");
            std::size_t n = in.type.arity;
            return {arrayOf(n), {std::move(in)}};
          },
          [&](const FragmentExpr& f) -> TypedExpr {
            TypedExpr in = typecheck(*f.placement, cat);
            detail::requirePlacement(in, e, "fragment");
            if (f.id >= in.type.fragments) {
              typeFail(ErrorCode::ArityError,
                       "fragment " + std::to_string(f.id) + " of a " +
                           std::to_string(in.type.fragments) + "-fragment placement",
                       e);
            }
            std::size_t n = in.type.arity;
            return {arrayOf(n), {std::move(in)}};
          },
      },
      e.node);
}

using EvalResult = std::variant<Array, Placement>;

namespace detail {

template <typename Fn>
auto withSpan(const Expr& e, Fn&& fn) {
  try {
    return fn();
  } catch (Error& err) {
    if (!err.span()) err.setSpan(e.span);
    throw;
  }
}

inline const Array& asArray(const EvalResult& r) {
  if (const auto* a = std::get_if<Array>(&r)) return *a;
  throw Error(ErrorCode::TypeError, "expected an array operand, got a placement");
}

inline const Placement& asPlacement(const EvalResult& r) {
  if (const auto* p = std::get_if<Placement>(&r)) return *p;
  throw Error(ErrorCode::TypeError, "expected a placement operand, got an array");
}

}  // namespace detail

/// Evaluates to an array or a placement. Runtime errors from the operators
/// propagate with the span of the innermost failing node attached.
inline EvalResult evaluateAny(const Expr& e, const Catalog& cat) {
  using detail::asArray;
  using detail::asPlacement;
  return std::visit(
      arrac::detail::Overloaded{
          [&](const RefExpr& r) -> EvalResult {
            const Array* a = cat.find(r.name);
            if (a == nullptr) detail::typeFail(ErrorCode::UnboundName, "no array named '" + r.name + "'", e);
            return *a;
          },
          [&](const ProjectExpr& p) -> EvalResult {
            EvalResult in = evaluateAny(*p.input, cat);
            return detail::withSpan(e, [&] {
              return std::visit([&](const auto& keep) { return project(asArray(in), keep); }, p.keep);
            });
          },
          [&](const SelectExpr& s) -> EvalResult {
            EvalResult in = evaluateAny(*s.input, cat);
            return detail::withSpan(e, [&]() -> EvalResult {
              if (std::holds_alternative<Placement>(in)) return pushSelect(asPlacement(in), s.condition);
              return select(asArray(in), s.condition);
            });
          },
          [&](const CrossExpr& c) -> EvalResult {
            EvalResult l = evaluateAny(*c.left, cat);
            EvalResult r = evaluateAny(*c.right, cat);
            return detail::withSpan(e, [&] { return cross(asArray(l), asArray(r)); });
          },
          [&](const TransformExpr& t) -> EvalResult {
            EvalResult in = evaluateAny(*t.input, cat);
            return detail::withSpan(e, [&] { return transform(asArray(in), t.spec); });
          },
          [&](const UnionExpr& u) -> EvalResult {
            EvalResult l = evaluateAny(*u.left, cat);
            EvalResult r = evaluateAny(*u.right, cat);
            return detail::withSpan(e, [&] { return unite(asArray(l), asArray(r)); });
          },
          [&](const JoinExpr& j) -> EvalResult {
            EvalResult l = evaluateAny(*j.left, cat);
            EvalResult r = evaluateAny(*j.right, cat);
            return detail::withSpan(e, [&] {
              switch (j.kind) {
                case JoinKind::Equi: return equiJoin(asArray(l), asArray(r), j.on);
                case JoinKind::Semi: return semiJoin(asArray(l), asArray(r), j.on);
                case JoinKind::Anti: break;
              }
              return antiJoin(asArray(l), asArray(r), j.on);
            });
          },
          [&](const VPartitionExpr& v) -> EvalResult {
            EvalResult in = evaluateAny(*v.input, cat);
            return detail::withSpan(e, [&] { return partitionVertical(asArray(in), v.predicates); });
          },
          [&](const HPartitionExpr& h) -> EvalResult {
            EvalResult in = evaluateAny(*h.input, cat);
            return detail::withSpan(e, [&] { return partitionHorizontal(asArray(in), h.slices); });
          },
          [&](const ReassembleExpr& r) -> EvalResult {
            EvalResult in = evaluateAny(*r.placement, cat);
            return detail::withSpan(e, [&] { return reassemble(asPlacement(in)); });
          },
          [&](const FragmentExpr& f) -> EvalResult {
            EvalResult in = evaluateAny(*f.placement, cat);
            return detail::withSpan(e, [&]() -> Array {
              for (const auto& frag : asPlacement(in).fragments) {
                if (frag.id == f.id) return frag.data;
              }
              throw Error(ErrorCode::FragmentMismatch, "no fragment " + std::to_string(f.id));
            });
          },
      },
      e.node);
}

/// Evaluates an expression whose result is an array. Run typecheck first
/// for static diagnostics; kind mismatches found here raise TypeError.
inline Array evaluate(const Expr& e, const Catalog& cat) {
  EvalResult r = evaluateAny(e, cat);
  if (auto* a = std::get_if<Array>(&r)) return std::move(*a);
  detail::typeFail(ErrorCode::TypeError,
                   "expression yields a placement; wrap it in reassemble() or fragment()", e);
}

}  // namespace arrac::qlang
