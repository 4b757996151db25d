#pragma once

// Expression trees for the query language. One node per algebra operator,
// plus the partition forms, which evaluate to placements rather than arrays.

#include <algorithm>
#include <string>
#include <variant>
#include <vector>

#include "arrac/algebra.hpp"
#include "arrac/box.hpp"
#include "arrac/core.hpp"
#include "arrac/predicate.hpp"
#include "arrac/transform.hpp"

namespace arrac::qlang {

struct Expr;
using ExprBox = Box<Expr>;

struct RefExpr {
  std::string name;
  friend bool operator==(const RefExpr&, const RefExpr&) = default;
};

/// project(E, {(..), ...}) or project(E, <coordinate predicate>)
struct ProjectExpr {
  ExprBox input;
  std::variant<IndexSet, Predicate> keep;
  friend bool operator==(const ProjectExpr&, const ProjectExpr&) = default;
};

/// On a placement input this is a pushed-down selection.
struct SelectExpr {
  ExprBox input;
  Predicate condition;
  friend bool operator==(const SelectExpr&, const SelectExpr&) = default;
};

struct CrossExpr {
  ExprBox left;
  ExprBox right;
  friend bool operator==(const CrossExpr&, const CrossExpr&) = default;
};

struct TransformExpr {
  ExprBox input;
  TransformSpec spec;
  friend bool operator==(const TransformExpr&, const TransformExpr&) = default;
};

struct UnionExpr {
  ExprBox left;
  ExprBox right;
  friend bool operator==(const UnionExpr&, const UnionExpr&) = default;
};

enum class JoinKind { Equi, Semi, Anti };

struct JoinExpr {
  JoinKind kind;
  ExprBox left;
  ExprBox right;
  JoinOn on;
  friend bool operator==(const JoinExpr&, const JoinExpr&) = default;
};

struct VPartitionExpr {
  ExprBox input;
  std::vector<Predicate> predicates;
  friend bool operator==(const VPartitionExpr&, const VPartitionExpr&) = default;
};

struct HPartitionExpr {
  ExprBox input;
  std::vector<std::vector<std::size_t>> slices;
  friend bool operator==(const HPartitionExpr&, const HPartitionExpr&) = default;
};

struct ReassembleExpr {
  ExprBox placement;
  friend bool operator==(const ReassembleExpr&, const ReassembleExpr&) = default;
};

/// fragment(P, k): the k-th fragment of a placement.
struct FragmentExpr {
  ExprBox placement;
  std::size_t id;
  friend bool operator==(const FragmentExpr&, const FragmentExpr&) = default;
};

struct Expr {
  using Node = std::variant<RefExpr, ProjectExpr, SelectExpr, CrossExpr, TransformExpr, UnionExpr,
                            JoinExpr, VPartitionExpr, HPartitionExpr, ReassembleExpr, FragmentExpr>;
  Node node;
  SourceSpan span{};  // not part of equality

  friend bool operator==(const Expr& a, const Expr& b) { return a.node == b.node; }
};

inline const std::vector<std::string>& operatorNames() {
  static const std::vector<std::string> names{
      "project",  "select",   "cross",      "transform",  "union",      "equijoin",
      "semijoin", "antijoin", "vpartition", "hpartition", "reassemble", "fragment"};
  return names;
}

inline Expr ref(std::string name) { return Expr{RefExpr{std::move(name)}}; }

}  // namespace arrac::qlang
