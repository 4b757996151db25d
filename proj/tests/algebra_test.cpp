#include <gtest/gtest.h>

#include "arrac/algebra.hpp"
#include "arrac/transform.hpp"
#include "support/oracle.hpp"

using namespace arrac;

namespace {

Value s(const char* x) { return Value::string(x); }

Array matrixM() {
  return makeArray(2, {{Index{0, 0}, s("a")}, {Index{0, 1}, s("b")}, {Index{1, 0}, s("c")},
                       {Index{1, 1}, s("d")}});
}

Array vec(std::vector<std::pair<Coord, Value>> cells) {
  std::vector<Array::Entry> e;
  for (auto& [c, v] : cells) e.emplace_back(Index{c}, v);
  return makeArray(1, e);
}

ErrorCode codeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::IoError;
}

}  // namespace

// ---- project

TEST(Project, FollowsDefinitionOnExampleMatrix) {
  Array got = project(matrixM(), IndexSet{Index{0, 0}, Index{1, 0}});
  EXPECT_EQ(got, makeArray(2, {{Index{0, 0}, s("a")}, {Index{1, 0}, s("c")}}));
}

TEST(Project, FullSupportIsIdentityAndEmptyKeepsArity) {
  Array m = matrixM();
  EXPECT_EQ(project(m, support(m)), m);
  Array none = project(m, IndexSet{});
  EXPECT_TRUE(none.empty());
  EXPECT_EQ(none.arity(), 2u);
}

TEST(Project, IndicesOutsideSupportAreIgnored) {
  EXPECT_EQ(project(matrixM(), IndexSet{Index{9, 9}, Index{0, 1}}),
            makeArray(2, {{Index{0, 1}, s("b")}}));
}

TEST(Project, WrongArityIndex) {
  EXPECT_EQ(codeOf([] { project(matrixM(), IndexSet{Index{0}}); }), ErrorCode::ArityMismatch);
}

TEST(Project, CoordinatePredicateForm) {
  Array got = project(matrixM(), coordConst(CmpOp::Eq, 1, 0));
  EXPECT_EQ(got, project(matrixM(), IndexSet{Index{0, 0}, Index{1, 0}}));
  EXPECT_EQ(codeOf([] { project(matrixM(), valueCmp(CmpOp::Eq, s("a"))); }),
            ErrorCode::BadPredicate);
}

// ---- select

TEST(Select, ValueEqualsB) {
  EXPECT_EQ(select(matrixM(), valueCmp(CmpOp::Eq, s("b"))), makeArray(2, {{Index{0, 1}, s("b")}}));
}

TEST(Select, NoMatchGivesEmptySameArity) {
  Array got = select(matrixM(), valueCmp(CmpOp::Eq, s("zzz")));
  EXPECT_TRUE(got.empty());
  EXPECT_EQ(got.arity(), 2u);
}

TEST(Select, Disjunction) {
  Array got = select(matrixM(), disj({valueCmp(CmpOp::Eq, s("a")), valueCmp(CmpOp::Eq, s("d"))}));
  EXPECT_EQ(got, makeArray(2, {{Index{0, 0}, s("a")}, {Index{1, 1}, s("d")}}));
}

TEST(Select, DimOutOfRange) {
  EXPECT_EQ(codeOf([] { select(matrixM(), coordConst(CmpOp::Eq, 2, 0)); }),
            ErrorCode::PredicateArity);
  EXPECT_EQ(codeOf([] { select(matrixM(), coordCmp(CmpOp::Eq, 0, 5)); }),
            ErrorCode::PredicateArity);
}

TEST(Select, CrossTagOrderingIsFalse) {
  Array a = vec({{0, Value::integer(1)}, {1, s("x")}, {2, Value::real(2.5)}, {3, Value::undef()}});
  EXPECT_EQ(select(a, valueCmp(CmpOp::Lt, Value::integer(5))).size(), 1u);
  EXPECT_EQ(select(a, valueCmp(CmpOp::Ge, s("a"))).size(), 1u);
  EXPECT_EQ(select(a, valueCmp(CmpOp::Ne, Value::integer(1))).size(), 3u);
  EXPECT_EQ(select(a, valueCmp(CmpOp::Eq, Value::undef())).size(), 1u);
}

TEST(Select, MatchesReferenceOnRandomPredicates) {
  oracle::Rng r(21);
  for (int t = 0; t < 400; ++t) {
    std::size_t n = 1 + r.below(4);
    Array a = oracle::randomArray(r, n, 30, 1);
    Predicate p = oracle::randomPredicate(r, n, 3);
    EXPECT_TRUE(oracle::same(select(a, p), oracle::selectRef(a, p)));
  }
}

// ---- cross

TEST(Cross, PairsValuesAsTuples) {
  Array a = vec({{0, s("a")}});
  Array b = vec({{5, s("x")}, {6, s("y")}});
  EXPECT_EQ(cross(a, b), makeArray(2, {{Index{0, 5}, Value::tuple({s("a"), s("x")})},
                                       {Index{0, 6}, Value::tuple({s("a"), s("y")})}}));
}

TEST(Cross, EmptyIsAbsorbing) {
  Array got = cross(matrixM(), Array(1));
  EXPECT_TRUE(got.empty());
  EXPECT_EQ(got.arity(), 3u);
}

TEST(Cross, SelfCrossOfExample) {
  Array got = cross(matrixM(), matrixM());
  EXPECT_EQ(got.size(), 16u);
  EXPECT_EQ(got.arity(), 4u);
}

TEST(Cross, NestedCrossesNestPairs) {
  Array a = vec({{0, s("a")}});
  Array got = cross(cross(a, a), a);
  auto v = lookup(got, Index{0, 0, 0});
  ASSERT_TRUE(v);
  EXPECT_EQ(*v, Value::tuple({Value::tuple({s("a"), s("a")}), s("a")}));
}

TEST(Cross, RecoverOperandFromSingletonCross) {
  oracle::Rng r(22);
  for (int t = 0; t < 100; ++t) {
    std::size_t n = 1 + r.below(3);
    Array a = oracle::randomArray(r, n, 20, 1);
    Array single = vec({{4, s("k")}});
    Array c = cross(a, single);
    // Drop the singleton's dimension, then unwrap the pair values.
    Array reduced = transform(c, {RemoveDim{n}});
    std::vector<Array::Entry> back;
    for (const auto& [i, v] : reduced) back.emplace_back(i, v.asTuple()[0]);
    EXPECT_EQ(makeArray(n, back), a);
  }
}

// ---- union

TEST(Union, DisjointSupports) {
  EXPECT_EQ(unite(vec({{0, s("a")}}), vec({{1, s("b")}})), vec({{0, s("a")}, {1, s("b")}}));
}

TEST(Union, Idempotent) { EXPECT_EQ(unite(matrixM(), matrixM()), matrixM()); }

TEST(Union, ConflictNamesWitness) {
  try {
    unite(vec({{0, s("a")}}), vec({{0, s("b")}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConsistencyViolation);
    ASSERT_TRUE(e.witness());
    EXPECT_EQ(*e.witness(), std::vector<Coord>{0});
  }
}

TEST(Union, ArityMismatch) {
  EXPECT_EQ(codeOf([] { unite(Array(1), Array(2)); }), ErrorCode::ArityMismatch);
}

TEST(Union, MatchesReference) {
  oracle::Rng r(23);
  int conflicts = 0;
  for (int t = 0; t < 400; ++t) {
    std::size_t n = 1 + r.below(2);
    Array a = oracle::randomArray(r, n, 8, 0, 2);
    Array b = oracle::randomArray(r, n, 8, 0, 2);
    oracle::Pairs expected;
    std::vector<Index> bad;
    if (oracle::unionRef(a, b, expected, bad)) {
      EXPECT_TRUE(oracle::same(unite(a, b), expected));
    } else {
      ++conflicts;
      try {
        unite(a, b);
        ADD_FAILURE() << "conflict not detected";
      } catch (const Error& e) {
        ASSERT_EQ(e.code(), ErrorCode::ConsistencyViolation);
        ASSERT_TRUE(e.witness());
        EXPECT_NE(std::find(bad.begin(), bad.end(), Index{*e.witness()}), bad.end());
      }
    }
  }
  EXPECT_GT(conflicts, 20);
}

// ---- joins

TEST(EquiJoin, SmallExample) {
  Array a = vec({{0, s("a")}, {1, s("b")}});
  Array b = vec({{1, s("x")}, {2, s("y")}});
  EXPECT_EQ(equiJoin(a, b, {{0, 0}}), makeArray(2, {{Index{1, 1}, Value::tuple({s("b"), s("x")})}}));
}

TEST(EquiJoin, EmptyRight) {
  Array got = equiJoin(matrixM(), Array(2), {{0, 0}});
  EXPECT_TRUE(got.empty());
  EXPECT_EQ(got.arity(), 4u);
}

TEST(EquiJoin, SelfJoinOnAllDims) {
  Array got = equiJoin(matrixM(), matrixM(), {{0, 0}, {1, 1}});
  EXPECT_EQ(got.size(), 4u);
  for (const auto& [i, v] : got) {
    EXPECT_EQ(i[0], i[2]);
    EXPECT_EQ(i[1], i[3]);
    EXPECT_EQ(v.asTuple()[0], v.asTuple()[1]);
  }
}

TEST(EquiJoin, IsSelectOverCross) {
  oracle::Rng r(24);
  for (int t = 0; t < 200; ++t) {
    std::size_t na = 1 + r.below(2), nb = 1 + r.below(2);
    Array a = oracle::randomArray(r, na, 10, 0, 3);
    Array b = oracle::randomArray(r, nb, 10, 0, 3);
    JoinOn on{{r.below(na), r.below(nb)}};
    EXPECT_EQ(equiJoin(a, b, on), select(cross(a, b), joinCondition(na, on)));
  }
}

TEST(EquiJoin, BadDims) {
  EXPECT_EQ(codeOf([] { equiJoin(matrixM(), matrixM(), {{2, 0}}); }), ErrorCode::PredicateArity);
}

TEST(SemiJoin, Examples) {
  Array a = vec({{0, s("a")}, {1, s("b")}});
  Array b = vec({{1, s("x")}});
  EXPECT_EQ(semiJoin(a, b, {{0, 0}}), vec({{1, s("b")}}));
  EXPECT_EQ(semiJoin(matrixM(), matrixM(), onAllDims(2)), matrixM());
  EXPECT_TRUE(semiJoin(matrixM(), Array(2), {{0, 0}}).empty());
}

TEST(AntiJoin, Examples) {
  Array a = vec({{0, s("a")}, {1, s("b")}});
  Array b = vec({{1, s("x")}});
  EXPECT_EQ(antiJoin(a, b, {{0, 0}}), vec({{0, s("a")}}));
  EXPECT_EQ(antiJoin(matrixM(), Array(2), {{0, 0}}), matrixM());
  EXPECT_TRUE(antiJoin(matrixM(), matrixM(), onAllDims(2)).empty());
}

TEST(Joins, MatchNestedLoopOracle) {
  oracle::Rng r(25);
  for (int t = 0; t < 300; ++t) {
    std::size_t na = 1 + r.below(3), nb = 1 + r.below(3);
    Array a = oracle::randomArray(r, na, 20, 1, 3);
    Array b = oracle::randomArray(r, nb, 20, 1, 3);
    JoinOn on;
    for (std::size_t k = r.below(3); k > 0; --k) on.emplace_back(r.below(na), r.below(nb));
    EXPECT_TRUE(oracle::same(equiJoin(a, b, on), oracle::equiJoinRef(a, b, on)));
    Array semi = semiJoin(a, b, on);
    Array anti = antiJoin(a, b, on);
    EXPECT_TRUE(oracle::same(semi, oracle::semiJoinRef(a, b, on)));
    EXPECT_TRUE(oracle::same(anti, oracle::antiJoinRef(a, b, on)));
    EXPECT_EQ(unite(semi, anti), a);
    EXPECT_EQ(semi.size() + anti.size(), a.size());
  }
}

TEST(AntiJoin, LiteralFormIsNegatedJoinCondition) {
  Array a = vec({{0, s("a")}, {1, s("b")}});
  Array b = vec({{1, s("x")}});
  Array literal = select(cross(a, b), negate(joinCondition(1, {{0, 0}})));
  EXPECT_EQ(literal, makeArray(2, {{Index{0, 1}, Value::tuple({s("a"), s("x")})}}));
}

// ---- algebraic laws

TEST(Laws, ProjectIntersection) {
  oracle::Rng r(26);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 1 + r.below(2);
    Array a = oracle::randomArray(r, n, 20, 0, 3);
    auto randomSet = [&] {
      IndexSet s;
      for (std::size_t k = r.below(10); k > 0; --k) {
        Index i;
        for (std::size_t d = 0; d < n; ++d) i.coords.push_back(r.range(-1, 3));
        s.insert(i);
      }
      return s;
    };
    IndexSet j = randomSet(), k = randomSet(), both;
    std::set_intersection(j.begin(), j.end(), k.begin(), k.end(), std::inserter(both, both.end()));
    EXPECT_EQ(project(project(a, j), k), project(a, both));
    EXPECT_EQ(project(project(a, j), j), project(a, j));
  }
}

TEST(Laws, SelectConjunctionAndCommutation) {
  oracle::Rng r(27);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 1 + r.below(3);
    Array a = oracle::randomArray(r, n, 25, 1);
    Predicate c1 = oracle::randomPredicate(r, n);
    Predicate c2 = oracle::randomPredicate(r, n);
    EXPECT_EQ(select(a, conj({c1, c2})), select(select(a, c1), c2));
    EXPECT_EQ(select(select(a, c1), c2), select(select(a, c2), c1));
  }
}

TEST(Laws, UnionCommutativeAssociative) {
  oracle::Rng r(28);
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    Array base = oracle::randomArray(r, 2, 30, 1);
    auto part = [&] { return select(base, oracle::randomPredicate(r, 2, 1, true)); };
    Array a = part(), b = part(), c = part();
    EXPECT_EQ(unite(a, b), unite(b, a));
    EXPECT_EQ(unite(unite(a, b), c), unite(a, unite(b, c)));
    EXPECT_EQ(unite(a, a), a);
    ++checked;
  }
  EXPECT_EQ(checked, 300);
}
