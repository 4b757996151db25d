#include <gtest/gtest.h>

#include "arrac/qlang/eval.hpp"
#include "arrac/qlang/parser.hpp"
#include "arrac/qlang/printer.hpp"
#include "support/corpus.hpp"
#include "support/exprgen.hpp"

using namespace arrac;
using namespace arrac::qlang;

namespace {

Value s(const char* x) { return Value::string(x); }

Array matrixM() {
  return makeArray(2, {{Index{0, 0}, s("a")}, {Index{0, 1}, s("b")}, {Index{1, 0}, s("c")},
                       {Index{1, 1}, s("d")}});
}

Catalog smallCatalog() {
  Catalog c;
  c.bind("M", matrixM());
  c.bind("A", makeArray(1, {{Index{0}, s("a")}, {Index{1}, s("b")}}));
  c.bind("B", makeArray(1, {{Index{1}, s("x")}, {Index{2}, s("y")}}));
  return c;
}

Error errorOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error raised";
  return Error(ErrorCode::IoError, "none");
}

}  // namespace

TEST(Parse, SelectMatchesHandBuiltTree) {
  Expr want{SelectExpr{ref("M"), valueCmp(CmpOp::Eq, s("b"))}};
  EXPECT_EQ(parse("select(M, val = \"b\")"), want);
}

TEST(Parse, BareReference) { EXPECT_EQ(parse("M"), ref("M")); }

TEST(Parse, TruncatedInputReportsEndOfInput) {
  Error e = errorOf([] { parse("cross(M,"); });
  EXPECT_EQ(e.code(), ErrorCode::ParseError);
  ASSERT_TRUE(e.location());
  EXPECT_EQ(e.location()->line, 1u);
  EXPECT_EQ(e.location()->column, 9u);
  EXPECT_NE(std::string(e.what()).find("end of input"), std::string::npos);
  EXPECT_FALSE(e.expected().empty());
}

TEST(Parse, ErrorPositionsOnLaterLines) {
  Error e = errorOf([] { parse("select(M,\n  val ~ 1)"); });
  EXPECT_EQ(e.code(), ErrorCode::ParseError);
  ASSERT_TRUE(e.location());
  EXPECT_EQ(e.location()->line, 2u);
}

TEST(Parse, Rejections) {
  for (const char* bad : {"", "select(M)", "select(M, val = )", "project(M, {(0,)})",
                          "transform(M, [spin(1)])", "equijoin(A, B, on(0))", "nosuchop(M)",
                          "M extra", "select(M, dim = 0)", "cross(A B)", "\"str\"",
                          "hpartition(T, {})", "select(M, val = \"unterminated)"}) {
    EXPECT_EQ(errorOf([&] { parse(bad); }).code(), ErrorCode::ParseError) << bad;
  }
}

TEST(Parse, PrecedenceOrLooserThanAnd) {
  Predicate p = parsePredicate("dim0 = 0 or dim0 = 1 and val = 2");
  ASSERT_TRUE(std::holds_alternative<OrPred>(p.node));
  EXPECT_EQ(std::get<OrPred>(p.node).terms.size(), 2u);
}

TEST(Print, Basics) {
  EXPECT_EQ(print(ref("M")), "M");
  EXPECT_EQ(print(parse("select(  M ,val=\"b\")")), "select(M, val = \"b\")");
  EXPECT_EQ(print(parse("project(M,{(1,0),(0,0)})")), "project(M, {(0,0), (1,0)})");
  EXPECT_EQ(print(parse("select(M, val = 2.0)")), "select(M, val = 2.0)");
  EXPECT_EQ(print(parse("select(cross(A,B), dim0 = dim1 and not val = 1)")),
            "select(cross(A, B), (dim0 = dim1 and not val = 1))");
}

TEST(Print, CorpusIsAFixpoint) {
  const auto& corpus = oracle::queryCorpus();
  EXPECT_GE(corpus.size(), 50u);
  for (const auto& text : corpus) {
    Expr e = parse(text);
    std::string once = print(e);
    EXPECT_EQ(parse(once), e) << text;
    EXPECT_EQ(print(parse(once)), once);
  }
}

TEST(Print, RandomTreesRoundTrip) {
  oracle::Rng r(71);
  oracle::ExprGen gen(r);
  for (int t = 0; t < 1000; ++t) {
    Expr e = gen.any(1 + static_cast<int>(r.below(6)));
    std::string text = print(e);
    Expr back = parse(text);
    EXPECT_EQ(back, e) << text;
  }
}

TEST(Typecheck, Arities) {
  Catalog c = smallCatalog();
  EXPECT_EQ(typecheck(parse("cross(M, A)"), c).type.arity, 3u);
  EXPECT_EQ(typecheck(parse("transform(M, [insert(0,1), insert(0,1), remove(3)])"), c).type.arity, 3u);
  EXPECT_EQ(typecheck(parse("semijoin(M, A, on(0:0))"), c).type.arity, 2u);
  EXPECT_EQ(typecheck(parse("vpartition(M, true)"), c).type.kind, ResultKind::Placement);
}

TEST(Typecheck, Errors) {
  Catalog c = smallCatalog();
  EXPECT_EQ(errorOf([&] { typecheck(parse("union(A, M)"), c); }).code(), ErrorCode::ArityError);
  EXPECT_EQ(errorOf([&] { typecheck(parse("union(A, Q)"), c); }).code(), ErrorCode::UnboundName);
  EXPECT_EQ(errorOf([&] { typecheck(parse("select(A, dim1 = 0)"), c); }).code(), ErrorCode::ArityError);
  EXPECT_EQ(errorOf([&] { typecheck(parse("equijoin(A, M, on(0:2))"), c); }).code(),
            ErrorCode::ArityError);
  EXPECT_EQ(errorOf([&] { typecheck(parse("transform(A, [remove(0)])"), c); }).code(),
            ErrorCode::ArityError);
  EXPECT_EQ(errorOf([&] { typecheck(parse("reassemble(A)"), c); }).code(), ErrorCode::TypeError);
  EXPECT_EQ(errorOf([&] { typecheck(parse("cross(vpartition(A, true), A)"), c); }).code(),
            ErrorCode::TypeError);
  Error e = errorOf([&] { typecheck(parse("cross(A, union(A, M))"), c); });
  ASSERT_TRUE(e.span());
  EXPECT_EQ(e.span()->begin.column, 10u);
}

TEST(Evaluate, MatchesHandComposition) {
  Catalog c = smallCatalog();
  EXPECT_EQ(evaluate(parse("M"), c), matrixM());
  EXPECT_EQ(evaluate(parse("select(M, val = \"b\")"), c), makeArray(2, {{Index{0, 1}, s("b")}}));
  Array a = *c.find("A"), b = *c.find("B");
  EXPECT_EQ(evaluate(parse("select(cross(A,B), dim0 = dim1)"), c), equiJoin(a, b, {{0, 0}}));
  EXPECT_EQ(evaluate(parse("reassemble(vpartition(M, dim0 = 0, dim0 = 1))"), c), matrixM());
}

TEST(Evaluate, SemiJoinViaProjectedCross) {
  // pi_I(sigma_p(A x B)) followed by dropping B's dimension.
  Catalog c = smallCatalog();
  Array viaCross = evaluate(parse("transform(project(select(cross(A, B), dim0 = dim1), "
                                  "{(1,1)}), [remove(1)])"),
                            c);
  std::vector<Array::Entry> unwrapped;
  for (const auto& [i, v] : viaCross) unwrapped.emplace_back(i, v.asTuple()[0]);
  EXPECT_EQ(makeArray(1, unwrapped), evaluate(parse("semijoin(A, B, on(0:0))"), c));
}

TEST(Evaluate, RuntimeErrorCarriesSpan) {
  Catalog c;
  c.bind("X", makeArray(1, {{Index{0}, s("a")}}));
  c.bind("Y", makeArray(1, {{Index{0}, s("b")}}));
  Error e = errorOf([&] { evaluate(parse("cross(X, union(X, Y))"), c); });
  EXPECT_EQ(e.code(), ErrorCode::ConsistencyViolation);
  ASSERT_TRUE(e.span());
  EXPECT_EQ(e.span()->begin.column, 10u);
  EXPECT_EQ(e.span()->end.column, 21u);
}

TEST(Evaluate, PlacementAtRootIsTypeError) {
  Catalog c = smallCatalog();
  EXPECT_EQ(errorOf([&] { evaluate(parse("vpartition(M, true)"), c); }).code(), ErrorCode::TypeError);
}

TEST(Catalog, NamesMustBeIdentifiers) {
  Catalog c;
  EXPECT_EQ(errorOf([&] { c.bind("", Array(1)); }).code(), ErrorCode::InvalidValue);
  EXPECT_EQ(errorOf([&] { c.bind("1x", Array(1)); }).code(), ErrorCode::InvalidValue);
  EXPECT_EQ(errorOf([&] { c.bind("select", Array(1)); }).code(), ErrorCode::InvalidValue);
  c.bind("ok_1", Array(1));
  EXPECT_NE(c.find("ok_1"), nullptr);
}

TEST(QlangProperties, TypecheckPredictsEvaluation) {
  oracle::Rng r(72);
  oracle::ExprGen gen(r);
  int evaluated = 0;
  for (int t = 0; t < 1500; ++t) {
    Catalog cat = oracle::testCatalog(r);
    Expr e = gen.any(1 + static_cast<int>(r.below(6)));
    std::optional<TypedExpr> typed;
    try {
      typed = typecheck(e, cat);
    } catch (const Error& err) {
      // A statically rejected tree must not evaluate to a result either.
      EXPECT_THROW(evaluateAny(e, cat), Error) << print(e);
      continue;
    }
    try {
      EvalResult first = evaluateAny(e, cat);
      EvalResult second = evaluateAny(e, cat);
      ++evaluated;
      if (const auto* a = std::get_if<Array>(&first)) {
        EXPECT_EQ(typed->type.kind, ResultKind::Array);
        EXPECT_EQ(a->arity(), typed->type.arity) << print(e);
        EXPECT_EQ(*a, std::get<Array>(second));
      } else {
        EXPECT_EQ(typed->type.kind, ResultKind::Placement);
      }
    } catch (const Error& err) {
      EXPECT_NE(err.code(), ErrorCode::ArityError) << print(e);
      EXPECT_NE(err.code(), ErrorCode::TypeError) << print(e);
      EXPECT_NE(err.code(), ErrorCode::UnboundName) << print(e);
    }
  }
  EXPECT_GT(evaluated, 500);
}
