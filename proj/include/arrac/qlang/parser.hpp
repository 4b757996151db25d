#pragma once

// Lexer and recursive-descent parser for the query language.
//
//   expr     := IDENT | IDENT "(" args ")"
//   indexset := "{" tuple ("," tuple)* "}" | "{}"
//   tuple    := "(" INT ("," INT)* ")"
//   pred     := andterm ("or" andterm)*
//   andterm  := unary ("and" unary)*
//   unary    := "not" unary | "(" pred ")" | "true" | "false" | atom
//   atom     := ("val" | "val" "[" INT "]" | dimref) CMP (literal | dimref)
//   dimref   := "dim" INT | "dim<digits>"
//   transf   := "[" (step ("," step)*)? "]"
//   onlist   := "on" "(" (INT ":" INT ("," INT ":" INT)*)? ")"
//   literal  := INT | FLOAT | STRING | "undef" | "inf" | "tuple" "(" literal ("," literal)* ")"
//             | array{...} in exchange-format syntax
//
// Operators: project select cross transform union equijoin semijoin antijoin
// vpartition hpartition reassemble fragment.

#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arrac/error.hpp"
#include "arrac/qlang/ast.hpp"
#include "arrac/text_format.hpp"

namespace arrac::qlang {

enum class Tok {
  Ident,
  Int,
  Float,
  String,
  ArrayLit,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Comma,
  Colon,
  Cmp,
  End,
};

struct Token {
  Tok kind;
  std::string text;  // identifier name, raw literal text, or decoded string
  SourceLocation begin;
  SourceLocation end;
  std::int64_t intValue = 0;
  double floatValue = 0;
  CmpOp cmp = CmpOp::Eq;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    while (true) {
      skipSpace();
      Token t = next();
      out.push_back(t);
      if (t.kind == Tok::End) break;
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, SourceLocation at) const {
    throw Error(ErrorCode::ParseError,
                std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + msg, std::nullopt,
                at);
  }

  bool atEnd() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  SourceLocation here() const { return {line_, col_}; }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skipSpace() {
    while (!atEnd()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else if (c == '#') {  // comment to end of line
        while (!atEnd() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  static bool identStart(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool identChar(char c) { return identStart(c) || (c >= '0' && c <= '9'); }
  static bool digit(char c) { return c >= '0' && c <= '9'; }

  Token make(Tok kind, SourceLocation begin, std::string text = {}) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.begin = begin;
    t.end = here();
    return t;
  }

  Token next() {
    SourceLocation begin = here();
    if (atEnd()) return make(Tok::End, begin);
    char c = peek();
    switch (c) {
      case '(': advance(); return make(Tok::LParen, begin, "(");
      case ')': advance(); return make(Tok::RParen, begin, ")");
      case '{': advance(); return make(Tok::LBrace, begin, "{");
      case '}': advance(); return make(Tok::RBrace, begin, "}");
      case '[': advance(); return make(Tok::LBracket, begin, "[");
      case ']': advance(); return make(Tok::RBracket, begin, "]");
      case ',': advance(); return make(Tok::Comma, begin, ",");
      case ':': advance(); return make(Tok::Colon, begin, ":");
      case '=': advance(); return cmp(begin, CmpOp::Eq, "=");
      case '!':
        advance();
        if (peek() != '=') fail("expected '=' after '!'", here());
        advance();
        return cmp(begin, CmpOp::Ne, "!=");
      case '<':
        advance();
        if (peek() == '=') {
          advance();
          return cmp(begin, CmpOp::Le, "<=");
        }
        return cmp(begin, CmpOp::Lt, "<");
      case '>':
        advance();
        if (peek() == '=') {
          advance();
          return cmp(begin, CmpOp::Ge, ">=");
        }
        return cmp(begin, CmpOp::Gt, ">");
      case '"': return string(begin);
      default: break;
    }
    if (digit(c) || (c == '-' && (digit(peek(1)) || src_.substr(pos_ + 1, 3) == "inf"))) {
      return number(begin);
    }
    if (identStart(c)) {
      std::size_t from = pos_;
      while (!atEnd() && identChar(peek())) advance();
      std::string name(src_.substr(from, pos_ - from));
      if (name == "array" && peek() == '{') return arrayLiteral(begin, from);
      if (name == "inf") {
        Token t = make(Tok::Float, begin, name);
        t.floatValue = std::numeric_limits<double>::infinity();
        return t;
      }
      return make(Tok::Ident, begin, std::move(name));
    }
    fail(std::string("unexpected character '") + c + "'", begin);
  }

  Token cmp(SourceLocation begin, CmpOp op, const char* text) {
    Token t = make(Tok::Cmp, begin, text);
    t.cmp = op;
    return t;
  }

  Token number(SourceLocation begin) {
    std::size_t from = pos_;
    if (peek() == '-') advance();
    if (src_.substr(pos_, 3) == "inf") {
      for (int k = 0; k < 3; ++k) advance();
      Token t = make(Tok::Float, begin, std::string(src_.substr(from, pos_ - from)));
      t.floatValue = -std::numeric_limits<double>::infinity();
      return t;
    }
    bool isFloat = false;
    while (digit(peek())) advance();
    if (peek() == '.' && digit(peek(1))) {
      isFloat = true;
      advance();
      while (digit(peek())) advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = pos_;
      SourceLocation saveLoc = here();
      advance();
      if (peek() == '+' || peek() == '-') advance();
      if (digit(peek())) {
        isFloat = true;
        while (digit(peek())) advance();
      } else {
        pos_ = save;
        line_ = saveLoc.line;
        col_ = saveLoc.column;
      }
    }
    std::string text(src_.substr(from, pos_ - from));
    Token t = make(isFloat ? Tok::Float : Tok::Int, begin, text);
    const char* b = text.data();
    const char* e = text.data() + text.size();
    if (isFloat) {
      auto res = std::from_chars(b, e, t.floatValue);
      if (res.ec != std::errc() || res.ptr != e) fail("malformed float '" + text + "'", begin);
    } else {
      auto res = std::from_chars(b, e, t.intValue);
      if (res.ec != std::errc() || res.ptr != e) fail("integer out of range '" + text + "'", begin);
    }
    return t;
  }

  Token string(SourceLocation begin) {
    std::size_t from = pos_;
    advance();  // opening quote
    while (true) {
      if (atEnd()) fail("unterminated string", begin);
      char c = advance();
      if (c == '\\') {
        if (atEnd()) fail("unterminated string", begin);
        advance();
      } else if (c == '"') {
        break;
      }
    }
    std::string_view raw = src_.substr(from, pos_ - from);
    arrac::detail::TextCursor cur(raw, begin.line);
    std::string decoded;
    try {
      decoded = cur.quoted();
    } catch (const Error& e) {
      fail("bad string literal: " + e.detail(), begin);
    }
    return make(Tok::String, begin, std::move(decoded));
  }

  Token arrayLiteral(SourceLocation begin, std::size_t from) {
    int depth = 0;
    bool inString = false;
    while (true) {
      if (atEnd()) fail("unterminated array literal", begin);
      char c = advance();
      if (inString) {
        if (c == '\\' && !atEnd()) {
          advance();
        } else if (c == '"') {
          inString = false;
        }
        continue;
      }
      if (c == '"') {
        inString = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) break;
      }
    }
    return make(Tok::ArrayLit, begin, std::string(src_.substr(from, pos_ - from)));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(Lexer(src).tokenize()) {}

  Expr parseQuery() {
    Expr e = expr();
    if (cur().kind != Tok::End) fail({"end of input"});
    return e;
  }

  Predicate parseStandalonePredicate() {
    Predicate p = pred();
    if (cur().kind != Tok::End) fail({"end of input", "and", "or"});
    return p;
  }

 private:
  const Token& cur() const { return tokens_[pos_]; }
  const Token& lookahead(std::size_t k = 1) const {
    return tokens_[std::min(pos_ + k, tokens_.size() - 1)];
  }
  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::String: return "string literal";
      case Tok::ArrayLit: return "array literal";
      default: return "'" + t.text + "'";
    }
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = cur();
    std::string msg = std::to_string(t.begin.line) + ":" + std::to_string(t.begin.column) +
                      ": unexpected " + describe(t) + ", expected ";
    for (std::size_t k = 0; k < expected.size(); ++k) {
      if (k > 0) msg += k + 1 == expected.size() ? " or " : ", ";
      msg += expected[k];
    }
    Error err(ErrorCode::ParseError, msg, std::nullopt, t.begin);
    err.setExpected(std::move(expected));
    throw err;
  }

  const Token& expect(Tok kind, const char* what) {
    if (cur().kind != kind) fail({what});
    return advance();
  }

  bool acceptIdent(std::string_view name) {
    if (cur().kind == Tok::Ident && cur().text == name) {
      advance();
      return true;
    }
    return false;
  }

  void expectIdent(std::string_view name) {
    if (!acceptIdent(name)) fail({"'" + std::string(name) + "'"});
  }

  std::size_t position(const char* what) {
    const Token& t = expect(Tok::Int, what);
    if (t.intValue < 0) {
      Error err(ErrorCode::ParseError,
                std::to_string(t.begin.line) + ":" + std::to_string(t.begin.column) + ": " + what +
                    " must be non-negative",
                std::nullopt, t.begin);
      err.setExpected({what});
      throw err;
    }
    return static_cast<std::size_t>(t.intValue);
  }

  Coord integer(const char* what) { return expect(Tok::Int, what).intValue; }

  // ---- expressions ----

  Expr expr() {
    if (cur().kind != Tok::Ident) fail({"array name", "operator call"});
    const Token& name = advance();
    SourceLocation begin = name.begin;
    if (cur().kind != Tok::LParen) {
      return Expr{RefExpr{name.text}, {begin, name.end}};
    }
    std::string op = name.text;
    advance();  // (
    Expr::Node node = call(op, name);
    SourceLocation end = expect(Tok::RParen, "')'").end;
    return Expr{std::move(node), {begin, end}};
  }

  void comma() { expect(Tok::Comma, "','"); }

  Expr::Node call(const std::string& op, const Token& name) {
    if (op == "project") {
      Expr in = expr();
      comma();
      if (cur().kind == Tok::LBrace) return ProjectExpr{std::move(in), indexSet()};
      return ProjectExpr{std::move(in), pred()};
    }
    if (op == "select") {
      Expr in = expr();
      comma();
      return SelectExpr{std::move(in), pred()};
    }
    if (op == "cross" || op == "union") {
      Expr l = expr();
      comma();
      Expr r = expr();
      if (op == "cross") return CrossExpr{std::move(l), std::move(r)};
      return UnionExpr{std::move(l), std::move(r)};
    }
    if (op == "transform") {
      Expr in = expr();
      comma();
      return TransformExpr{std::move(in), transformSpec()};
    }
    if (op == "equijoin" || op == "semijoin" || op == "antijoin") {
      JoinKind kind = op == "equijoin" ? JoinKind::Equi
                      : op == "semijoin" ? JoinKind::Semi
                                         : JoinKind::Anti;
      Expr l = expr();
      comma();
      Expr r = expr();
      comma();
      return JoinExpr{kind, std::move(l), std::move(r), onList()};
    }
    if (op == "vpartition") {
      Expr in = expr();
      std::vector<Predicate> preds;
      comma();
      preds.push_back(pred());
      while (cur().kind == Tok::Comma) {
        advance();
        preds.push_back(pred());
      }
      return VPartitionExpr{std::move(in), std::move(preds)};
    }
    if (op == "hpartition") {
      Expr in = expr();
      comma();
      std::vector<std::vector<std::size_t>> slices;
      expect(Tok::LBrace, "'{'");
      do {
        expect(Tok::LParen, "'('");
        std::vector<std::size_t> slice{position("tuple position")};
        while (cur().kind == Tok::Comma) {
          advance();
          slice.push_back(position("tuple position"));
        }
        expect(Tok::RParen, "')'");
        slices.push_back(std::move(slice));
      } while (cur().kind == Tok::Comma && (advance(), true));
      expect(Tok::RBrace, "'}'");
      return HPartitionExpr{std::move(in), std::move(slices)};
    }
    if (op == "reassemble") {
      return ReassembleExpr{expr()};
    }
    if (op == "fragment") {
      Expr in = expr();
      comma();
      return FragmentExpr{std::move(in), position("fragment number")};
    }
    // Report the operator name itself as the offending token.
    Error err(ErrorCode::ParseError,
              std::to_string(name.begin.line) + ":" + std::to_string(name.begin.column) +
                  ": unknown operator '" + op + "'",
              std::nullopt, name.begin);
    err.setExpected(operatorNames());
    throw err;
  }

  Index tuple() {
    expect(Tok::LParen, "'('");
    std::vector<Coord> coords{integer("integer")};
    while (cur().kind == Tok::Comma) {
      advance();
      coords.push_back(integer("integer"));
    }
    expect(Tok::RParen, "')'");
    return Index(std::move(coords));
  }

  IndexSet indexSet() {
    expect(Tok::LBrace, "'{'");
    IndexSet out;
    if (cur().kind == Tok::RBrace) {
      advance();
      return out;
    }
    out.insert(tuple());
    while (cur().kind == Tok::Comma) {
      advance();
      out.insert(tuple());
    }
    expect(Tok::RBrace, "'}'");
    return out;
  }

  JoinOn onList() {
    expectIdent("on");
    expect(Tok::LParen, "'('");
    JoinOn on;
    if (cur().kind == Tok::RParen) {
      advance();
      return on;
    }
    do {
      std::size_t a = position("dim");
      expect(Tok::Colon, "':'");
      std::size_t b = position("dim");
      on.emplace_back(a, b);
    } while (cur().kind == Tok::Comma && (advance(), true));
    expect(Tok::RParen, "')'");
    return on;
  }

  TransformSpec transformSpec() {
    expect(Tok::LBracket, "'['");
    TransformSpec spec;
    if (cur().kind == Tok::RBracket) {
      advance();
      return spec;
    }
    spec.push_back(step());
    while (cur().kind == Tok::Comma) {
      advance();
      spec.push_back(step());
    }
    expect(Tok::RBracket, "']'");
    return spec;
  }

  TransformStep step() {
    static const std::vector<std::string> steps{"permute", "translate", "insert", "remove",
                                                "compact", "remap",     "reinsert"};
    if (cur().kind != Tok::Ident) fail(steps);
    std::string name = cur().text;
    if (std::find(steps.begin(), steps.end(), name) == steps.end()) fail(steps);
    advance();
    expect(Tok::LParen, "'('");
    TransformStep out = Permute{};
    if (name == "permute") {
      Permute p;
      p.perm.push_back(position("dim"));
      while (cur().kind == Tok::Comma) {
        advance();
        p.perm.push_back(position("dim"));
      }
      out = std::move(p);
    } else if (name == "translate") {
      std::size_t d = position("dim");
      comma();
      out = Translate{d, integer("offset")};
    } else if (name == "insert") {
      std::size_t d = position("position");
      comma();
      out = InsertDim{d, integer("coordinate")};
    } else if (name == "remove") {
      out = RemoveDim{position("position")};
    } else if (name == "compact") {
      out = Compact{position("dim")};
    } else if (name == "remap") {
      Remap r{position("dim"), {}};
      comma();
      expect(Tok::LBrace, "'{'");
      while (cur().kind != Tok::RBrace) {
        if (!r.table.empty()) comma();
        Coord from = integer("coordinate");
        expect(Tok::Colon, "':'");
        r.table.emplace(from, integer("coordinate"));
      }
      advance();
      out = std::move(r);
    } else {
      Reinsert r{position("position"), {}};
      comma();
      expect(Tok::LBrace, "'{'");
      while (cur().kind != Tok::RBrace) {
        if (!r.table.empty()) comma();
        Index key = tuple();
        expect(Tok::Colon, "':'");
        r.table.emplace(std::move(key), integer("coordinate"));
      }
      advance();
      out = std::move(r);
    }
    expect(Tok::RParen, "')'");
    return out;
  }

  // ---- predicates ----

  Predicate pred() {
    std::vector<Predicate> terms{andTerm()};
    while (acceptIdent("or")) terms.push_back(andTerm());
    if (terms.size() == 1) return std::move(terms.front());
    return OrPred{std::move(terms)};
  }

  Predicate andTerm() {
    std::vector<Predicate> terms{unary()};
    while (acceptIdent("and")) terms.push_back(unary());
    if (terms.size() == 1) return std::move(terms.front());
    return AndPred{std::move(terms)};
  }

  Predicate unary() {
    if (acceptIdent("not")) return NotPred{unary()};
    if (cur().kind == Tok::LParen) {
      advance();
      Predicate p = pred();
      expect(Tok::RParen, "')'");
      return p;
    }
    if (acceptIdent("true")) return TruePred{};
    if (acceptIdent("false")) return NotPred{Predicate{TruePred{}}};
    return atom();
  }

  /// `dim` INT or `dim<digits>`; nullopt if the current token is not a dim ref.
  std::optional<std::size_t> dimRef() {
    if (cur().kind != Tok::Ident) return std::nullopt;
    const std::string& t = cur().text;
    if (t == "dim" && lookahead().kind == Tok::Int) {
      advance();
      return position("dim");
    }
    if (t.size() > 3 && t.compare(0, 3, "dim") == 0 &&
        t.find_first_not_of("0123456789", 3) == std::string::npos) {
      std::size_t d = 0;
      auto res = std::from_chars(t.data() + 3, t.data() + t.size(), d);
      if (res.ec != std::errc()) fail({"dim reference"});
      advance();
      return d;
    }
    return std::nullopt;
  }

  Predicate atom() {
    if (acceptIdent("val")) {
      std::optional<std::size_t> component;
      if (cur().kind == Tok::LBracket) {
        advance();
        component = position("tuple position");
        expect(Tok::RBracket, "']'");
      }
      if (cur().kind != Tok::Cmp) fail({"comparison operator"});
      CmpOp op = advance().cmp;
      return ValueCmp{op, literal(), component};
    }
    if (auto d = dimRef()) {
      if (cur().kind != Tok::Cmp) fail({"comparison operator"});
      CmpOp op = advance().cmp;
      if (auto other = dimRef()) return CoordCmp{op, *d, *other};
      return CoordConst{op, *d, integer("integer or dim reference")};
    }
    fail({"'val'", "dim reference", "'not'", "'true'", "'('"});
  }

  Value literal() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Int: advance(); return Value::integer(t.intValue);
      case Tok::Float: advance(); return Value::real(t.floatValue);
      case Tok::String: advance(); return Value::string(t.text);
      case Tok::ArrayLit: {
        advance();
        try {
          return parseValue(t.text);
        } catch (const Error& e) {
          throw Error(ErrorCode::ParseError,
                      std::to_string(t.begin.line) + ":" + std::to_string(t.begin.column) +
                          ": bad array literal: " + e.detail(),
                      std::nullopt, t.begin);
        }
      }
      case Tok::Ident:
        if (acceptIdent("undef")) return Value::undef();
        if (acceptIdent("tuple")) {
          expect(Tok::LParen, "'('");
          std::vector<Value> items{literal()};
          while (cur().kind == Tok::Comma) {
            advance();
            items.push_back(literal());
          }
          expect(Tok::RParen, "')'");
          return Value::tuple(std::move(items));
        }
        break;
      default: break;
    }
    fail({"literal"});
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

/// Parses a query expression. Throws Error(ParseError) with location and
/// the expected-token set.
inline Expr parse(std::string_view text) { return Parser(text).parseQuery(); }

/// Parses a bare predicate, as used on command lines and in manifests.
inline Predicate parsePredicate(std::string_view text) {
  return Parser(text).parseStandalonePredicate();
}

}  // namespace arrac::qlang
