#pragma once

// Canonical text exchange format for arrays.
//
//   arrac v1 arity=<n> count=<k>
//   label dim=<d> <coord>=<name> ...        (optional, one line per dim)
//   <i1>,...,<in> -> <value>                (k lines, ascending index order)
//
// value := int:<n> | float:<shortest decimal> | str:"<escaped>" | undef
//        | tuple(<value>,...) | array{arity=<m>; <index> -> <value>; ...}
//
// Output is a pure function of the array (and labels), so saving twice gives
// identical bytes.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "arrac/core.hpp"
#include "arrac/relbridge.hpp"

namespace arrac {

/// Shortest decimal that parses back to the same double.
inline std::string formatFloat(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, res.ptr);
}

/// Double-quoted, with \\ \" \n \t \r and \xHH for other control bytes.
inline std::string quoteString(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    switch (ch) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          static constexpr char hex[] = "0123456789abcdef";
          out += "\\x";
          out.push_back(hex[c >> 4]);
          out.push_back(hex[c & 0xf]);
        } else {
          out.push_back(ch);
        }
    }
  }
  out.push_back('"');
  return out;
}

inline std::string formatIndex(const Index& i) {
  std::string out;
  for (std::size_t d = 0; d < i.arity(); ++d) {
    if (d > 0) out.push_back(',');
    out += std::to_string(i[d]);
  }
  return out;
}

inline std::string formatValue(const Value& v);

inline std::string formatInlineArray(const Array& a) {
  std::string out = "array{arity=" + std::to_string(a.arity());
  for (const auto& [index, value] : a) {
    out += "; ";
    out += formatIndex(index);
    out += " -> ";
    out += formatValue(value);
  }
  out += "}";
  return out;
}

inline std::string formatValue(const Value& v) {
  switch (v.tag()) {
    case Value::Tag::Int: return "int:" + std::to_string(v.asInt());
    case Value::Tag::Float: return "float:" + formatFloat(v.asFloat());
    case Value::Tag::Str: return "str:" + quoteString(v.asStr());
    case Value::Tag::Undef: return "undef";
    case Value::Tag::Tuple: {
      std::string out = "tuple(";
      const auto& items = v.asTuple();
      for (std::size_t k = 0; k < items.size(); ++k) {
        if (k > 0) out.push_back(',');
        out += formatValue(items[k]);
      }
      out += ")";
      return out;
    }
    case Value::Tag::Array: return formatInlineArray(v.asArray());
  }
  return "undef";
}

namespace detail {

inline bool isBareLabel(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

}  // namespace detail

/// The full canonical file text.
inline std::string formatArrayFile(const Array& a, const DimensionLabels& labels = {}) {
  std::string out = "arrac v1 arity=" + std::to_string(a.arity()) +
                    " count=" + std::to_string(a.size()) + "\n";
  for (std::size_t d = 0; d < labels.dims() && d < a.arity(); ++d) {
    if (!labels.labelled(d)) continue;
    out += "label dim=" + std::to_string(d);
    for (const auto& [coord, name] : labels.entries(d)) {
      out += " " + std::to_string(coord) + "=";
      out += detail::isBareLabel(name) ? name : quoteString(name);
    }
    out += "\n";
  }
  for (const auto& [index, value] : a) {
    out += formatIndex(index);
    out += " -> ";
    out += formatValue(value);
    out += "\n";
  }
  return out;
}

struct ArrayFile {
  Array array;
  DimensionLabels labels;
};

namespace detail {

/// Cursor over one line of input. Errors carry the line number and the
/// column at which parsing stopped.
class TextCursor {
 public:
  TextCursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  bool atEnd() const { return pos_ >= text_.size(); }
  char peek() const { return atEnd() ? '\0' : text_[pos_]; }
  std::size_t pos() const { return pos_; }
  std::string_view rest() const { return text_.substr(pos_); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::FormatError, "line " + std::to_string(line_) + ": " + msg, std::nullopt,
                SourceLocation{line_, pos_ + 1});
  }

  void skipSpaces() {
    while (!atEnd() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool consume(std::string_view lit) {
    if (text_.substr(pos_, lit.size()) == lit) {
      pos_ += lit.size();
      return true;
    }
    return false;
  }

  /// Consumes up to (not including) the first character from `stops`.
  std::string_view token(std::string_view stops) {
    std::size_t end = pos_;
    while (end < text_.size() && stops.find(text_[end]) == std::string_view::npos) ++end;
    std::string_view tok = text_.substr(pos_, end - pos_);
    pos_ = end;
    return tok;
  }

  void expect(std::string_view lit) {
    if (!consume(lit)) fail("expected '" + std::string(lit) + "'");
  }

  std::int64_t integer() {
    std::int64_t v = 0;
    auto first = text_.data() + pos_;
    auto last = text_.data() + text_.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec == std::errc::result_out_of_range) fail("integer out of range");
    if (res.ec != std::errc() || res.ptr == first) fail("expected an integer");
    pos_ += static_cast<std::size_t>(res.ptr - first);
    return v;
  }

  double real() {
    std::size_t start = pos_;
    std::string_view tok = token(",);} \t");
    pos_ = start;
    if (tok.empty()) fail("expected a float");
    if (tok.find("nan") != std::string_view::npos || tok.find("NAN") != std::string_view::npos) {
      fail("NaN is not a storable value");
    }
    double v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      fail("malformed float '" + std::string(tok) + "'");
    }
    pos_ += tok.size();
    return v;
  }

  std::string quoted() {
    expect("\"");
    std::string out;
    while (true) {
      if (atEnd()) fail("unterminated string");
      char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (atEnd()) fail("dangling escape");
      char e = text_[pos_++];
      switch (e) {
        case '\\': out.push_back('\\'); break;
        case '"': out.push_back('"'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case 'x': {
          if (pos_ + 2 > text_.size()) fail("short \\x escape");
          unsigned v = 0;
          auto res = std::from_chars(text_.data() + pos_, text_.data() + pos_ + 2, v, 16);
          if (res.ec != std::errc() || res.ptr != text_.data() + pos_ + 2) fail("bad \\x escape");
          out.push_back(static_cast<char>(v));
          pos_ += 2;
          break;
        }
        default: fail(std::string("unknown escape \\") + e);
      }
    }
    return out;
  }

  Index index() {
    std::vector<Coord> coords;
    coords.push_back(integer());
    while (consume(",")) coords.push_back(integer());
    return Index(std::move(coords));
  }

  Value value() {
    if (consume("int:")) return Value::integer(integer());
    if (consume("float:")) return Value::real(real());
    if (consume("str:")) return Value::string(quoted());
    if (consume("undef")) return Value::undef();
    if (consume("tuple(")) {
      std::vector<Value> items;
      skipSpaces();
      items.push_back(value());
      skipSpaces();
      while (consume(",")) {
        skipSpaces();
        items.push_back(value());
        skipSpaces();
      }
      expect(")");
      return Value::tuple(std::move(items));
    }
    if (consume("array{")) return Value::array(inlineArray());
    fail("expected a value");
  }

  Array inlineArray() {
    expect("arity=");
    std::int64_t arity = integer();
    if (arity < 1) fail("arity must be at least 1");
    std::vector<Array::Entry> entries;
    skipSpaces();
    while (consume(";")) {
      skipSpaces();
      if (peek() == '}') break;
      Index i = index();
      if (i.arity() != static_cast<std::size_t>(arity)) {
        throw Error(ErrorCode::ArityMismatch,
                    "line " + std::to_string(line_) + ": nested index has " +
                        std::to_string(i.arity()) + " coordinates, expected " + std::to_string(arity),
                    i.coords, SourceLocation{line_, pos_ + 1});
      }
      skipSpaces();
      expect("->");
      skipSpaces();
      Value v = value();
      entries.emplace_back(std::move(i), std::move(v));
      skipSpaces();
    }
    expect("}");
    return Array::fromEntries(static_cast<std::size_t>(arity), std::move(entries));
  }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

inline std::size_t parseCount(TextCursor& cur, std::string_view key) {
  cur.expect(key);
  std::int64_t v = cur.integer();
  if (v < 0) cur.fail("negative " + std::string(key));
  return static_cast<std::size_t>(v);
}

}  // namespace detail

/// Parses one value in exchange syntax (the whole string must be consumed).
inline Value parseValue(std::string_view text) {
  detail::TextCursor cur(text, 1);
  cur.skipSpaces();
  Value v;
  try {
    v = cur.value();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidValue) cur.fail(e.detail());
    throw;
  }
  cur.skipSpaces();
  if (!cur.atEnd()) cur.fail("trailing characters after value");
  return v;
}

/// Parses a whole array file. Errors: FormatError (with line),
/// ArityMismatch (with line and index), ConsistencyViolation (with index).
inline ArrayFile parseArrayFile(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  if (lines.empty()) {
    throw Error(ErrorCode::FormatError, "line 1: empty file", std::nullopt, SourceLocation{1, 1});
  }

  detail::TextCursor header(lines[0], 1);
  header.expect("arrac v1 ");
  std::size_t arity = detail::parseCount(header, "arity=");
  header.expect(" ");
  std::size_t count = detail::parseCount(header, "count=");
  if (!header.atEnd()) header.fail("trailing characters in header");
  if (arity == 0) header.fail("arity must be at least 1");

  DimensionLabels labels;
  std::size_t ln = 1;
  while (ln < lines.size() && lines[ln].rfind("label ", 0) == 0) {
    detail::TextCursor cur(lines[ln], ln + 1);
    cur.expect("label dim=");
    std::int64_t dim = cur.integer();
    if (dim < 0 || static_cast<std::size_t>(dim) >= arity) cur.fail("label dim out of range");
    while (!cur.atEnd()) {
      cur.expect(" ");
      Coord coord = cur.integer();
      cur.expect("=");
      std::string name;
      if (cur.peek() == '"') {
        name = cur.quoted();
      } else {
        name = std::string(cur.token(" "));
        if (name.empty()) cur.fail("empty label");
      }
      try {
        labels.set(static_cast<std::size_t>(dim), coord, std::move(name));
      } catch (const Error& e) {
        cur.fail(e.detail());
      }
    }
    ++ln;
  }

  std::vector<Array::Entry> entries;
  entries.reserve(count);
  std::size_t bodyLines = 0;
  for (; ln < lines.size(); ++ln) {
    if (lines[ln].empty() && ln + 1 == lines.size()) break;  // final newline
    detail::TextCursor cur(lines[ln], ln + 1);
    Index i = cur.index();
    if (i.arity() != arity) {
      throw Error(ErrorCode::ArityMismatch,
                  "line " + std::to_string(ln + 1) + ": index has " + std::to_string(i.arity()) +
                      " coordinates, header says " + std::to_string(arity),
                  i.coords, SourceLocation{ln + 1, 1});
    }
    cur.expect(" -> ");
    Value v;
    try {
      v = cur.value();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidValue) cur.fail(e.detail());
      throw;
    }
    if (!cur.atEnd()) cur.fail("trailing characters after value");
    entries.emplace_back(std::move(i), std::move(v));
    ++bodyLines;
  }
  if (bodyLines != count) {
    throw Error(ErrorCode::FormatError,
                "line " + std::to_string(ln) + ": header declares " + std::to_string(count) +
                    " entries, body has " + std::to_string(bodyLines),
                std::nullopt, SourceLocation{ln == 0 ? 1 : ln, 1});
  }
  return {Array::fromSorted(arity, std::move(entries)), std::move(labels)};
}

inline std::string readTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed for " + path.string());
  return ss.str();
}

inline void writeTextFile(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

inline ArrayFile loadArray(const std::filesystem::path& path) {
  return parseArrayFile(readTextFile(path));
}

inline void saveArray(const Array& a, const std::filesystem::path& path,
                      const DimensionLabels& labels = {}) {
  writeTextFile(path, formatArrayFile(a, labels));
}

}  // namespace arrac
