#pragma once

// Delimited text tables for encode-table / decode-table.
//
// First line: column names. A leading '*' marks the key column, an optional
// ':type' suffix (int, float, str, matrix, any) fixes the column type.
//
//   *measurementID:int,time,detector:str,valueMatrix:matrix
//   10,1700000000,"d1","array{arity=2; 0,0 -> int:1}"
//
// Cells follow RFC 4180 quoting. An unquoted empty cell or bare `undef` is
// undef. Untyped cells are read as int, then float, then an exchange-format
// value when they start with array{ / tuple( / str: / int: / float:, else as
// a plain string.

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "arrac/relbridge.hpp"
#include "arrac/text_format.hpp"

namespace arrac {

struct DelimitedTable {
  TableSchema schema;
  std::vector<Row> rows;
};

namespace detail {

struct RawCell {
  std::string text;
  bool quoted = false;
};

/// Splits CSV text into records. Throws FormatError with the line number.
inline std::vector<std::pair<std::size_t, std::vector<RawCell>>> splitRecords(std::string_view text,
                                                                              char delim) {
  std::vector<std::pair<std::size_t, std::vector<RawCell>>> records;
  std::size_t line = 1;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t startLine = line;
    std::vector<RawCell> cells;
    RawCell cell;
    bool endOfRecord = false;
    while (!endOfRecord) {
      if (pos < text.size() && text[pos] == '"') {
        cell.quoted = true;
        ++pos;
        for (;;) {
          if (pos >= text.size()) {
            throw Error(ErrorCode::FormatError, "unterminated quoted cell", {},
                        SourceLocation{startLine, 0});
          }
          char c = text[pos++];
          if (c == '"') {
            if (pos < text.size() && text[pos] == '"') {
              cell.text.push_back('"');
              ++pos;
            } else {
              break;
            }
          } else {
            if (c == '\n') ++line;
            cell.text.push_back(c);
          }
        }
      }
      while (pos < text.size() && text[pos] != delim && text[pos] != '\n') {
        if (cell.quoted && text[pos] != '\r') {
          throw Error(ErrorCode::FormatError, "text after closing quote", {},
                      SourceLocation{line, 0});
        }
        if (text[pos] != '\r') cell.text.push_back(text[pos]);
        ++pos;
      }
      cells.push_back(std::move(cell));
      cell = RawCell{};
      if (pos >= text.size()) {
        endOfRecord = true;
      } else if (text[pos] == delim) {
        ++pos;
      } else {
        ++pos;
        ++line;
        endOfRecord = true;
      }
    }
    bool blank = cells.size() == 1 && !cells[0].quoted && cells[0].text.empty();
    if (!blank) records.emplace_back(startLine, std::move(cells));
  }
  return records;
}

inline bool looksLikeExchangeValue(std::string_view s) {
  for (std::string_view p : {"array{", "tuple(", "str:", "int:", "float:"}) {
    if (s.substr(0, p.size()) == p) return true;
  }
  return s == "undef";
}

inline std::optional<Value> parseIntCell(std::string_view s) {
  std::int64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return Value::integer(v);
}

inline std::optional<Value> parseFloatCell(std::string_view s) {
  double d = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), d);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || d != d) {
    return std::nullopt;
  }
  return Value::real(d);
}

inline Value parseCell(const RawCell& cell, ColumnType type, std::size_t line,
                       const std::string& column) {
  if (!cell.quoted && (cell.text.empty() || cell.text == "undef")) return Value::undef();
  auto fail = [&](const std::string& what) -> Error {
    return Error(ErrorCode::FormatError, "column '" + column + "': " + what, {},
                 SourceLocation{line, 0});
  };
  try {
    switch (type) {
      case ColumnType::Int:
        if (auto v = parseIntCell(cell.text)) return *v;
        throw fail("expected an integer, got '" + cell.text + "'");
      case ColumnType::Float:
        if (auto v = parseFloatCell(cell.text)) return *v;
        throw fail("expected a number, got '" + cell.text + "'");
      case ColumnType::Str:
        return Value::string(cell.text);
      case ColumnType::Matrix: {
        Value v = parseValue(cell.text);
        if (!v.isArray() && !v.isUndef()) throw fail("expected array{...}");
        return v;
      }
      case ColumnType::Any:
        if (auto v = parseIntCell(cell.text)) return *v;
        if (auto v = parseFloatCell(cell.text)) return *v;
        if (looksLikeExchangeValue(cell.text)) return parseValue(cell.text);
        return Value::string(cell.text);
    }
  } catch (Error& e) {
    if (e.code() == ErrorCode::FormatError && !e.location()) {
      throw fail(e.detail());
    }
    throw;
  }
  return Value::undef();
}

inline bool needsQuotes(std::string_view s, char delim) {
  if (s.empty() || s == "undef") return true;
  for (char c : s) {
    if (c == delim || c == '"' || c == '\n' || c == '\r') return true;
  }
  return s.front() == ' ' || s.back() == ' ';
}

inline std::string quoteCell(std::string_view s, char delim) {
  if (!needsQuotes(s, delim)) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

inline std::string cellText(const Value& v, ColumnType type) {
  switch (v.tag()) {
    case Value::Tag::Undef: return "undef";
    case Value::Tag::Int: return std::to_string(v.asInt());
    case Value::Tag::Float: {
      std::string s = formatFloat(v.asFloat());
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      return s;
    }
    case Value::Tag::Str: {
      // A plain string that would read back as something else keeps its tag.
      if (type == ColumnType::Any) {
        const std::string& s = v.asStr();
        if (s.empty() || parseIntCell(s) || parseFloatCell(s) || looksLikeExchangeValue(s)) {
          return formatValue(v);
        }
      }
      return v.asStr();
    }
    default: return formatValue(v);
  }
}

}  // namespace detail

/// Parses a delimited table. Throws FormatError / SchemaMismatch.
inline DelimitedTable parseDelimitedTable(std::string_view text, char delim = ',') {
  auto records = detail::splitRecords(text, delim);
  if (records.empty()) throw Error(ErrorCode::FormatError, "table has no header line");
  DelimitedTable t;
  for (const auto& cell : records.front().second) {
    std::string name = cell.text;
    bool key = false;
    if (!name.empty() && name.front() == '*') {
      key = true;
      name.erase(0, 1);
    }
    ColumnType type = ColumnType::Any;
    if (auto colon = name.rfind(':'); colon != std::string::npos) {
      auto parsed = parseColumnType(std::string_view(name).substr(colon + 1));
      if (!parsed) {
        throw Error(ErrorCode::FormatError, "unknown column type in '" + cell.text + "'", {},
                    SourceLocation{records.front().first, 0});
      }
      type = *parsed;
      name.erase(colon);
    }
    if (key) {
      if (t.schema.keyColumn) {
        throw Error(ErrorCode::SchemaMismatch, "more than one key column");
      }
      t.schema.keyColumn = name;
    }
    t.schema.columns.push_back({name, type});
  }
  t.schema.validate();
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& [line, cells] = records[r];
    if (cells.size() != t.schema.columns.size()) {
      throw Error(ErrorCode::FormatError,
                  "expected " + std::to_string(t.schema.columns.size()) + " cells, got " +
                      std::to_string(cells.size()),
                  {}, SourceLocation{line, 0});
    }
    Row row;
    row.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      row.push_back(
          detail::parseCell(cells[c], t.schema.columns[c].type, line, t.schema.columns[c].name));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline std::string formatDelimitedTable(const TableSchema& schema, const std::vector<Row>& rows,
                                        char delim = ',') {
  std::string out;
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    if (c > 0) out.push_back(delim);
    std::string head;
    if (schema.keyColumn && *schema.keyColumn == schema.columns[c].name) head = "*";
    head += schema.columns[c].name;
    if (schema.columns[c].type != ColumnType::Any) {
      head += ":" + std::string(columnTypeName(schema.columns[c].type));
    }
    out += detail::quoteCell(head, delim);
  }
  out.push_back('\n');
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out.push_back(delim);
      std::string s = detail::cellText(row[c], schema.columns[c].type);
      out += row[c].isUndef() ? s : detail::quoteCell(s, delim);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace arrac
