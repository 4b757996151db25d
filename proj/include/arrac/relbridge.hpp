#pragma once

// Relational tables as 2-d arrays. Dim 0 enumerates rows (or carries the key
// column's values), dim 1 enumerates columns; column names are attached to
// dim-1 coordinates through DimensionLabels. Matrix-typed cells are nested
// arrays.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "arrac/algebra.hpp"
#include "arrac/core.hpp"

namespace arrac {

/// Per-dimension bijections between string labels and integer coordinates.
class DimensionLabels {
 public:
  DimensionLabels() = default;
  explicit DimensionLabels(std::size_t dims) : byCoord_(dims), byLabel_(dims) {}

  std::size_t dims() const noexcept { return byCoord_.size(); }

  /// Throws InvalidValue if the label or the coordinate is already taken.
  void set(std::size_t dim, Coord coord, std::string label) {
    if (dim >= dims()) {
      byCoord_.resize(dim + 1);
      byLabel_.resize(dim + 1);
    }
    if (byCoord_[dim].count(coord)) {
      throw Error(ErrorCode::InvalidValue, "dim " + std::to_string(dim) + " coordinate " +
                                               std::to_string(coord) + " already labelled");
    }
    if (byLabel_[dim].count(label)) {
      throw Error(ErrorCode::InvalidValue,
                  "dim " + std::to_string(dim) + " label '" + label + "' used twice");
    }
    byLabel_[dim].emplace(label, coord);
    byCoord_[dim].emplace(coord, std::move(label));
  }

  bool labelled(std::size_t dim) const { return dim < dims() && !byCoord_[dim].empty(); }

  std::optional<Coord> coordOf(std::size_t dim, std::string_view label) const {
    if (dim >= dims()) return std::nullopt;
    auto it = byLabel_[dim].find(std::string(label));
    if (it == byLabel_[dim].end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::string> labelOf(std::size_t dim, Coord coord) const {
    if (dim >= dims()) return std::nullopt;
    auto it = byCoord_[dim].find(coord);
    if (it == byCoord_[dim].end()) return std::nullopt;
    return it->second;
  }

  /// coordinate → label for one dim, ascending by coordinate.
  const std::map<Coord, std::string>& entries(std::size_t dim) const {
    static const std::map<Coord, std::string> none;
    return dim < dims() ? byCoord_[dim] : none;
  }

  friend bool operator==(const DimensionLabels& a, const DimensionLabels& b) {
    std::size_t n = std::max(a.dims(), b.dims());
    for (std::size_t d = 0; d < n; ++d) {
      if (a.entries(d) != b.entries(d)) return false;
    }
    return true;
  }

 private:
  std::vector<std::map<Coord, std::string>> byCoord_;
  std::vector<std::map<std::string, Coord>> byLabel_;
};

enum class ColumnType { Any, Int, Float, Str, Matrix };

inline std::string_view columnTypeName(ColumnType t) {
  switch (t) {
    case ColumnType::Any: return "any";
    case ColumnType::Int: return "int";
    case ColumnType::Float: return "float";
    case ColumnType::Str: return "str";
    case ColumnType::Matrix: return "matrix";
  }
  return "any";
}

inline std::optional<ColumnType> parseColumnType(std::string_view s) {
  if (s == "any") return ColumnType::Any;
  if (s == "int") return ColumnType::Int;
  if (s == "float") return ColumnType::Float;
  if (s == "str") return ColumnType::Str;
  if (s == "matrix") return ColumnType::Matrix;
  return std::nullopt;
}

struct Column {
  std::string name;
  ColumnType type = ColumnType::Any;
  friend bool operator==(const Column&, const Column&) = default;
};

struct TableSchema {
  std::vector<Column> columns;
  std::optional<std::string> keyColumn;

  std::optional<std::size_t> columnIndex(std::string_view name) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c].name == name) return c;
    }
    return std::nullopt;
  }

  /// Throws SchemaMismatch for duplicate names or a dangling key column.
  void validate() const {
    std::set<std::string> seen;
    for (const auto& c : columns) {
      if (c.name.empty()) throw Error(ErrorCode::SchemaMismatch, "empty column name");
      if (!seen.insert(c.name).second) {
        throw Error(ErrorCode::SchemaMismatch, "duplicate column '" + c.name + "'");
      }
    }
    if (keyColumn) {
      auto k = columnIndex(*keyColumn);
      if (!k) throw Error(ErrorCode::SchemaMismatch, "key column '" + *keyColumn + "' not in schema");
      auto t = columns[*k].type;
      if (t != ColumnType::Int && t != ColumnType::Any) {
        throw Error(ErrorCode::SchemaMismatch, "key column must hold integers");
      }
    }
  }

  friend bool operator==(const TableSchema&, const TableSchema&) = default;
};

using Row = std::vector<Value>;

struct EncodedTable {
  Array array;
  DimensionLabels labels;
};

namespace detail {

inline bool cellMatches(ColumnType t, const Value& v) {
  if (v.isUndef()) return true;
  switch (t) {
    case ColumnType::Any: return true;
    case ColumnType::Int: return v.isInt();
    case ColumnType::Float: return v.isFloat();
    case ColumnType::Str: return v.isStr();
    case ColumnType::Matrix: return v.isArray();
  }
  return false;
}

}  // namespace detail

/// Encodes rows as a 2-d array. Without a key column row r sits at dim-0
/// coordinate r; with one, the key value is the dim-0 coordinate and must be
/// a distinct non-negative integer (DuplicateKey otherwise).
inline EncodedTable encodeTable(const TableSchema& schema, const std::vector<Row>& rows) {
  schema.validate();
  DimensionLabels labels(2);
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    labels.set(1, static_cast<Coord>(c), schema.columns[c].name);
  }
  std::optional<std::size_t> key;
  if (schema.keyColumn) key = schema.columnIndex(*schema.keyColumn);

  std::vector<Array::Entry> entries;
  entries.reserve(rows.size() * schema.columns.size());
  std::set<Coord> keys;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Row& row = rows[r];
    if (row.size() != schema.columns.size()) {
      throw Error(ErrorCode::SchemaMismatch, "row " + std::to_string(r) + " has " +
                                                 std::to_string(row.size()) + " cells, schema has " +
                                                 std::to_string(schema.columns.size()));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!detail::cellMatches(schema.columns[c].type, row[c])) {
        throw Error(ErrorCode::SchemaMismatch, "row " + std::to_string(r) + " column '" +
                                                   schema.columns[c].name + "' expects " +
                                                   std::string(columnTypeName(schema.columns[c].type)));
      }
    }
    Coord rowCoord = static_cast<Coord>(r);
    if (key) {
      const Value& k = row[*key];
      if (!k.isInt() || k.asInt() < 0) {
        throw Error(ErrorCode::SchemaMismatch,
                    "row " + std::to_string(r) + " key must be a non-negative integer");
      }
      rowCoord = k.asInt();
      if (!keys.insert(rowCoord).second) {
        throw Error(ErrorCode::DuplicateKey, "key value " + std::to_string(rowCoord) + " repeats",
                    std::vector<Coord>{rowCoord});
      }
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      entries.emplace_back(Index{rowCoord, static_cast<Coord>(c)}, row[c]);
    }
  }
  return {Array::fromEntries(2, std::move(entries)), std::move(labels)};
}

/// Inverse of encodeTable: rows in ascending dim-0 order. MissingCell names
/// the (row, column) coordinates of the first absent cell.
inline std::vector<Row> decodeTable(const Array& a, const DimensionLabels& labels,
                                    const TableSchema& schema) {
  schema.validate();
  if (a.arity() != 2) {
    throw Error(ErrorCode::ArityMismatch,
                "tables decode from 2-d arrays, got arity " + std::to_string(a.arity()));
  }
  std::vector<Coord> columnCoords;
  for (const auto& c : schema.columns) {
    auto coord = labels.coordOf(1, c.name);
    if (!coord) throw Error(ErrorCode::UnknownLabel, "no column labelled '" + c.name + "'");
    columnCoords.push_back(*coord);
  }
  std::set<Coord> rowCoords;
  for (const auto& e : a) rowCoords.insert(e.first[0]);

  std::vector<Row> rows;
  rows.reserve(rowCoords.size());
  for (Coord r : rowCoords) {
    Row row;
    row.reserve(columnCoords.size());
    for (std::size_t c = 0; c < columnCoords.size(); ++c) {
      const Value* v = a.find(Index{r, columnCoords[c]});
      if (v == nullptr) {
        throw Error(ErrorCode::MissingCell,
                    "row " + std::to_string(r) + " has no '" + schema.columns[c].name + "' cell",
                    std::vector<Coord>{r, columnCoords[c]});
      }
      if (!detail::cellMatches(schema.columns[c].type, *v)) {
        throw Error(ErrorCode::SchemaMismatch, "row " + std::to_string(r) + " column '" +
                                                   schema.columns[c].name + "' has the wrong type");
      }
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// select(a, dim = coordinate of `label`). Throws UnknownLabel.
inline Array labelSelect(const Array& a, const DimensionLabels& labels, std::size_t dim,
                         std::string_view label) {
  auto coord = labels.coordOf(dim, label);
  if (!coord) {
    throw Error(ErrorCode::UnknownLabel,
                "dim " + std::to_string(dim) + " has no label '" + std::string(label) + "'");
  }
  return select(a, coordConst(CmpOp::Eq, dim, *coord));
}

}  // namespace arrac
