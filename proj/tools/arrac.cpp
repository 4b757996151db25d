// arrac: command-line front end for the array algebra.
//
// Exit codes:
//   0  success
//   1  usage or I/O error
//   2  query parse error
//   3  type error (unbound name, arity, array/placement mismatch)
//   4  runtime error raised by an operator
//   5  malformed input file

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "arrac/arrac.hpp"

namespace fs = std::filesystem;
using namespace arrac;

namespace {

enum Exit { Ok = 0, Usage = 1, Parse = 2, Type = 3, Runtime = 4, Format = 5 };

int exitCodeFor(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError: return Parse;
    case ErrorCode::UnboundName:
    case ErrorCode::ArityError:
    case ErrorCode::TypeError: return Type;
    case ErrorCode::FormatError: return Format;
    case ErrorCode::IoError: return Usage;
    default: return Runtime;
  }
}

std::string lineOf(const std::string& text, std::size_t line) {
  std::istringstream in(text);
  std::string s;
  for (std::size_t k = 0; k < line && std::getline(in, s); ++k) {
  }
  return s;
}

void caret(const std::string& source, SourceLocation begin, std::size_t width) {
  std::cerr << "  " << lineOf(source, begin.line) << "\n  "
            << std::string(begin.column > 0 ? begin.column - 1 : 0, ' ')
            << std::string(std::max<std::size_t>(width, 1), '^') << "\n";
}

/// Prints the diagnostic to stderr; `source` is the query text, when any.
int report(const Error& e, const std::string& source = {}) {
  std::cerr << "arrac: ";
  std::string what = e.what();
  // Parse and exchange-format messages already carry their position.
  if (e.location() && e.code() != ErrorCode::ParseError) {
    const auto& loc = *e.location();
    std::string line = "line " + std::to_string(loc.line);
    if (what.find(line + ":") == std::string::npos) {
      std::cerr << (loc.column > 0 ? std::to_string(loc.line) + ":" + std::to_string(loc.column)
                                   : line)
                << ": ";
    }
  }
  std::cerr << what << "\n";
  if (e.witness()) {
    std::cerr << "  at index (";
    for (std::size_t k = 0; k < e.witness()->size(); ++k) {
      std::cerr << (k ? "," : "") << (*e.witness())[k];
    }
    std::cerr << ")\n";
  }
  if (!source.empty()) {
    if (e.code() == ErrorCode::ParseError && e.location()) {
      caret(source, *e.location(), 1);
    } else if (e.span()) {
      const auto& s = *e.span();
      std::size_t width = s.end.line == s.begin.line && s.end.column > s.begin.column
                              ? s.end.column - s.begin.column
                              : 1;
      caret(source, s.begin, width);
    }
  }
  return exitCodeFor(e.code());
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty() || output == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    writeTextFile(output, text);
  }
}

std::vector<std::size_t> parseSlice(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      unsigned long v = std::stoul(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadSlices, "bad slice position '" + item + "'");
    }
  }
  return out;
}

struct Common {
  std::string catalog = ".";
  std::string output;
};

const Array& requireArray(const qlang::Catalog& cat, const std::string& name) {
  const Array* a = cat.find(name);
  if (a == nullptr) throw Error(ErrorCode::UnboundName, "no array named '" + name + "' in catalog");
  return *a;
}

nlohmann::ordered_json schemaToJson(const TableSchema& s) {
  nlohmann::ordered_json j;
  j["format"] = "arrac-schema v1";
  auto cols = nlohmann::ordered_json::array();
  for (const auto& c : s.columns) {
    cols.push_back({{"name", c.name}, {"type", std::string(columnTypeName(c.type))}});
  }
  j["columns"] = std::move(cols);
  j["key"] = s.keyColumn ? nlohmann::ordered_json(*s.keyColumn) : nlohmann::ordered_json();
  return j;
}

TableSchema schemaFromJson(const std::string& text) {
  TableSchema s;
  try {
    auto j = nlohmann::json::parse(text);
    for (const auto& c : j.at("columns")) {
      auto type = parseColumnType(c.at("type").get<std::string>());
      if (!type) throw Error(ErrorCode::FormatError, "unknown column type");
      s.columns.push_back({c.at("name").get<std::string>(), *type});
    }
    if (j.contains("key") && !j["key"].is_null()) s.keyColumn = j["key"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("schema: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"arrac: array algebra engine"};
  app.require_subcommand(1);
  Common opt;

  auto addCatalog = [&](CLI::App* sub) {
    sub->add_option("-c,--catalog", opt.catalog, "catalog directory")->capture_default_str();
  };
  auto addOutput = [&](CLI::App* sub, const char* help) {
    sub->add_option("-o,--output", opt.output, help);
  };

  // query
  std::string expression, queryFile, format = "canonical";
  auto* query = app.add_subcommand("query", "evaluate an expression against the catalog");
  addCatalog(query);
  addOutput(query, "write the result here instead of stdout");
  query->add_option("expression", expression, "query text");
  query->add_option("-f,--file", queryFile, "read the query from a file");
  query->add_option("--format", format, "output format")->check(CLI::IsMember({"canonical"}));

  // load
  std::string loadPath, loadName;
  auto* load = app.add_subcommand("load", "validate an array file and add it to the catalog");
  addCatalog(load);
  load->add_option("file", loadPath, "array file")->required();
  load->add_option("-n,--name", loadName, "catalog name (default: file stem)");

  // save
  std::string saveName;
  auto* save = app.add_subcommand("save", "write a catalog array in canonical form");
  addCatalog(save);
  addOutput(save, "destination file (default: stdout)");
  save->add_option("name", saveName, "array name")->required();

  // partitions
  std::string partName;
  std::vector<std::string> preds, slices;
  std::size_t shards = 0;
  auto* vpart = app.add_subcommand("vpartition", "split an array's support by predicates");
  addCatalog(vpart);
  addOutput(vpart, "placement directory (default: <catalog>/<name>.placement)");
  vpart->add_option("name", partName, "source array")->required();
  vpart->add_option("-p,--pred", preds, "fragment predicate (repeat)")->required();
  vpart->add_option("--shards", shards, "round-robin fragments onto this many shards");

  auto* hpart = app.add_subcommand("hpartition", "split tuple values into column groups");
  addCatalog(hpart);
  addOutput(hpart, "placement directory (default: <catalog>/<name>.placement)");
  hpart->add_option("name", partName, "source array")->required();
  hpart->add_option("-s,--slice", slices, "comma-separated tuple positions (repeat)")->required();
  hpart->add_option("--shards", shards, "round-robin fragments onto this many shards");

  std::string manifestPath;
  bool verify = false;
  auto* reasm = app.add_subcommand("reassemble", "rebuild an array from a placement manifest");
  addCatalog(reasm);
  addOutput(reasm, "destination file (default: stdout)");
  reasm->add_option("manifest", manifestPath, "manifest.json or its directory")->required();
  reasm->add_flag("--verify", verify, "re-evaluate fragment expressions against the catalog");

  // tables
  std::string tablePath, tableName;
  char delim = ',';
  auto* enc = app.add_subcommand("encode-table", "encode a delimited table as a 2-d array");
  addCatalog(enc);
  enc->add_option("table", tablePath, "delimited text file")->required();
  enc->add_option("-n,--name", tableName, "catalog name (default: file stem)");
  enc->add_option("-d,--delimiter", delim, "cell delimiter");

  auto* dec = app.add_subcommand("decode-table", "decode a catalog array back to a table");
  addCatalog(dec);
  addOutput(dec, "destination file (default: stdout)");
  dec->add_option("name", tableName, "array name")->required();
  dec->add_option("-d,--delimiter", delim, "cell delimiter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "arrac: " << e.what() << "\n";
    return Usage;
  }

  std::string source;
  try {
    fs::path cat(opt.catalog);

    if (*query) {
      if (queryFile.empty() == expression.empty()) {
        std::cerr << "arrac: give either an expression or --file\n";
        return Usage;
      }
      source = queryFile.empty() ? expression : readTextFile(queryFile);
      qlang::Expr e = qlang::parse(source);
      qlang::Catalog c = loadCatalog(cat);
      auto typed = qlang::typecheck(e, c);
      if (typed.type.kind != qlang::ResultKind::Array) {
        throw Error(ErrorCode::TypeError,
                    "query yields a placement; wrap it in reassemble() or fragment()");
      }
      emit(formatArrayFile(qlang::evaluate(e, c)), opt.output);
      return Ok;
    }

    if (*load) {
      ArrayFile f = loadArray(loadPath);
      std::string name = loadName.empty() ? fs::path(loadPath).stem().string() : loadName;
      if (!qlang::isIdentifier(name)) {
        std::cerr << "arrac: '" << name << "' is not a valid array name\n";
        return Usage;
      }
      fs::create_directories(cat);
      saveArray(f.array, catalogPath(cat, name), f.labels);
      std::cerr << "loaded " << name << ": arity " << f.array.arity() << ", " << f.array.size()
                << " associations\n";
      return Ok;
    }

    if (*save) {
      ArrayFile f = loadArray(catalogPath(cat, saveName));
      emit(formatArrayFile(f.array, f.labels), opt.output);
      return Ok;
    }

    if (*vpart || *hpart) {
      qlang::Catalog c = loadCatalog(cat);
      const Array& a = requireArray(c, partName);
      Placement p{{}, VerticalSplit{}, 0};
      if (*vpart) {
        std::vector<Predicate> ps;
        for (const auto& text : preds) {
          source = text;
          ps.push_back(qlang::parsePredicate(text));
        }
        source.clear();
        p = partitionVertical(a, ps, shards);
      } else {
        std::vector<std::vector<std::size_t>> sl;
        for (const auto& s : slices) sl.push_back(parseSlice(s));
        p = partitionHorizontal(a, sl, shards);
      }
      fs::path dir = opt.output.empty() ? cat / (partName + ".placement") : fs::path(opt.output);
      writePlacement(p, partName, dir);
      std::cout << (dir / "manifest.json").string() << "\n";
      return Ok;
    }

    if (*reasm) {
      fs::path m(manifestPath);
      if (fs::is_directory(m)) m /= "manifest.json";
      if (verify) {
        auto stale = verifyPlacement(m, loadCatalog(cat));
        if (!stale.empty()) {
          std::cerr << "arrac: fragments out of date with the catalog:";
          for (auto id : stale) std::cerr << " " << id;
          std::cerr << "\n";
          return Runtime;
        }
      }
      emit(formatArrayFile(reassemble(readPlacement(m))), opt.output);
      return Ok;
    }

    if (*enc) {
      DelimitedTable t = parseDelimitedTable(readTextFile(tablePath), delim);
      std::string name = tableName.empty() ? fs::path(tablePath).stem().string() : tableName;
      if (!qlang::isIdentifier(name)) {
        std::cerr << "arrac: '" << name << "' is not a valid array name\n";
        return Usage;
      }
      EncodedTable et = encodeTable(t.schema, t.rows);
      fs::create_directories(cat);
      saveArray(et.array, catalogPath(cat, name), et.labels);
      writeTextFile(cat / (name + ".schema.json"), schemaToJson(t.schema).dump(2) + "\n");
      std::cerr << "encoded " << name << ": " << t.rows.size() << " rows, "
                << t.schema.columns.size() << " columns\n";
      return Ok;
    }

    if (*dec) {
      ArrayFile f = loadArray(catalogPath(cat, tableName));
      TableSchema s = schemaFromJson(readTextFile(cat / (tableName + ".schema.json")));
      emit(formatDelimitedTable(s, decodeTable(f.array, f.labels, s), delim), opt.output);
      return Ok;
    }
  } catch (const Error& e) {
    return report(e, source);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "arrac: " << e.what() << "\n";
    return Usage;
  }
  return Usage;
}
