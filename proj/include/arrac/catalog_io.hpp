#pragma once

// On-disk catalog (a directory of <name>.arr files) and placement manifests.
//
// A placement directory holds one canonical array file per fragment and a
// manifest.json describing the scheme. Each fragment entry records the query
// text that defines it in terms of the source array, so a placement is an
// algebraic view that can be re-evaluated against the catalog.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "arrac/distribution.hpp"
#include "arrac/qlang/eval.hpp"
#include "arrac/qlang/parser.hpp"
#include "arrac/qlang/printer.hpp"
#include "arrac/text_format.hpp"

namespace arrac {

inline std::filesystem::path catalogPath(const std::filesystem::path& dir, const std::string& name) {
  return dir / (name + ".arr");
}

/// Loads every `<identifier>.arr` file in `dir`. Other files are ignored.
inline qlang::Catalog loadCatalog(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::IoError, "catalog directory " + dir.string() + " does not exist");
  }
  qlang::Catalog cat;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".arr" &&
        qlang::isIdentifier(entry.path().stem().string())) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      cat.bind(f.stem().string(), loadArray(f).array);
    } catch (Error& e) {
      throw Error(e.code(), f.filename().string() + ": " + e.detail(), e.witness(), e.location());
    }
  }
  return cat;
}

struct ManifestFragment {
  std::size_t id = 0;
  std::size_t shard = 0;
  std::string file;        // relative to the manifest's directory
  std::string expression;  // query text defining the fragment from the source
};

struct PlacementManifest {
  std::string source;
  std::string scheme;  // "vertical" or "horizontal"
  std::size_t originArity = 0;
  std::size_t tupleArity = 0;                       // horizontal only
  std::vector<std::string> predicates;              // vertical only
  std::vector<std::vector<std::size_t>> slices;     // horizontal only
  std::vector<ManifestFragment> fragments;
};

namespace detail {

inline std::string schemeExpression(const std::string& source, const PartitionScheme& scheme) {
  qlang::Expr src = qlang::ref(source);
  if (const auto* v = std::get_if<VerticalSplit>(&scheme)) {
    return qlang::print(qlang::Expr{qlang::VPartitionExpr{src, v->predicates}});
  }
  const auto& h = std::get<HorizontalSplit>(scheme);
  return qlang::print(qlang::Expr{qlang::HPartitionExpr{src, h.slices}});
}

}  // namespace detail

/// Describes `p` as a manifest whose fragments are defined over `source`.
inline PlacementManifest describePlacement(const Placement& p, const std::string& source) {
  PlacementManifest m;
  m.source = source;
  m.originArity = p.originArity;
  std::string partition = detail::schemeExpression(source, p.scheme);
  if (const auto* v = std::get_if<VerticalSplit>(&p.scheme)) {
    m.scheme = "vertical";
    for (const auto& pred : v->predicates) m.predicates.push_back(qlang::print(pred));
  } else {
    const auto& h = std::get<HorizontalSplit>(p.scheme);
    m.scheme = "horizontal";
    m.tupleArity = h.tupleArity;
    m.slices = h.slices;
  }
  for (const auto& f : p.fragments) {
    ManifestFragment mf;
    mf.id = f.id;
    mf.shard = f.shard;
    mf.file = source + ".frag" + std::to_string(f.id) + ".arr";
    if (m.scheme == "vertical") {
      mf.expression = "select(" + source + ", " + m.predicates.at(f.id) + ")";
    } else {
      mf.expression = "fragment(" + partition + ", " + std::to_string(f.id) + ")";
    }
    m.fragments.push_back(std::move(mf));
  }
  return m;
}

inline std::string manifestToJson(const PlacementManifest& m) {
  nlohmann::ordered_json j;
  j["format"] = "arrac-placement v1";
  j["source"] = m.source;
  j["scheme"] = m.scheme;
  j["origin_arity"] = m.originArity;
  if (m.scheme == "vertical") {
    j["predicates"] = m.predicates;
  } else {
    j["tuple_arity"] = m.tupleArity;
    j["slices"] = m.slices;
  }
  auto frags = nlohmann::ordered_json::array();
  for (const auto& f : m.fragments) {
    nlohmann::ordered_json fj;
    fj["id"] = f.id;
    fj["shard"] = f.shard;
    fj["file"] = f.file;
    fj["expression"] = f.expression;
    frags.push_back(std::move(fj));
  }
  j["fragments"] = std::move(frags);
  return j.dump(2) + "\n";
}

inline PlacementManifest manifestFromJson(std::string_view text) {
  PlacementManifest m;
  try {
    auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "arrac-placement v1") {
      throw Error(ErrorCode::FormatError, "unsupported manifest format");
    }
    m.source = j.at("source").get<std::string>();
    m.scheme = j.at("scheme").get<std::string>();
    m.originArity = j.at("origin_arity").get<std::size_t>();
    if (m.scheme == "vertical") {
      m.predicates = j.at("predicates").get<std::vector<std::string>>();
    } else if (m.scheme == "horizontal") {
      m.tupleArity = j.at("tuple_arity").get<std::size_t>();
      m.slices = j.at("slices").get<std::vector<std::vector<std::size_t>>>();
    } else {
      throw Error(ErrorCode::FormatError, "unknown scheme '" + m.scheme + "'");
    }
    for (const auto& fj : j.at("fragments")) {
      ManifestFragment f;
      f.id = fj.at("id").get<std::size_t>();
      f.shard = fj.at("shard").get<std::size_t>();
      f.file = fj.at("file").get<std::string>();
      f.expression = fj.at("expression").get<std::string>();
      m.fragments.push_back(std::move(f));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("manifest: ") + e.what());
  }
  return m;
}

/// Writes fragment files and manifest.json into `dir` (created if needed).
inline PlacementManifest writePlacement(const Placement& p, const std::string& source,
                                        const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  PlacementManifest m = describePlacement(p, source);
  for (std::size_t k = 0; k < p.fragments.size(); ++k) {
    saveArray(p.fragments[k].data, dir / m.fragments[k].file);
  }
  writeTextFile(dir / "manifest.json", manifestToJson(m));
  return m;
}

/// Rebuilds a Placement from a manifest and its fragment files; the source
/// array is not needed.
inline Placement readPlacement(const std::filesystem::path& manifestPath) {
  PlacementManifest m = manifestFromJson(readTextFile(manifestPath));
  auto dir = manifestPath.parent_path();
  Placement p{{}, VerticalSplit{}, m.originArity};
  if (m.scheme == "vertical") {
    VerticalSplit v;
    for (const auto& text : m.predicates) v.predicates.push_back(qlang::parsePredicate(text));
    p.scheme = std::move(v);
  } else {
    p.scheme = HorizontalSplit{m.slices, m.tupleArity};
  }
  for (const auto& f : m.fragments) {
    try {
      p.fragments.push_back({f.id, loadArray(dir / f.file).array, f.shard});
    } catch (Error& e) {
      throw Error(e.code(), f.file + ": " + e.detail(), e.witness(), e.location());
    }
  }
  std::sort(p.fragments.begin(), p.fragments.end(),
            [](const Fragment& a, const Fragment& b) { return a.id < b.id; });
  return p;
}

/// Re-evaluates every fragment expression against `cat` and returns the ids
/// of fragments whose stored array differs.
inline std::vector<std::size_t> verifyPlacement(const std::filesystem::path& manifestPath,
                                                const qlang::Catalog& cat) {
  PlacementManifest m = manifestFromJson(readTextFile(manifestPath));
  auto dir = manifestPath.parent_path();
  std::vector<std::size_t> stale;
  for (const auto& f : m.fragments) {
    Array expected = qlang::evaluate(qlang::parse(f.expression), cat);
    if (!arrayEquals(expected, loadArray(dir / f.file).array)) stale.push_back(f.id);
  }
  return stale;
}

}  // namespace arrac
