#pragma once

// Canonical text for expressions and predicates. parse(print(e)) == e.

#include <string>

#include "arrac/qlang/ast.hpp"
#include "arrac/text_format.hpp"

namespace arrac::qlang {

inline std::string printLiteral(const Value& v) {
  switch (v.tag()) {
    case Value::Tag::Int: return std::to_string(v.asInt());
    case Value::Tag::Float: {
      std::string s = formatFloat(v.asFloat());
      // Keep it lexing as a float.
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      return s;
    }
    case Value::Tag::Str: return quoteString(v.asStr());
    case Value::Tag::Undef: return "undef";
    case Value::Tag::Tuple: {
      std::string out = "tuple(";
      const auto& items = v.asTuple();
      for (std::size_t k = 0; k < items.size(); ++k) {
        if (k > 0) out += ", ";
        out += printLiteral(items[k]);
      }
      return out + ")";
    }
    case Value::Tag::Array: return formatInlineArray(v.asArray());
  }
  return "undef";
}

inline std::string print(const Predicate& p) {
  return std::visit(
      arrac::detail::Overloaded{
          [](const TruePred&) -> std::string { return "true"; },
          [](const ValueCmp& c) -> std::string {
            std::string lhs = "val";
            if (c.component) lhs += "[" + std::to_string(*c.component) + "]";
            return lhs + " " + std::string(cmpOpSymbol(c.op)) + " " + printLiteral(c.constant);
          },
          [](const CoordCmp& c) -> std::string {
            return "dim" + std::to_string(c.dimA) + " " + std::string(cmpOpSymbol(c.op)) + " dim" +
                   std::to_string(c.dimB);
          },
          [](const CoordConst& c) -> std::string {
            return "dim" + std::to_string(c.dim) + " " + std::string(cmpOpSymbol(c.op)) + " " +
                   std::to_string(c.constant);
          },
          [](const AndPred& a) -> std::string {
            if (a.terms.empty()) return "true";
            if (a.terms.size() == 1) return print(a.terms.front());
            std::string out = "(";
            for (std::size_t k = 0; k < a.terms.size(); ++k) {
              if (k > 0) out += " and ";
              out += print(a.terms[k]);
            }
            return out + ")";
          },
          [](const OrPred& o) -> std::string {
            if (o.terms.empty()) return "false";
            if (o.terms.size() == 1) return print(o.terms.front());
            std::string out = "(";
            for (std::size_t k = 0; k < o.terms.size(); ++k) {
              if (k > 0) out += " or ";
              out += print(o.terms[k]);
            }
            return out + ")";
          },
          [](const NotPred& n) -> std::string { return "not " + print(*n.term); },
      },
      p.node);
}

inline std::string printTuple(const Index& i) {
  std::string out = "(";
  for (std::size_t d = 0; d < i.arity(); ++d) {
    if (d > 0) out += ",";
    out += std::to_string(i[d]);
  }
  return out + ")";
}

inline std::string printIndexSet(const IndexSet& s) {
  std::string out = "{";
  bool first = true;
  for (const Index& i : s) {
    if (!first) out += ", ";
    first = false;
    out += printTuple(i);
  }
  return out + "}";
}

inline std::string print(const TransformStep& step) {
  return std::visit(
      arrac::detail::Overloaded{
          [](const Permute& p) {
            std::string out = "permute(";
            for (std::size_t k = 0; k < p.perm.size(); ++k) {
              if (k > 0) out += ",";
              out += std::to_string(p.perm[k]);
            }
            return out + ")";
          },
          [](const Translate& t) {
            return "translate(" + std::to_string(t.dim) + "," + std::to_string(t.offset) + ")";
          },
          [](const InsertDim& s) {
            return "insert(" + std::to_string(s.position) + "," + std::to_string(s.constant) + ")";
          },
          [](const RemoveDim& s) { return "remove(" + std::to_string(s.position) + ")"; },
          [](const Compact& s) { return "compact(" + std::to_string(s.dim) + ")"; },
          [](const Remap& r) {
            std::string out = "remap(" + std::to_string(r.dim) + ", {";
            bool first = true;
            for (const auto& [from, to] : r.table) {
              if (!first) out += ", ";
              first = false;
              out += std::to_string(from) + ":" + std::to_string(to);
            }
            return out + "})";
          },
          [](const Reinsert& r) {
            std::string out = "reinsert(" + std::to_string(r.position) + ", {";
            bool first = true;
            for (const auto& [key, c] : r.table) {
              if (!first) out += ", ";
              first = false;
              out += printTuple(key) + ":" + std::to_string(c);
            }
            return out + "})";
          },
      },
      step);
}

inline std::string print(const TransformSpec& spec) {
  std::string out = "[";
  for (std::size_t k = 0; k < spec.size(); ++k) {
    if (k > 0) out += ", ";
    out += print(spec[k]);
  }
  return out + "]";
}

inline std::string print(const JoinOn& on) {
  std::string out = "on(";
  for (std::size_t k = 0; k < on.size(); ++k) {
    if (k > 0) out += ", ";
    out += std::to_string(on[k].first) + ":" + std::to_string(on[k].second);
  }
  return out + ")";
}

inline std::string print(const Expr& e) {
  return std::visit(
      arrac::detail::Overloaded{
          [](const RefExpr& r) { return r.name; },
          [](const ProjectExpr& p) {
            std::string keep = std::holds_alternative<IndexSet>(p.keep)
                                   ? printIndexSet(std::get<IndexSet>(p.keep))
                                   : print(std::get<Predicate>(p.keep));
            return "project(" + print(*p.input) + ", " + keep + ")";
          },
          [](const SelectExpr& s) {
            return "select(" + print(*s.input) + ", " + print(s.condition) + ")";
          },
          [](const CrossExpr& c) {
            return "cross(" + print(*c.left) + ", " + print(*c.right) + ")";
          },
          [](const TransformExpr& t) {
            return "transform(" + print(*t.input) + ", " + print(t.spec) + ")";
          },
          [](const UnionExpr& u) {
            return "union(" + print(*u.left) + ", " + print(*u.right) + ")";
          },
          [](const JoinExpr& j) {
            const char* name = j.kind == JoinKind::Equi   ? "equijoin"
                               : j.kind == JoinKind::Semi ? "semijoin"
                                                          : "antijoin";
            return std::string(name) + "(" + print(*j.left) + ", " + print(*j.right) + ", " +
                   print(j.on) + ")";
          },
          [](const VPartitionExpr& v) {
            std::string out = "vpartition(" + print(*v.input);
            for (const auto& p : v.predicates) out += ", " + print(p);
            return out + ")";
          },
          [](const HPartitionExpr& h) {
            std::string out = "hpartition(" + print(*h.input) + ", {";
            for (std::size_t k = 0; k < h.slices.size(); ++k) {
              if (k > 0) out += ", ";
              out += "(";
              for (std::size_t j = 0; j < h.slices[k].size(); ++j) {
                if (j > 0) out += ",";
                out += std::to_string(h.slices[k][j]);
              }
              out += ")";
            }
            return out + "})";
          },
          [](const ReassembleExpr& r) { return "reassemble(" + print(*r.placement) + ")"; },
          [](const FragmentExpr& f) {
            return "fragment(" + print(*f.placement) + ", " + std::to_string(f.id) + ")";
          },
      },
      e.node);
}

}  // namespace arrac::qlang
