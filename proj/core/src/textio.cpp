#include "dofuse/textio.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <vector>

namespace dofuse {

namespace {

std::vector<std::string> tokenize_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  // Rejoin comma lists split by whitespace ("Z, W" -> "Z,W") so callers see
  // one token per list regardless of spacing.
  std::vector<std::string> merged;
  for (auto& t : out) {
    if (!merged.empty() && (merged.back().back() == ',' || t.front() == ','))
      merged.back() += t;
    else
      merged.push_back(std::move(t));
  }
  return merged;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return s;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
      return false;
  return true;
}

VertexSet split_names(const std::string& csv, int line) {
  VertexSet out;
  std::string cur;
  std::stringstream ss(csv);
  while (std::getline(ss, cur, ',')) {
    if (!valid_name(cur)) throw ParseError(line, "bad variable name '" + cur + "'");
    out.insert(upper(cur));
  }
  if (out.empty()) throw ParseError(line, "empty variable list");
  return out;
}

}  // namespace

Graph parse_graph(const std::string& text) {
  Graph g;
  std::stringstream ss(text);
  std::string line;
  int ln = 0;
  auto declared = [&](const std::string& v) { return g.has_vertex(v); };
  while (std::getline(ss, line)) {
    ++ln;
    auto tok = tokenize_line(line);
    if (tok.empty()) continue;
    try {
      if (tok[0] == "var" || tok[0] == "select" || tok[0] == "snode") {
        if (tok.size() < 2) throw ParseError(ln, "expected vertex names");
        if (tok[0] != "var" && tok.size() != 2)
          throw ParseError(ln, "'" + tok[0] + "' declares one vertex");
        VertexKind kind = tok[0] == "var"      ? VertexKind::Endogenous
                          : tok[0] == "select" ? VertexKind::Selection
                                               : VertexKind::Discrepancy;
        for (size_t i = 1; i < tok.size(); ++i) {
          for (const auto& name : split_names(tok[i], ln)) {
            if (declared(name))
              throw ParseError(ln, "duplicate vertex '" + name + "'");
            g.add_vertex(name, kind);
          }
        }
      } else if (tok.size() == 3 && (tok[1] == "->" || tok[1] == "<->")) {
        std::string a = upper(tok[0]), b = upper(tok[2]);
        if (!declared(a)) throw ParseError(ln, "undeclared vertex '" + a + "'");
        if (!declared(b)) throw ParseError(ln, "undeclared vertex '" + b + "'");
        if (tok[1] == "->")
          g.add_edge(a, b);
        else
          g.add_bidirected(a, b);
      } else {
        throw ParseError(ln, "unrecognized line");
      }
    } catch (const GraphError& err) {
      throw ParseError(ln, err.what());
    }
  }
  try {
    validated(g);
  } catch (const GraphError& err) {
    throw ParseError(ln, err.what());
  }
  return g;
}

std::string print_graph(const Graph& g) {
  std::ostringstream out;
  VertexSet endo = g.endogenous();
  if (!endo.empty()) {
    out << "var";
    for (const auto& v : endo) out << ' ' << v;
    out << '\n';
  }
  for (const auto& v : g.selection_vertices()) out << "select " << v << '\n';
  for (const auto& v : g.discrepancy_vertices()) out << "snode " << v << '\n';
  for (const auto& [a, b] : g.directed_edges()) out << a << " -> " << b << '\n';
  for (const auto& [a, b] : g.bidirected_edges())
    out << a << " <-> " << b << '\n';
  return out.str();
}

SourceCatalog parse_sources(const std::string& text, const Graph& g) {
  SourceCatalog cat;
  std::stringstream ss(text);
  std::string line;
  int ln = 0;
  while (std::getline(ss, line)) {
    ++ln;
    auto tok = tokenize_line(line);
    if (tok.empty()) continue;

    Source s;
    s.measured = g.endogenous();
    size_t i = 1;
    if (tok[0] == "obs") {
      s.experimental = false;
    } else if (tok[0] == "exp" || tok[0] == "marginal") {
      if (tok.size() < 2)
        throw ParseError(ln, "'" + tok[0] + "' needs a variable list");
      VertexSet vars = split_names(tok[1], ln);
      for (const auto& v : vars)
        if (!g.has_vertex(v) || g.kind(v) != VertexKind::Endogenous)
          throw ParseError(ln, "'" + v + "' is not an endogenous vertex");
      if (tok[0] == "exp") {
        s.experimental = true;
        s.intervened = vars;
      } else {
        s.experimental = false;
        s.measured = vars;
      }
      i = 2;
    } else {
      throw ParseError(ln, "expected obs, exp, or marginal");
    }

    bool domain_given = false;
    for (; i < tok.size(); ++i) {
      const std::string& t = tok[i];
      if (t == "selected") {
        s.selected = true;
      } else if (t.rfind("domain=", 0) == 0) {
        s.domain = t.substr(7);
        if (s.domain.empty()) throw ParseError(ln, "empty domain label");
        domain_given = true;
      } else if (t.rfind("measured=", 0) == 0) {
        s.measured = split_names(t.substr(9), ln);
        for (const auto& v : s.measured)
          if (!g.has_vertex(v) || g.kind(v) != VertexKind::Endogenous)
            throw ParseError(ln, "'" + v + "' is not an endogenous vertex");
      } else if (t.rfind("snodes=", 0) == 0) {
        s.discrepancies = split_names(t.substr(7), ln);
        for (const auto& v : s.discrepancies)
          if (!g.has_vertex(v) || g.kind(v) != VertexKind::Discrepancy)
            throw ParseError(ln, "'" + v + "' is not a discrepancy vertex");
      } else {
        throw ParseError(ln, "unrecognized option '" + t + "'");
      }
    }
    if (s.selected && g.selection_vertices().empty())
      throw ParseError(ln, "diagram has no selection vertex");
    // A distinct population (snodes=) without an explicit label is the
    // anonymous source; everything else defaults to the target domain.
    if (!domain_given) s.domain = s.discrepancies.empty() ? kTargetDomain : "";
    cat.sources.push_back(std::move(s));
  }
  if (cat.sources.empty()) throw ParseError(ln, "no sources given");
  return cat;
}

}  // namespace dofuse
