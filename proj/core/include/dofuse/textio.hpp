#pragma once

#include <stdexcept>
#include <string>

#include "dofuse/estimand.hpp"
#include "dofuse/graph.hpp"

namespace dofuse {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& reason)
      : std::runtime_error("line " + std::to_string(line) + ": " + reason),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Line-oriented graph description: `var A B C`, `select S`, `snode S1`,
/// `A -> B`, `A <-> B`; `#` starts a comment. Edge endpoints must be
/// declared first. The result is validated.
Graph parse_graph(const std::string& text);

/// Inverse of parse_graph up to graph equality; deterministic layout.
std::string print_graph(const Graph& g);

/// Line-oriented source catalogue, resolved against the graph:
///   obs [selected] [domain=a] [measured=V1,V2] [snodes=S1,S2]
///   exp Z1,Z2 [selected] [domain=b] [measured=...] [snodes=...]
///   marginal Z,W [domain=a]
/// measured defaults to every endogenous vertex; domain defaults to the
/// target unless snodes= marks the source as a distinct population, in
/// which case it defaults to the anonymous source label.
SourceCatalog parse_sources(const std::string& text, const Graph& g);

}  // namespace dofuse
