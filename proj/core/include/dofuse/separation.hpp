#pragma once

#include <optional>
#include <vector>

#include "dofuse/graph.hpp"

namespace dofuse {

/// X _||_ Y | Z, with left < right in the deduplicated enumeration output.
struct IndependenceStatement {
  VertexSet left;
  VertexSet right;
  VertexSet given;

  bool operator==(const IndependenceStatement&) const = default;
  auto operator<=>(const IndependenceStatement&) const = default;
};

/// True iff z blocks every path between x and y. Paths may traverse edges
/// in any orientation; a bidirected edge contributes an arrowhead at both
/// endpoints. Implemented by ball-passing reachability over the
/// latent-expanded graph, linear in edges.
bool d_separated(const Graph& g, const VertexSet& x, const VertexSet& y,
                 const VertexSet& z);

/// All minimal statements {a} _||_ {b} | Z over endogenous vertices with
/// |Z| <= max_given. A statement is reported only if no proper subset of
/// its separator also works, and symmetry duplicates are dropped (a < b).
std::vector<IndependenceStatement> implied_independencies(const Graph& g,
                                                          size_t max_given);

/// Lexicographically-first minimum-cardinality subset of candidates
/// d-separating x from y, searched exhaustively up to max_size.
std::optional<VertexSet> find_separator(const Graph& g, const VertexSet& x,
                                        const VertexSet& y,
                                        const VertexSet& candidates,
                                        size_t max_size);

}  // namespace dofuse
