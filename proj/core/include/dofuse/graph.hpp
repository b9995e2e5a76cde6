#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dofuse {

/// Kinds of vertices in a causal diagram. Selection vertices model
/// preferential inclusion into the sample (sink-only); discrepancy vertices
/// mark where two populations may differ structurally (source-only).
enum class VertexKind { Endogenous, Selection, Discrepancy };

using VertexSet = std::set<std::string>;

struct Vertex {
  std::string name;
  VertexKind kind = VertexKind::Endogenous;
};

class GraphError : public std::runtime_error {
 public:
  GraphError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct Violation {
  std::string code;    // CycleDetected, BadSelectionVertex, ...
  std::string detail;  // human-readable location
};

/// Acyclic directed mixed graph. Bidirected edges are primitive and stand
/// for a latent common cause of their two endpoints. Values are cheap to
/// copy; all operations below return fresh graphs.
class Graph {
 public:
  void add_vertex(const std::string& name,
                  VertexKind kind = VertexKind::Endogenous);
  void add_edge(const std::string& from, const std::string& to);
  void add_bidirected(const std::string& a, const std::string& b);

  bool has_vertex(const std::string& name) const;
  VertexKind kind(const std::string& name) const;
  bool has_edge(const std::string& from, const std::string& to) const;
  bool has_bidirected(const std::string& a, const std::string& b) const;

  /// All vertex names, sorted.
  std::vector<std::string> vertex_names() const;
  VertexSet vertices_of_kind(VertexKind k) const;
  VertexSet endogenous() const { return vertices_of_kind(VertexKind::Endogenous); }
  VertexSet selection_vertices() const { return vertices_of_kind(VertexKind::Selection); }
  VertexSet discrepancy_vertices() const { return vertices_of_kind(VertexKind::Discrepancy); }

  VertexSet parents(const std::string& v) const;
  VertexSet children(const std::string& v) const;
  /// Vertices joined to v by a bidirected edge.
  VertexSet siblings(const std::string& v) const;

  const std::set<std::pair<std::string, std::string>>& directed_edges() const {
    return directed_;
  }
  /// Normalized so that first < second.
  const std::set<std::pair<std::string, std::string>>& bidirected_edges() const {
    return bidirected_;
  }

  size_t vertex_count() const { return kinds_.size(); }

  bool operator==(const Graph& other) const = default;

 private:
  std::map<std::string, VertexKind> kinds_;
  std::set<std::pair<std::string, std::string>> directed_;
  std::set<std::pair<std::string, std::string>> bidirected_;
};

/// Checks every structural invariant; empty result means the graph is valid.
std::vector<Violation> validate(const Graph& g);

/// validate() that throws a GraphError naming the first violation.
const Graph& validated(const Graph& g);

/// Removes every edge into cut_incoming (directed or bidirected; a
/// bidirected edge carries an arrowhead at both endpoints) and every
/// directed edge out of cut_outgoing.
Graph mutilate(const Graph& g, const VertexSet& cut_incoming,
               const VertexSet& cut_outgoing = {});

/// Reflexive-transitive closure against edge direction: s and everything
/// with a directed path into s.
VertexSet ancestors(const Graph& g, const VertexSet& s);
/// Reflexive-transitive closure along edge direction.
VertexSet descendants(const Graph& g, const VertexSet& s);

/// Directed part flipped; bidirected edges kept as-is.
Graph reversed(const Graph& g);

/// Deterministic topological order (lexicographic tie-break).
std::vector<std::string> topological_order(const Graph& g);

void require_vertices(const Graph& g, const VertexSet& s);

}  // namespace dofuse
