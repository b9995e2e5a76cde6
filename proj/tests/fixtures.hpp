#pragma once

#include "dofuse/estimand.hpp"
#include "dofuse/graph.hpp"
#include "dofuse/oracle.hpp"

namespace fixtures {

using namespace dofuse;

// Five-variable observational chain/fork benchmark for CI enumeration.
inline Graph chain_fork() {
  Graph g;
  for (auto v : {"A", "B", "C", "D", "E"}) g.add_vertex(v);
  g.add_edge("A", "D");
  g.add_edge("B", "C");
  g.add_edge("B", "D");
  g.add_edge("D", "E");
  return validated(g);
}

// Cholesterol-style graph: two confounded covariates, one mediator chain.
inline Graph diet_graph() {
  Graph g;
  for (auto v : {"C", "Y", "W", "H", "E"}) g.add_vertex(v);
  g.add_edge("C", "Y");
  g.add_edge("C", "W");
  g.add_edge("W", "H");
  g.add_edge("W", "Y");
  g.add_edge("H", "Y");
  g.add_edge("E", "C");
  g.add_edge("E", "Y");
  g.add_bidirected("W", "Y");
  g.add_bidirected("C", "E");
  return validated(g);
}

// Dense backdoor benchmark with exactly eleven admissible sets.
inline Graph backdoor_maze() {
  Graph g;
  g.add_vertex("X");
  g.add_vertex("Y");
  for (auto v : {"W1", "W2", "W3", "W4", "W5", "W6"}) g.add_vertex(v);
  g.add_edge("X", "W6");
  g.add_edge("W2", "X");
  g.add_edge("W2", "W3");
  g.add_edge("W3", "W1");
  g.add_edge("W3", "W5");
  g.add_edge("W6", "Y");
  g.add_edge("W4", "W3");
  g.add_edge("W4", "Y");
  g.add_edge("W5", "W6");
  g.add_edge("W5", "Y");
  g.add_bidirected("X", "W1");
  g.add_bidirected("W2", "W3");
  g.add_bidirected("W1", "Y");
  g.add_bidirected("W6", "Y");
  return validated(g);
}

// Mediator with confounded treatment-outcome pair; frontdoor territory.
inline Graph mediator_graph() {
  Graph g;
  for (auto v : {"X", "M", "Y", "W1", "W2", "W3"}) g.add_vertex(v);
  g.add_edge("X", "M");
  g.add_edge("M", "Y");
  g.add_edge("W2", "X");
  g.add_edge("W2", "M");
  g.add_edge("W1", "X");
  g.add_edge("W1", "Y");
  g.add_edge("W3", "M");
  g.add_edge("W3", "Y");
  g.add_bidirected("X", "Y");
  return validated(g);
}

// Surrogate-experiment graph: experiments on Z unlock P(y|do(x)).
inline Graph surrogate_graph() {
  Graph g;
  for (auto v : {"X", "Y", "Z", "W1", "W2"}) g.add_vertex(v);
  g.add_edge("W1", "Z");
  g.add_edge("Z", "X");
  g.add_edge("X", "Y");
  g.add_edge("W2", "X");
  g.add_edge("W2", "Y");
  g.add_edge("W1", "Y");
  g.add_bidirected("Z", "X");
  g.add_bidirected("Z", "Y");
  g.add_bidirected("W1", "X");
  return validated(g);
}

// Minimal non-z-identifiable instrument graph.
inline Graph instrument_graph() {
  Graph g;
  for (auto v : {"X", "Y", "Z"}) g.add_vertex(v);
  g.add_edge("Z", "X");
  g.add_edge("X", "Y");
  g.add_bidirected("X", "Y");
  return validated(g);
}

// Surrogate + frontdoor combination: experiments on Z, mediator W2.
inline Graph surrogate_mediator_graph() {
  Graph g;
  for (auto v : {"X", "Y", "Z", "W1", "W2", "W3"}) g.add_vertex(v);
  g.add_edge("Z", "W1");
  g.add_edge("W1", "X");
  g.add_edge("X", "W2");
  g.add_edge("W2", "Y");
  g.add_edge("W3", "X");
  g.add_edge("W3", "Y");
  g.add_bidirected("Z", "X");
  g.add_bidirected("X", "Y");
  g.add_bidirected("Z", "W2");
  g.add_bidirected("Z", "Y");
  g.add_bidirected("W1", "X");
  g.add_bidirected("W1", "W3");
  return validated(g);
}

// Selection on a confounder plus a latent cause shared with the outcome:
// unrecoverable. U is a modeled but unmeasured endogenous vertex standing
// for the latent common cause of Y and sample inclusion.
inline Graph selection_confounded() {
  Graph g;
  for (auto v : {"X", "Y", "Z", "U"}) g.add_vertex(v);
  g.add_vertex("S", VertexKind::Selection);
  g.add_edge("X", "Y");
  g.add_edge("Z", "X");
  g.add_edge("Z", "Y");
  g.add_edge("Z", "S");
  g.add_edge("U", "Y");
  g.add_edge("U", "S");
  return validated(g);
}

// Selection driven by treatment only: conditional is directly recoverable.
inline Graph selection_on_treatment() {
  Graph g;
  g.add_vertex("X");
  g.add_vertex("Y");
  g.add_vertex("S", VertexKind::Selection);
  g.add_edge("X", "Y");
  g.add_edge("X", "S");
  return validated(g);
}

// Selection reachable only through pre-treatment covariates.
inline Graph selection_pretreatment() {
  Graph g;
  for (auto v : {"X", "Y", "Z", "W1", "W2", "W3"}) g.add_vertex(v);
  g.add_vertex("S", VertexKind::Selection);
  g.add_edge("X", "Y");
  g.add_edge("Z", "W3");
  g.add_edge("Z", "Y");
  g.add_edge("W1", "W2");
  g.add_edge("W1", "W3");
  g.add_edge("W2", "X");
  g.add_edge("W3", "X");
  g.add_edge("W1", "S");
  g.add_bidirected("W1", "W2");
  g.add_bidirected("Z", "Y");
  return validated(g);
}

// Selection off a treatment cause; adjustment inside the biased sample.
inline Graph selection_on_cause() {
  Graph g;
  for (auto v : {"X", "Y", "Z", "W"}) g.add_vertex(v);
  g.add_vertex("S", VertexKind::Selection);
  g.add_edge("X", "Y");
  g.add_edge("Z", "X");
  g.add_edge("W", "X");
  g.add_edge("W", "Z");
  g.add_edge("W", "S");
  g.add_bidirected("Z", "Y");
  return validated(g);
}

// Selection needing an unbiased joint covariate marginal.
inline Graph selection_two_covariates() {
  Graph g;
  for (auto v : {"X", "Y", "Z", "W"}) g.add_vertex(v);
  g.add_vertex("S", VertexKind::Selection);
  g.add_edge("X", "Y");
  g.add_edge("Z", "X");
  g.add_edge("Z", "Y");
  g.add_edge("W", "S");
  g.add_edge("W", "Y");
  g.add_edge("Z", "S");
  return validated(g);
}

// Transport with a discrepant pre-treatment covariate.
inline Graph transport_covariate() {
  Graph g;
  for (auto v : {"X", "Y", "Z"}) g.add_vertex(v);
  g.add_vertex("S", VertexKind::Discrepancy);
  g.add_edge("X", "Y");
  g.add_edge("Z", "X");
  g.add_edge("Z", "Y");
  g.add_edge("S", "Z");
  g.add_bidirected("X", "Z");
  g.add_bidirected("X", "Y");
  return validated(g);
}

// Discrepancy only on the treatment: effects transport directly.
inline Graph transport_direct() {
  Graph g;
  g.add_vertex("X");
  g.add_vertex("Y");
  g.add_vertex("S", VertexKind::Discrepancy);
  g.add_edge("X", "Y");
  g.add_edge("S", "X");
  g.add_bidirected("X", "Y");
  return validated(g);
}

// As transport_covariate but the covariate is confounded with the
// outcome: not transportable.
inline Graph transport_blocked() {
  Graph g = transport_covariate();
  g.add_bidirected("Z", "Y");
  return validated(g);
}

// Discrepant post-treatment mediator; separator is conditioned on x.
inline Graph transport_mediator() {
  Graph g;
  for (auto v : {"X", "Y", "Z"}) g.add_vertex(v);
  g.add_vertex("S", VertexKind::Discrepancy);
  g.add_edge("X", "Z");
  g.add_edge("Z", "Y");
  g.add_edge("X", "Y");
  g.add_edge("S", "Z");
  g.add_bidirected("X", "Y");
  return validated(g);
}

// Two discrepant sources with limited target measurements.
inline Graph transport_two_sources() {
  Graph g;
  for (auto v : {"X", "Y", "Z", "W1", "W2", "W3"}) g.add_vertex(v);
  for (auto v : {"SA", "SB"}) g.add_vertex(v, VertexKind::Discrepancy);
  g.add_edge("SB", "W3");
  g.add_edge("SA", "W1");
  g.add_edge("X", "Z");
  g.add_edge("Z", "Y");
  g.add_edge("W1", "X");
  g.add_edge("W1", "W2");
  g.add_edge("W2", "Z");
  g.add_edge("W3", "Z");
  g.add_edge("W3", "Y");
  g.add_bidirected("X", "Y");
  g.add_bidirected("X", "W1");
  g.add_bidirected("W1", "W2");
  g.add_bidirected("X", "Z");
  return validated(g);
}

// Two experimental populations jointly covering {X} and {X,Z}.
inline Graph fusion_graph() {
  Graph g;
  for (auto v : {"X", "Y", "Z"}) g.add_vertex(v);
  for (auto v : {"S1", "S2", "S3", "S4"}) g.add_vertex(v, VertexKind::Discrepancy);
  g.add_edge("X", "Z");
  g.add_edge("Z", "Y");
  g.add_edge("X", "Y");
  g.add_bidirected("X", "Y");
  g.add_bidirected("X", "Z");
  g.add_edge("S1", "X");
  g.add_edge("S2", "Y");
  g.add_edge("S3", "X");
  g.add_edge("S4", "Z");
  return validated(g);
}

// --- Catalogues ------------------------------------------------------------

inline SourceCatalog observational(const Graph& g) {
  Source s;
  s.domain = kTargetDomain;
  s.measured = g.endogenous();
  return SourceCatalog{{s}};
}

inline SourceCatalog selected_only(const Graph& g) {
  Source s;
  s.domain = kTargetDomain;
  s.selected = true;
  s.measured = g.endogenous();
  return SourceCatalog{{s}};
}

inline SourceCatalog selected_plus_marginal(const Graph& g,
                                            const VertexSet& marginal) {
  SourceCatalog cat = selected_only(g);
  Source m;
  m.domain = kTargetDomain;
  m.measured = marginal;
  cat.sources.push_back(m);
  return cat;
}

inline SourceCatalog with_experiment(SourceCatalog cat, const Graph& g,
                                     const VertexSet& z) {
  Source e;
  e.domain = kTargetDomain;
  e.experimental = true;
  e.intervened = z;
  e.measured = g.endogenous();
  cat.sources.push_back(e);
  return cat;
}

/// Anonymous experimental source population plus target observations
/// restricted to `target_measured`.
inline SourceCatalog transport_catalog(const Graph& g, const VertexSet& x,
                                       const VertexSet& snodes,
                                       const VertexSet& target_measured) {
  Source src;
  src.domain = "";
  src.experimental = true;
  src.intervened = x;
  src.measured = g.endogenous();
  src.discrepancies = snodes;
  Source tgt;
  tgt.domain = kTargetDomain;
  tgt.measured = target_measured;
  return SourceCatalog{{src, tgt}};
}

/// Two experimental populations for fusion_graph: a intervenes on X only,
/// b on X and Z.
inline SourceCatalog fusion_catalog(const Graph& g) {
  Source a;
  a.domain = "a";
  a.experimental = true;
  a.intervened = {"X"};
  a.measured = g.endogenous();
  a.discrepancies = {"S1", "S2"};
  Source b;
  b.domain = "b";
  b.experimental = true;
  b.intervened = {"X", "Z"};
  b.measured = g.endogenous();
  b.discrepancies = {"S3", "S4"};
  return SourceCatalog{{a, b}};
}

// --- Oracle worlds ----------------------------------------------------------

/// One world per domain; non-target domains are resampled at the children
/// of their discrepancy vertices. Mirrors the CLI validation harness.
inline WorldMap make_worlds(const Graph& g, const SourceCatalog& cat,
                            const ExprPtr& expr, uint64_t seed) {
  Scm base = random_scm(g, 2, seed);
  std::set<std::string> domains = domains_mentioned(expr);
  domains.insert(kTargetDomain);
  WorldMap worlds;
  uint64_t salt = 1;
  for (const auto& d : domains) {
    if (d == kTargetDomain) {
      worlds[d] = base;
      continue;
    }
    VertexSet targets;
    for (const auto& s : cat.sources)
      if (s.domain == d)
        for (const auto& sv : s.discrepancies)
          for (const auto& c : g.children(sv)) targets.insert(c);
    worlds[d] = domain_variant(base, targets, seed * 2654435761ULL + salt);
    ++salt;
  }
  return worlds;
}

}  // namespace fixtures
