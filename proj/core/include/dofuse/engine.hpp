#pragma once

#include <optional>

#include "dofuse/criteria.hpp"
#include "dofuse/estimand.hpp"
#include "dofuse/graph.hpp"

namespace dofuse {

/// d-separation statement together with the mutilation it must hold in;
/// empty sets everywhere for pure probability-axiom steps.
struct Premise {
  VertexSet x, y, z;
  VertexSet cut_incoming, cut_outgoing;

  bool trivial() const { return x.empty() || y.empty(); }
  bool operator==(const Premise&) const = default;
};

struct RewriteStep {
  std::string rule;  // Rule1, Rule2, Rule3, Condition, Marginalize,
                     // ChainSplit, CancelQuotient, DomainExchange,
                     // SelectionAttach
  std::string focus;       // rendered form of the rewritten term
  bool has_premise = false;
  Premise premise;
  ExprPtr before;          // whole expression, canonical
  ExprPtr after;
};

struct Derivation {
  Query query;
  std::vector<RewriteStep> steps;
  ExprPtr final;
};

struct SearchBudget {
  int max_steps = 12;
  int max_term_width = 8;
  int max_states = 200000;
};

enum class DeriveStatus { Derived, NotDerivedWithinBudget, ProvablyNot };

struct DeriveResult {
  DeriveStatus status = DeriveStatus::NotDerivedWithinBudget;
  Derivation derivation;  // meaningful only when Derived
  std::string route;      // criterion shortcut or "search"
  std::string reason;     // explanation for non-Derived results
};

/// Do-calculus rule applicability on a single term. The term's selected
/// flag contributes the graph's selection vertices to the conditioning
/// side of each premise; primes are stripped before consulting the graph.
bool applicable_rule1(const ProbTerm& term, const Graph& g, const VertexSet& z);
bool applicable_rule2(const ProbTerm& term, const Graph& g, const VertexSet& z);
bool applicable_rule3(const ProbTerm& term, const Graph& g, const VertexSet& z);

/// Bounded best-first search from the query toward an expression whose
/// every term the catalogue can estimate. ProvablyNot is returned only for
/// do-free queries against an all-selected catalogue whose recoverability
/// test (y ⫫ S | conditions) fails; causal failures are always
/// NotDerivedWithinBudget.
DeriveResult derive(const Query& q, const Graph& g, const SourceCatalog& cat,
                    const SearchBudget& budget = {});

struct VerifyResult {
  bool ok = false;
  int failing_step = -1;  // index of the first bad step, -1 when ok
  std::string message;
};

/// Independent re-check: the chain starts at the canonical query, each
/// step's before matches the previous after, the final expression matches,
/// and every premise holds under a fresh d-separation computation in the
/// stored mutilation.
VerifyResult verify(const Derivation& d, const Graph& g);

/// Façades: try the matching criterion shortcuts first (emitting scripted
/// derivations whose steps are ordinary rule applications), then fall back
/// to search.
DeriveResult identify(const Graph& g, const Query& q, const SourceCatalog& cat,
                      const SearchBudget& budget = {});
DeriveResult recover(const Graph& g, const Query& q, const SourceCatalog& cat,
                     const SearchBudget& budget = {});
DeriveResult transport(const Graph& g, const Query& q, const SourceCatalog& cat,
                       const SearchBudget& budget = {});

std::string derivation_to_json(const Derivation& d);
Derivation derivation_from_json(const std::string& text);

}  // namespace dofuse
