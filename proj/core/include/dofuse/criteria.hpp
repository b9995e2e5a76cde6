#pragma once

#include <optional>

#include "dofuse/estimand.hpp"
#include "dofuse/graph.hpp"

namespace dofuse {

struct AdjustmentReport {
  std::vector<VertexSet> admissible_sets;
  std::vector<VertexSet> minimal_sets;  // no member is a superset of another
  std::string criterion;
};

/// z contains no descendant of x and blocks every backdoor path, i.e.
/// d-separates x from y once the arrows x emits are deleted.
bool backdoor_admissible(const Graph& g, const VertexSet& x, const VertexSet& y,
                         const VertexSet& z);

/// Exhaustive scan of all subsets of universe, deterministic order (by
/// cardinality, then lexicographic member lists).
AdjustmentReport enumerate_backdoor_sets(const Graph& g, const VertexSet& x,
                                         const VertexSet& y,
                                         const VertexSet& universe);

/// Σ_z P(y|x,z) P(z), canonicalized. Throws NotAdmissible.
ExprPtr backdoor_estimand(const Graph& g, const VertexSet& x,
                          const VertexSet& y, const VertexSet& z);

/// Conditional frontdoor: z intercepts every directed x→y path, w blocks
/// every backdoor path from x to z, and x∪w blocks every backdoor path
/// from z to y.
bool frontdoor_admissible(const Graph& g, const VertexSet& x,
                          const VertexSet& y, const VertexSet& z,
                          const VertexSet& w);

/// Σ_{z,w} P(z|w,x) P(w) Σ_{x'} P(y|w,z,x') P(x'|w), canonicalized.
ExprPtr frontdoor_estimand(const Graph& g, const VertexSet& x,
                           const VertexSet& y, const VertexSet& z,
                           const VertexSet& w);

/// Outcome of a z-identification shortcut: the surrogate subset actually
/// intervened on, the adjustment/mediator sets used, and the estimand.
struct ZidResult {
  VertexSet z_used;
  VertexSet adjustment;   // backdoor set, or the mediator set for frontdoor
  std::string route;      // "backdoor", "zid-backdoor", "zid-frontdoor"
  ExprPtr estimand;
};

/// Sufficient condition for identification from experiments on a surrogate
/// set: either the query is identifiable by adjustment alone, or some
/// subset Z' of z_exp has all its directed paths to y intercepted by x and
/// the query is identifiable by adjustment once arrows into Z' are cut
/// (terms then carry do(Z')). A none result means the criterion is silent,
/// never that the query is unidentifiable.
std::optional<ZidResult> zid_sufficient(const Graph& g, const VertexSet& x,
                                        const VertexSet& y,
                                        const VertexSet& z_exp);

/// Companion shortcut: the frontdoor criterion applied after cutting
/// arrows into a surrogate subset Z'.
std::optional<ZidResult> zid_frontdoor(const Graph& g, const VertexSet& x,
                                       const VertexSet& y,
                                       const VertexSet& z_exp);

/// Selection backdoor: with z split into non-descendants z⁺ and
/// descendants z⁻ of x, requires (i) z⁺ blocks every backdoor path from x
/// to y, (ii) z⁻ ⫫ y | x, z⁺, and (iii) y ⫫ S | x, z. Measurement
/// availability is checked against the catalogue by the caller.
bool s_backdoor_admissible(const Graph& g_s, const VertexSet& x,
                           const VertexSet& y, const VertexSet& z);

/// Σ_z P(y|x,z,S=1) P(z), with P(z) an unbiased-marginal term.
ExprPtr s_backdoor_estimand(const Graph& g_s, const VertexSet& x,
                            const VertexSet& y, const VertexSet& z);

/// t separates every discrepancy vertex from y once arrows into x are cut.
bool s_admissible(const Graph& d, const VertexSet& x, const VertexSet& y,
                  const VertexSet& t);

/// Σ_t P(y|do(x),t) P*(t). Valid when t is pre-treatment; post-treatment
/// separators need a do-calculus derivation instead.
ExprPtr transport_estimand(const Graph& d, const VertexSet& x,
                           const VertexSet& y, const VertexSet& t);

/// Every directed path from x to y passes through z.
bool intercepts_all_directed_paths(const Graph& g, const VertexSet& x,
                                   const VertexSet& y, const VertexSet& z);

/// Copy of e with extra to every term's do-set (surrogate tagging).
ExprPtr add_do_everywhere(const ExprPtr& e, const VertexSet& extra);

}  // namespace dofuse
