#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dofuse/estimand.hpp"
#include "dofuse/graph.hpp"

namespace dofuse {

class OracleError : public std::runtime_error {
 public:
  OracleError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Dense probability table. Axes are named (possibly primed) variables;
/// the last axis varies fastest.
struct Dist {
  std::vector<std::string> vars;
  std::vector<int> cards;
  std::vector<double> table;

  size_t size() const { return table.size(); }
  int card_of(const std::string& v) const;
  bool operator==(const Dist&) const = default;
};

Dist make_dist(std::vector<std::string> vars, std::vector<int> cards);
/// Sum out every axis not in keep.
Dist marginalize(const Dist& d, const VertexSet& keep);
/// Pointwise with broadcasting over the union of axes; division uses
/// 0/0 := 0 and throws ZeroDenominator when the numerator carries mass.
Dist multiply(const Dist& a, const Dist& b);
Dist divide(const Dist& num, const Dist& den);
/// Largest |a-b| over the union of axes (broadcasting as in multiply).
double max_abs_diff(const Dist& a, const Dist& b);
double total_mass(const Dist& d);

/// Deterministic cross-platform randomness: raw mt19937_64 output mapped
/// to [0,1) by the 53-bit shift, everything else derived from that.
struct Rng {
  explicit Rng(uint64_t seed) : eng_(seed) {}
  double u01();
  int uniform_int(int n);  // uniform on {0,...,n-1}
  double exponential();
  std::vector<double> dirichlet(int n);  // symmetric, concentration 1

 private:
  std::mt19937_64 eng_;
};

/// Exogenous block with an explicit distribution.
struct ExoVar {
  std::string name;
  int card = 0;
  std::vector<double> probs;

  bool operator==(const ExoVar&) const = default;
};

/// Deterministic mechanism: value of the vertex per joint configuration of
/// (directed parents, shared bidirected exogenous parents, own exogenous
/// variable), row-major with the first input slowest.
struct Mechanism {
  std::vector<std::string> parents;      // directed, discrepancy excluded
  std::vector<std::string> exo_parents;  // edge blocks sorted, own block last
  std::vector<int> table;

  bool operator==(const Mechanism&) const = default;
};

/// Fully specified discrete SCM over the non-discrepancy vertices of a
/// graph. Bidirected edges are realized as one shared exogenous variable
/// per edge; every modeled vertex additionally owns a private block.
struct Scm {
  Graph graph;
  std::map<std::string, int> sizes;         // modeled vertices only
  std::map<std::string, ExoVar> exo;        // keyed by name
  std::map<std::string, Mechanism> mech;    // keyed by vertex

  bool operator==(const Scm&) const = default;
};

/// Name of the shared exogenous block of a bidirected edge.
std::string edge_exo_name(const std::string& a, const std::string& b);
std::string vertex_exo_name(const std::string& v);

/// Dirichlet(1) exogenous tables, uniform mechanism rows; deterministic in
/// seed. Exogenous blocks have cardinality exo_card.
Scm random_scm(const Graph& g, int size, uint64_t seed, int exo_card = 4);

/// Exact joint over all modeled vertices. Guarded enumeration.
Dist joint(const Scm& m);

/// Mechanisms of the assigned vertices replaced by constants; graph edges
/// into them removed.
Scm intervene(const Scm& m, const std::map<std::string, int>& assignment);

/// Table over all modeled vertices whose entry at (x=xv, rest=r) is
/// P(rest=r | do(x=xv)); each do-slice sums to 1.
Dist post_intervention_dist(const Scm& m, const VertexSet& x);

/// Condition on every listed selection vertex taking value 1 and drop
/// those axes.
Dist selection_view(const Dist& d, const VertexSet& selection);

/// Mechanisms and private exogenous tables resampled at targets only.
Scm domain_variant(const Scm& m, const VertexSet& targets, uint64_t seed);

/// Joint over the factual variables plus one counterfactual copy of y per
/// value of x, axis names y@0, y@1, ... Enumerates every exogenous
/// configuration so all worlds share u.
Dist counterfactual_joint(const Scm& m, const std::string& x,
                          const std::string& y);

/// E[y | do(x=x1)] - E[y | do(x=x0)] with values as outcome indices.
double average_causal_effect(const Scm& m, const std::string& x,
                             const std::string& y, int x1, int x0);

/// One population per domain label. Every domain shares the diagram; the
/// target is "*".
using WorldMap = std::map<std::string, Scm>;

/// Numeric table of any estimand over its free variables (axes named by
/// the possibly-primed symbols). Terms resolve against the domain's SCM;
/// the selected flag conditions on all selection vertices being 1.
Dist evaluate(const ExprPtr& e, const WorldMap& worlds);

/// JSON round trip (nlohmann syntax), byte-stable.
std::string scm_to_json(const Scm& m);
Scm scm_from_json(const std::string& text);

}  // namespace dofuse
