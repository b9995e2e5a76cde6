#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "dofuse/estimand.hpp"
#include "fixtures.hpp"

using namespace dofuse;

namespace {

ExprPtr P(VertexSet outs, VertexSet conds = {}, VertexSet dos = {},
          bool selected = false, std::string domain = kTargetDomain) {
  ProbTerm t;
  t.outcomes = std::move(outs);
  t.conditions = std::move(conds);
  t.do_set = std::move(dos);
  t.selected = selected;
  t.domain = std::move(domain);
  return make_term(t);
}

}  // namespace

TEST_CASE("render and parse round trip") {
  for (const char* s : {
           "P(y)",
           "P(y|x)",
           "P(y|do(x))",
           "P(y|do(x),z,S=1)",
           "P(y,w|do(x),do(z))",
           "Σ_e P(y|c,e) P(e)",
           "sum_{z,w} P(y|x,z,w,S=1) P(z,w)",
           "Σ_z P(y|do(x),z) P*(z)",
           "Σ_z P^(b)(y|do(x),do(z)) P^(a)(z|do(x))",
           "Σ_{m,w} P(m|w,x) P(w) Σ_{x'} P(y|m,w,x') P(x'|w)",
           "P(y,x) / P(x)",
       }) {
    ExprPtr e = parse_estimand(s);
    std::string text = render_text(e);
    ExprPtr back = parse_estimand(text);
    CHECK(expr_equal(e, back));
    CHECK(render_text(back) == text);  // rendering is a fixed point
  }
}

TEST_CASE("parser diagnostics") {
  CHECK_THROWS_AS(parse_estimand("P(y|"), EstimandError);
  CHECK_THROWS_AS(parse_estimand("Q(y)"), EstimandError);
  CHECK_THROWS_AS(parse_estimand("sum_ P(y)"), EstimandError);
  CHECK_THROWS_AS(parse_estimand(""), EstimandError);
}

TEST_CASE("bare domains promote to the target only when uniform") {
  ExprPtr uniform = parse_estimand("Σ_z P(y|x,z) P(z)");
  for (const auto& t : collect_terms(uniform)) CHECK(t.domain == kTargetDomain);
  ExprPtr mixed = parse_estimand("Σ_z P(y|do(x),z) P*(z)");
  auto terms = collect_terms(mixed);
  REQUIRE(terms.size() == 2);
  CHECK(((terms[0].domain == "") != (terms[1].domain == "")));
}

TEST_CASE("latex rendering") {
  CHECK(render(parse_estimand("Σ_z P(y|do(x),z) P*(z)"), RenderFormat::Latex) ==
        "\\sum_{z} P(y \\mid do(x),z) P^{*}(z)");
  CHECK(render(parse_estimand("P(y,x) / P(x)"), RenderFormat::Latex) ==
        "\\frac{P(x,y)}{P(x)}");
}

TEST_CASE("canonicalize is idempotent") {
  std::vector<ExprPtr> cases{
      P({"Y"}, {}, {"X"}),
      make_product({make_sum({"Z"}, make_product({P({"Y"}, {"Z"}), P({"Z"})})),
                    P({"W"})}),
      make_sum({"Z"}, make_sum({"W"}, make_product({P({"Y"}, {"Z", "W"}),
                                                    P({"Z"}), P({"W"})}))),
      make_quotient(make_product({P({"Y"}, {"X"}), P({"X"})}), P({"X"})),
  };
  for (const auto& e : cases) {
    ExprPtr c1 = canonicalize(e);
    ExprPtr c2 = canonicalize(c1);
    CHECK(expr_equal(c1, c2));
    CHECK(render_text(c1) == render_text(c2));
  }
}

TEST_CASE("sums hoist out of products with capture-avoiding renames") {
  // (Σ_z P(y|z)P(z)) * P(z) must not capture the free z.
  ExprPtr e = make_product(
      {make_sum({"Z"}, make_product({P({"Y"}, {"Z"}), P({"Z"})})), P({"Z"})});
  ExprPtr c = canonicalize(e);
  CHECK(free_variables(e) == free_variables(c));
  // The free Z survives; the bound one got primed.
  bool has_primed = false;
  for (const auto& t : collect_terms(c))
    for (const auto& v : t.variables())
      if (v == "Z'") has_primed = true;
  CHECK(has_primed);
}

TEST_CASE("vacuous binders drop and identical factors cancel") {
  ExprPtr vac = make_sum({"Q"}, P({"Y"}, {"X"}));
  CHECK(render_text(canonicalize(vac)) == "P(y|x)");
  ExprPtr quot = make_quotient(make_product({P({"Y"}, {"X"}), P({"X"})}),
                               P({"X"}));
  CHECK(render_text(canonicalize(quot)) == "P(y|x)");
}

TEST_CASE("shadowed outer binders are vacuous and collapse away") {
  // the inner sum closes over Z, so the outer binder binds nothing
  ExprPtr shadowed = make_sum({"Z"}, make_sum({"Z"}, P({"Y"}, {"Z"})));
  CHECK(render_text(canonicalize(shadowed)) ==
        render_text(canonicalize(make_sum({"Z"}, P({"Y"}, {"Z"})))));
}

TEST_CASE("canonical form is order independent") {
  ExprPtr a = canonicalize(make_product({P({"Y"}, {"Z"}), P({"Z"})}));
  ExprPtr b = canonicalize(make_product({P({"Z"}), P({"Y"}, {"Z"})}));
  CHECK(render_text(a) == render_text(b));
}

TEST_CASE("estimability against a catalogue") {
  Graph g = fixtures::selection_two_covariates();
  SourceCatalog biased = fixtures::selected_only(g);
  ExprPtr e = parse_estimand("Σ_{z,w} P(y|x,z,w,S=1) P(z,w)");
  CHECK_FALSE(estimable(e, biased).estimable);
  SourceCatalog both = fixtures::selected_plus_marginal(g, {"Z", "W"});
  CHECK(estimable(e, both).estimable);

  // Monotonicity: enlarging the catalogue never loses estimability.
  for (const char* s : {"P(y|x,S=1)", "P(x)", "Σ_z P(y|x,z,S=1) P(z)"}) {
    ExprPtr q = parse_estimand(s);
    if (estimable(q, biased).estimable) CHECK(estimable(q, both).estimable);
  }

  // Observational sources never cover do-terms.
  ExprPtr causal = parse_estimand("P(y|do(x))");
  CHECK_FALSE(estimable(causal, both).estimable);
  SourceCatalog exp = fixtures::with_experiment(both, g, {"X"});
  CHECK(estimable(causal, exp).estimable);
}

TEST_CASE("estimability reports name the offending term") {
  Graph g = fixtures::selection_two_covariates();
  auto rep = estimable(parse_estimand("P(y|x,S=1) P(z,w)"),
                       fixtures::selected_only(g));
  CHECK_FALSE(rep.estimable);
  bool found = false;
  for (const auto& tr : rep.terms)
    if (!tr.estimable && tr.term.outcomes == VertexSet{"W", "Z"}) found = true;
  CHECK(found);
}
