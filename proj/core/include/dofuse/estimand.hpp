#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dofuse/graph.hpp"

namespace dofuse {

class EstimandError : public std::runtime_error {
 public:
  EstimandError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Domain labels: "*" names the target population; "" names the single
/// anonymous source population of a two-domain transport problem; anything
/// else is a named source ("a", "b", ...).
inline constexpr const char* kTargetDomain = "*";

/// One atomic probability factor. Variable names may carry trailing primes
/// ("X'") to distinguish bound copies; the underlying graph vertex is the
/// name with primes stripped.
struct ProbTerm {
  VertexSet outcomes;            // nonempty
  VertexSet conditions;          // ordinary conditioning variables
  VertexSet do_set;              // intervened variables
  bool selected = false;         // additionally conditions on S=1
  std::string domain = kTargetDomain;

  bool operator==(const ProbTerm&) const = default;
  auto operator<=>(const ProbTerm&) const = default;

  /// outcomes ∪ conditions ∪ do_set, primes kept.
  VertexSet variables() const;
};

/// Trailing primes stripped: "X''" -> "X".
std::string base_name(const std::string& v);
VertexSet base_names(const VertexSet& s);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression tree. Sum binds whole-variable symbols; Product is
/// n-ary; Quotient is exact division with 0/0 := 0 at evaluation time.
struct Expr {
  enum class Kind { Term, Sum, Product, Quotient };
  Kind kind = Kind::Term;
  ProbTerm term;                  // Kind::Term
  VertexSet bound;                // Kind::Sum
  ExprPtr body;                   // Kind::Sum
  std::vector<ExprPtr> factors;   // Kind::Product
  ExprPtr numerator, denominator; // Kind::Quotient
};

ExprPtr make_term(ProbTerm t);
ExprPtr make_sum(VertexSet bound, ExprPtr body);
ExprPtr make_product(std::vector<ExprPtr> factors);
ExprPtr make_quotient(ExprPtr numerator, ExprPtr denominator);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

/// Variables occurring outside any enclosing binder, primes kept.
VertexSet free_variables(const ExprPtr& e);
/// Every ProbTerm in e, left to right.
std::vector<ProbTerm> collect_terms(const ExprPtr& e);
/// Domain labels of all terms.
std::set<std::string> domains_mentioned(const ExprPtr& e);

/// Deterministic normal form: products flattened and sum-free (sums are
/// hoisted above products when capture-safe, never through a quotient),
/// nested sums merged, empty and vacuous binders dropped, bound variables
/// renamed to base-plus-minimal-primes, factors sorted. Idempotent.
ExprPtr canonicalize(const ExprPtr& e);

enum class RenderFormat { Text, Latex };
std::string render(const ExprPtr& e, RenderFormat format);
inline std::string render_text(const ExprPtr& e) {
  return render(e, RenderFormat::Text);
}

/// Inverse of render(Text). Grammar: `P[*|^d](outcomes | do(v), w, S=1)`,
/// `sum_{a,b} expr` (alias `Σ_`), juxtaposition or `*` for products, `/`
/// for quotients, parentheses, `#`-free single-line input. Variable
/// identifiers are case-insensitive and stored uppercase; domain labels are
/// case-sensitive. A bare `P` parses as the anonymous source domain and is
/// promoted to the target domain when no starred or named term appears.
ExprPtr parse_estimand(const std::string& text);

/// One estimable distribution the analyst can draw on.
struct Source {
  std::string domain = kTargetDomain;
  bool experimental = false;
  VertexSet intervened;      // nonempty iff experimental
  bool selected = false;     // data only observed conditional on S=1
  VertexSet measured;
  VertexSet discrepancies;   // discrepancy vertices active for this source
};

struct SourceCatalog {
  std::vector<Source> sources;

  const Source* find(const std::string& domain) const;
};

struct TermReport {
  ProbTerm term;
  bool estimable = false;
  std::string reason;  // empty when estimable
};

struct EstimabilityReport {
  bool estimable = false;
  std::vector<TermReport> terms;
};

/// A term is estimable when some source has the same domain and selection
/// flag, covers its do-set (subset of the source's intervened set;
/// observational sources cover only empty do-sets), and measures every
/// variable it names.
bool term_estimable(const ProbTerm& t, const SourceCatalog& cat);
EstimabilityReport estimable(const ExprPtr& e, const SourceCatalog& cat);

struct Query {
  ProbTerm target;  // target-domain term, usually P*(y|do(x)) shaped
};

}  // namespace dofuse
