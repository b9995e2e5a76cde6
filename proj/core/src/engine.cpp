#include "dofuse/engine.hpp"

#include <algorithm>
#include <functional>
#include <queue>

#include "dofuse/separation.hpp"
#include "json.hpp"

namespace dofuse {

namespace {

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

VertexSet set_intersect(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  for (const auto& v : a)
    if (b.count(v)) out.insert(v);
  return out;
}

VertexSet set_minus(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  for (const auto& v : a)
    if (!b.count(v)) out.insert(v);
  return out;
}

bool check_premise(const Premise& p, const Graph& g) {
  if (p.trivial()) return true;
  return d_separated(mutilate(g, p.cut_incoming, p.cut_outgoing), p.x, p.y,
                     p.z);
}

/// Conditioning contributed by a term beyond its explicit sets: the
/// selected flag stands for S=1 on every selection vertex.
VertexSet implicit_conditioning(const ProbTerm& t, const Graph& g) {
  return t.selected ? g.selection_vertices() : VertexSet{};
}

Premise rule1_premise(const ProbTerm& t, const Graph& g, const VertexSet& z) {
  VertexSet x = base_names(t.do_set);
  VertexSet w = set_minus(base_names(t.conditions), z);
  Premise p;
  p.x = base_names(t.outcomes);
  p.y = z;
  p.z = set_union(set_union(x, w), implicit_conditioning(t, g));
  p.cut_incoming = x;
  return p;
}

Premise rule2_premise(const ProbTerm& t, const Graph& g, const VertexSet& z) {
  VertexSet x_rest = set_minus(base_names(t.do_set), z);
  VertexSet w = set_minus(base_names(t.conditions), z);
  Premise p;
  p.x = base_names(t.outcomes);
  p.y = z;
  p.z = set_union(set_union(x_rest, w), implicit_conditioning(t, g));
  p.cut_incoming = x_rest;
  p.cut_outgoing = z;
  return p;
}

Premise rule3_premise(const ProbTerm& t, const Graph& g, const VertexSet& z) {
  VertexSet x_rest = set_minus(base_names(t.do_set), z);
  VertexSet w =
      set_union(set_minus(base_names(t.conditions), z),
                implicit_conditioning(t, g));
  // Z(W): the z-vertices that are not ancestors of any conditioning vertex
  // once arrows into the remaining do-set are cut.
  VertexSet anc_w = ancestors(mutilate(g, x_rest), w);
  VertexSet z_w = set_minus(z, anc_w);
  Premise p;
  p.x = base_names(t.outcomes);
  p.y = z;
  p.z = set_union(x_rest, w);
  p.cut_incoming = set_union(x_rest, z_w);
  return p;
}

Premise selection_premise(const ProbTerm& t, const Graph& g) {
  VertexSet x = base_names(t.do_set);
  Premise p;
  p.x = base_names(t.outcomes);
  p.y = g.selection_vertices();
  p.z = set_union(x, base_names(t.conditions));
  p.cut_incoming = x;
  return p;
}

Premise exchange_premise(const ProbTerm& t, const Graph& g,
                         const VertexSet& snodes) {
  VertexSet x = base_names(t.do_set);
  Premise p;
  p.x = base_names(t.outcomes);
  p.y = snodes;
  // Conditions only: the intervened set is cut from the diagram instead of
  // entering the separator, so the premise stays valid for strata-specific
  // effects without licensing exchanges that lean on the treatment itself.
  p.z = set_union(base_names(t.conditions), implicit_conditioning(t, g));
  p.cut_incoming = x;
  return p;
}

}  // namespace

bool applicable_rule1(const ProbTerm& term, const Graph& g, const VertexSet& z) {
  return check_premise(rule1_premise(term, g, z), g);
}

bool applicable_rule2(const ProbTerm& term, const Graph& g, const VertexSet& z) {
  return check_premise(rule2_premise(term, g, z), g);
}

bool applicable_rule3(const ProbTerm& term, const Graph& g, const VertexSet& z) {
  return check_premise(rule3_premise(term, g, z), g);
}

// ---------------------------------------------------------------------------
// Term-level rewriting

namespace {

/// Replace the index-th term (collect_terms order) by an expression.
ExprPtr replace_term_at(const ExprPtr& e, size_t index, const ExprPtr& repl) {
  size_t seen = 0;
  std::function<ExprPtr(const ExprPtr&)> walk = [&](const ExprPtr& x) -> ExprPtr {
    switch (x->kind) {
      case Expr::Kind::Term:
        return seen++ == index ? repl : x;
      case Expr::Kind::Sum:
        return make_sum(x->bound, walk(x->body));
      case Expr::Kind::Product: {
        std::vector<ExprPtr> fs;
        for (const auto& f : x->factors) fs.push_back(walk(f));
        return make_product(std::move(fs));
      }
      case Expr::Kind::Quotient: {
        ExprPtr num = walk(x->numerator);
        return make_quotient(num, walk(x->denominator));
      }
    }
    return x;
  };
  return walk(e);
}

/// Drop the index-th term entirely (its factor becomes 1).
ExprPtr drop_term_at(const ExprPtr& e, size_t index) {
  size_t seen = 0;
  std::function<ExprPtr(const ExprPtr&)> walk = [&](const ExprPtr& x) -> ExprPtr {
    switch (x->kind) {
      case Expr::Kind::Term:
        return seen++ == index ? nullptr : x;
      case Expr::Kind::Sum: {
        ExprPtr body = walk(x->body);
        return body ? make_sum(x->bound, body) : nullptr;
      }
      case Expr::Kind::Product: {
        std::vector<ExprPtr> fs;
        for (const auto& f : x->factors) {
          ExprPtr nf = walk(f);
          if (nf) fs.push_back(nf);
        }
        if (fs.empty()) return nullptr;
        return make_product(std::move(fs));
      }
      case Expr::Kind::Quotient: {
        ExprPtr num = walk(x->numerator);
        ExprPtr den = walk(x->denominator);
        if (!num || !den)
          throw EstimandError("CancelInsideQuotient",
                              "cannot drop a lone quotient side");
        return make_quotient(num, den);
      }
    }
    return x;
  };
  ExprPtr out = walk(e);
  if (!out)
    throw EstimandError("EmptyExpression", "dropping the only term");
  return out;
}

struct Move {
  RewriteStep step;  // before/after filled by the caller
  ExprPtr next;
};

int term_width(const ProbTerm& t) {
  return static_cast<int>(t.variables().size()) + (t.selected ? 1 : 0);
}

bool within_width(const ExprPtr& e, int max_width) {
  for (const auto& t : collect_terms(e))
    if (term_width(t) > max_width) return false;
  return true;
}

/// Endogenous vertices within two skeleton hops of the term's variables.
VertexSet nearby_vertices(const Graph& g, const VertexSet& base_vars) {
  VertexSet frontier;
  for (const auto& v : base_vars)
    if (g.has_vertex(v)) frontier.insert(v);
  VertexSet seen = frontier;
  for (int hop = 0; hop < 2; ++hop) {
    VertexSet next;
    for (const auto& v : frontier) {
      for (const auto& u : g.parents(v)) next.insert(u);
      for (const auto& u : g.children(v)) next.insert(u);
      for (const auto& u : g.siblings(v)) next.insert(u);
    }
    frontier = set_minus(next, seen);
    seen.insert(frontier.begin(), frontier.end());
  }
  VertexSet out;
  for (const auto& v : seen)
    if (g.kind(v) == VertexKind::Endogenous) out.insert(v);
  return out;
}

/// Chain-rule expansion: P(y|c) -> Σ_z P(y|z,c) P(z|c). The bound symbols
/// are the raw vertex names; canonicalization primes them on capture.
ExprPtr condition_expansion(const ProbTerm& t, const VertexSet& z) {
  ProbTerm main = t;
  main.conditions.insert(z.begin(), z.end());
  ProbTerm aux;
  aux.outcomes = z;
  aux.conditions = t.conditions;
  aux.do_set = t.do_set;
  aux.selected = t.selected;
  aux.domain = t.domain;
  return make_sum(z, make_product({make_term(main), make_term(aux)}));
}

std::string focus_of(const ProbTerm& t) {
  return render_text(make_term(t));
}

/// All legal single rewrites of a canonical expression, deterministic
/// order. Each move's step lacks before/after, which the caller fills.
std::vector<Move> generate_moves(const ExprPtr& expr, const Graph& g,
                                 const SourceCatalog& cat,
                                 const SearchBudget& budget) {
  std::vector<Move> moves;
  auto add = [&](std::string rule, const ProbTerm& t, bool has_premise,
                 Premise premise, ExprPtr next) {
    if (!check_premise(premise, g)) return;
    ExprPtr canon = canonicalize(next);
    if (!within_width(canon, budget.max_term_width)) return;
    Move m;
    m.step.rule = std::move(rule);
    m.step.focus = focus_of(t);
    m.step.has_premise = has_premise && !premise.trivial();
    m.step.premise = premise;
    m.next = std::move(canon);
    moves.push_back(std::move(m));
  };

  VertexSet exp_vars;
  std::set<std::string> domains;
  std::map<std::string, VertexSet> snodes_of;
  for (const auto& s : cat.sources) {
    if (s.experimental) exp_vars.insert(s.intervened.begin(), s.intervened.end());
    domains.insert(s.domain);
    snodes_of[s.domain] = s.discrepancies;
  }

  // Joint conditioning candidates beyond singletons: the measured sets of
  // partially-measured sources (these are the variables whose joint the
  // analyst can actually estimate together).
  std::vector<VertexSet> joint_candidates;
  VertexSet all_endo = g.endogenous();
  for (const auto& s : cat.sources)
    if (!s.measured.empty() && s.measured.size() <= 3 &&
        s.measured != all_endo)
      joint_candidates.push_back(s.measured);

  auto terms = collect_terms(expr);
  bool has_selection = !g.selection_vertices().empty();

  for (size_t ti = 0; ti < terms.size(); ++ti) {
    const ProbTerm& t = terms[ti];
    VertexSet vars = base_names(t.variables());
    VertexSet near = nearby_vertices(g, vars);

    // Rule 1: delete observations.
    for (const auto& v : t.conditions) {
      ProbTerm nt = t;
      nt.conditions.erase(v);
      add("Rule1", t, true, rule1_premise(t, g, {base_name(v)}),
          replace_term_at(expr, ti, make_term(nt)));
    }
    // Rule 1: insert observations.
    for (const auto& v : near) {
      if (vars.count(v)) continue;
      ProbTerm nt = t;
      nt.conditions.insert(v);
      add("Rule1", t, true, rule1_premise(t, g, {v}),
          replace_term_at(expr, ti, make_term(nt)));
    }
    // Rule 2 both directions.
    for (const auto& v : t.do_set) {
      ProbTerm nt = t;
      nt.do_set.erase(v);
      nt.conditions.insert(v);
      add("Rule2", t, true, rule2_premise(t, g, {base_name(v)}),
          replace_term_at(expr, ti, make_term(nt)));
    }
    for (const auto& v : t.conditions) {
      if (!g.has_vertex(base_name(v)) ||
          g.kind(base_name(v)) != VertexKind::Endogenous)
        continue;
      ProbTerm nt = t;
      nt.conditions.erase(v);
      nt.do_set.insert(v);
      add("Rule2", t, true, rule2_premise(t, g, {base_name(v)}),
          replace_term_at(expr, ti, make_term(nt)));
    }
    // Rule 3: delete actions.
    for (const auto& v : t.do_set) {
      ProbTerm nt = t;
      nt.do_set.erase(v);
      add("Rule3", t, true, rule3_premise(t, g, {base_name(v)}),
          replace_term_at(expr, ti, make_term(nt)));
    }
    // Rule 3: insert actions, only on variables some source intervenes on.
    if (t.do_set.size() < 3) {
      for (const auto& v : exp_vars) {
        if (vars.count(v)) continue;
        ProbTerm nt = t;
        nt.do_set.insert(v);
        add("Rule3", t, true, rule3_premise(nt, g, {v}),
            replace_term_at(expr, ti, make_term(nt)));
      }
    }
    // Condition: chain-rule insertion of a nearby vertex or of a
    // jointly-measured set.
    std::vector<VertexSet> cond_candidates;
    for (const auto& v : near)
      if (!vars.count(v)) cond_candidates.push_back({v});
    for (const auto& js : joint_candidates) {
      bool disjoint = std::none_of(js.begin(), js.end(), [&](const auto& v) {
        return vars.count(v) != 0;
      });
      if (disjoint && js.size() > 1) cond_candidates.push_back(js);
    }
    for (const auto& z : cond_candidates)
      add("Condition", t, false, Premise{},
          replace_term_at(expr, ti, condition_expansion(t, z)));
    // ChainSplit: peel one outcome into its own factor.
    if (t.outcomes.size() >= 2) {
      for (const auto& v : t.outcomes) {
        ProbTerm head = t;
        head.outcomes.erase(v);
        head.conditions.insert(v);
        ProbTerm tail = t;
        tail.outcomes = {v};
        add("ChainSplit", t, false, Premise{},
            replace_term_at(
                expr, ti, make_product({make_term(head), make_term(tail)})));
      }
    }
    // SelectionAttach: toggle the S=1 flag.
    if (has_selection) {
      ProbTerm nt = t;
      nt.selected = !t.selected;
      add("SelectionAttach", t, true, selection_premise(t, g),
          replace_term_at(expr, ti, make_term(nt)));
    }
    // DomainExchange.
    for (const auto& d : domains) {
      if (d == t.domain) continue;
      VertexSet snodes = snodes_of.count(t.domain)
                             ? snodes_of.at(t.domain)
                             : VertexSet{};
      auto it = snodes_of.find(d);
      if (it != snodes_of.end())
        snodes.insert(it->second.begin(), it->second.end());
      ProbTerm nt = t;
      nt.domain = d;
      add("DomainExchange", t, true, exchange_premise(t, g, snodes),
          replace_term_at(expr, ti, make_term(nt)));
    }
  }

  // Marginalize: a bound variable that occurs only as the outcome of a
  // single term sums away.
  {
    VertexSet bound;
    std::function<void(const ExprPtr&)> collect_bound = [&](const ExprPtr& x) {
      if (x->kind == Expr::Kind::Sum) {
        bound.insert(x->bound.begin(), x->bound.end());
        collect_bound(x->body);
      } else if (x->kind == Expr::Kind::Product) {
        for (const auto& f : x->factors) collect_bound(f);
      } else if (x->kind == Expr::Kind::Quotient) {
        collect_bound(x->numerator);
        collect_bound(x->denominator);
      }
    };
    collect_bound(expr);
    for (const auto& b : bound) {
      int holders = 0;
      size_t holder_index = 0;
      bool outcome_only = true;
      for (size_t ti = 0; ti < terms.size(); ++ti) {
        const auto& t = terms[ti];
        if (t.variables().count(b)) {
          ++holders;
          holder_index = ti;
          if (!t.outcomes.count(b)) outcome_only = false;
        }
      }
      if (holders != 1 || !outcome_only) continue;
      const ProbTerm& t = terms[holder_index];
      ExprPtr next;
      if (t.outcomes.size() == 1) {
        if (terms.size() == 1) continue;  // would leave an empty expression
        next = drop_term_at(expr, holder_index);
      } else {
        ProbTerm nt = t;
        nt.outcomes.erase(b);
        next = replace_term_at(expr, holder_index, make_term(nt));
      }
      Move m;
      m.step.rule = "Marginalize";
      m.step.focus = focus_of(t);
      m.step.has_premise = false;
      ExprPtr canon = canonicalize(next);
      if (!within_width(canon, budget.max_term_width)) continue;
      m.next = std::move(canon);
      moves.push_back(std::move(m));
    }
  }
  return moves;
}

int unestimable_count(const ExprPtr& e, const SourceCatalog& cat) {
  int n = 0;
  for (const auto& t : collect_terms(e))
    if (!term_estimable(t, cat)) ++n;
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// Search

namespace {

struct SearchNode {
  ExprPtr expr;
  int depth = 0;
  std::string parent;  // key of the predecessor, empty for the root
  RewriteStep step;    // step that produced this node
};

using Priority = std::tuple<int, int, size_t, std::string>;

Priority priority_of(const ExprPtr& e, const SourceCatalog& cat,
                     const std::string& key) {
  return {unestimable_count(e, cat),
          static_cast<int>(collect_terms(e).size()), key.size(), key};
}

DeriveResult search(const Query& q, const Graph& g, const SourceCatalog& cat,
                    const SearchBudget& budget) {
  ExprPtr start = canonicalize(make_term(q.target));
  std::string start_key = render_text(start);

  std::map<std::string, SearchNode> nodes;
  nodes[start_key] = SearchNode{start, 0, "", {}};
  std::set<Priority> frontier;
  frontier.insert(priority_of(start, cat, start_key));

  auto reconstruct = [&](const std::string& goal_key) {
    Derivation d;
    d.query = q;
    d.final = nodes.at(goal_key).expr;
    std::vector<RewriteStep> steps;
    std::string cur = goal_key;
    while (!nodes.at(cur).parent.empty()) {
      steps.push_back(nodes.at(cur).step);
      cur = nodes.at(cur).parent;
    }
    std::reverse(steps.begin(), steps.end());
    d.steps = std::move(steps);
    return d;
  };

  while (!frontier.empty()) {
    auto top = *frontier.begin();
    frontier.erase(frontier.begin());
    const std::string& key = std::get<3>(top);
    SearchNode& node = nodes.at(key);

    if (std::get<0>(top) == 0 && estimable(node.expr, cat).estimable) {
      DeriveResult r;
      r.status = DeriveStatus::Derived;
      r.derivation = reconstruct(key);
      r.route = "search";
      return r;
    }
    if (node.depth >= budget.max_steps) continue;

    for (auto& m : generate_moves(node.expr, g, cat, budget)) {
      std::string nk = render_text(m.next);
      if (nodes.count(nk)) continue;
      m.step.before = node.expr;
      m.step.after = m.next;
      nodes[nk] = SearchNode{m.next, node.depth + 1, key, m.step};
      frontier.insert(priority_of(m.next, cat, nk));
      if (static_cast<int>(nodes.size()) > budget.max_states) {
        DeriveResult r;
        r.status = DeriveStatus::NotDerivedWithinBudget;
        r.reason = "state budget exhausted";
        r.route = "search";
        return r;
      }
    }
  }
  DeriveResult r;
  r.status = DeriveStatus::NotDerivedWithinBudget;
  r.reason = "search space exhausted within budget";
  r.route = "search";
  return r;
}

}  // namespace

DeriveResult derive(const Query& q, const Graph& g, const SourceCatalog& cat,
                    const SearchBudget& budget) {
  validated(g);
  if (q.target.outcomes.empty())
    throw EstimandError("InvalidQuery", "query needs outcome variables");
  if (cat.sources.empty())
    throw EstimandError("InvalidQuery", "empty source catalogue");

  // Pure conditional query against purely selection-biased data: the
  // recoverability test (y ⫫ S | conditions) is exact, so a failure is a
  // definitive negative.
  if (q.target.do_set.empty() && !g.selection_vertices().empty()) {
    bool all_selected = std::all_of(
        cat.sources.begin(), cat.sources.end(),
        [](const Source& s) { return s.selected; });
    if (all_selected) {
      VertexSet y = base_names(q.target.outcomes);
      VertexSet cond = base_names(q.target.conditions);
      if (!d_separated(g, y, g.selection_vertices(), cond)) {
        DeriveResult r;
        r.status = DeriveStatus::ProvablyNot;
        r.route = "theorem7";
        r.reason = "outcome depends on sample inclusion given the "
                   "conditioning set; no do-free rewrite can exist";
        return r;
      }
    }
  }
  return search(q, g, cat, budget);
}

// ---------------------------------------------------------------------------
// Verifier

VerifyResult verify(const Derivation& d, const Graph& g) {
  ExprPtr cur = canonicalize(make_term(d.query.target));
  for (size_t i = 0; i < d.steps.size(); ++i) {
    const RewriteStep& s = d.steps[i];
    int idx = static_cast<int>(i);
    if (!expr_equal(canonicalize(s.before), cur))
      return {false, idx, "step does not continue from the previous state"};
    static const std::set<std::string> needs_premise{"Rule1", "Rule2", "Rule3"};
    if (needs_premise.count(s.rule) && !s.has_premise)
      return {false, idx, s.rule + " step is missing its premise"};
    if (s.has_premise) {
      try {
        if (!check_premise(s.premise, g))
          return {false, idx, "premise fails d-separation in the stored "
                              "mutilation"};
      } catch (const GraphError& err) {
        return {false, idx, std::string("premise is malformed: ") + err.what()};
      }
    }
    cur = canonicalize(s.after);
  }
  if (!expr_equal(cur, canonicalize(d.final)))
    return {false, static_cast<int>(d.steps.size()),
            "final expression does not match the last step"};
  return {true, -1, ""};
}

// ---------------------------------------------------------------------------
// Scripted derivations for criterion shortcuts

namespace {

/// Builds a derivation by applying named rule moves at terms located by
/// their (base-name) outcome sets; every premise is checked on the way.
class Builder {
 public:
  Builder(const Graph& g, const Query& q) : g_(g) {
    d_.query = q;
    cur_ = canonicalize(make_term(q.target));
  }

  bool ok() const { return ok_; }
  Derivation finish() {
    d_.final = cur_;
    return d_;
  }
  const ExprPtr& current() const { return cur_; }

  void condition(const VertexSet& outs, const VertexSet& z) {
    if (!ok_) return;
    auto [ti, t] = locate(outs);
    if (!ok_) return;
    record("Condition", t, false, Premise{},
           replace_term_at(cur_, ti, condition_expansion(t, z)));
  }

  void rule1_insert(const VertexSet& outs, const VertexSet& z) {
    if (!ok_) return;
    auto [ti, t] = locate(outs);
    if (!ok_) return;
    ProbTerm nt = t;
    nt.conditions.insert(z.begin(), z.end());
    record("Rule1", t, true, rule1_premise(t, g_, z),
           replace_term_at(cur_, ti, make_term(nt)));
  }

  /// Demotes z from do to conditions when z ⊆ do-set, promotes otherwise.
  void rule2(const VertexSet& outs, const VertexSet& z) {
    if (!ok_) return;
    auto [ti, t] = locate(outs);
    if (!ok_) return;
    ProbTerm nt = t;
    bool demote = std::all_of(z.begin(), z.end(), [&](const std::string& v) {
      return base_names(t.do_set).count(v) != 0;
    });
    for (const auto& v : z) {
      if (demote) {
        nt.do_set.erase(v);
        nt.conditions.insert(v);
      } else {
        nt.conditions.erase(v);
        nt.do_set.insert(v);
      }
    }
    record("Rule2", t, true, rule2_premise(t, g_, z),
           replace_term_at(cur_, ti, make_term(nt)));
  }

  void rule3_delete(const VertexSet& outs, const VertexSet& z) {
    if (!ok_) return;
    auto [ti, t] = locate(outs);
    if (!ok_) return;
    ProbTerm nt = t;
    for (const auto& v : z) nt.do_set.erase(v);
    record("Rule3", t, true, rule3_premise(t, g_, z),
           replace_term_at(cur_, ti, make_term(nt)));
  }

  void rule3_insert(const VertexSet& outs, const VertexSet& z) {
    if (!ok_) return;
    auto [ti, t] = locate(outs);
    if (!ok_) return;
    ProbTerm nt = t;
    nt.do_set.insert(z.begin(), z.end());
    record("Rule3", t, true, rule3_premise(nt, g_, z),
           replace_term_at(cur_, ti, make_term(nt)));
  }

  void selection_attach(const VertexSet& outs) {
    if (!ok_) return;
    auto [ti, t] = locate(outs);
    if (!ok_) return;
    ProbTerm nt = t;
    nt.selected = true;
    record("SelectionAttach", t, true, selection_premise(t, g_),
           replace_term_at(cur_, ti, make_term(nt)));
  }

  void domain_exchange(const VertexSet& outs, const std::string& to,
                       const VertexSet& snodes) {
    if (!ok_) return;
    auto [ti, t] = locate(outs);
    if (!ok_) return;
    ProbTerm nt = t;
    nt.domain = to;
    record("DomainExchange", t, true, exchange_premise(t, g_, snodes),
           replace_term_at(cur_, ti, make_term(nt)));
  }

 private:
  std::pair<size_t, ProbTerm> locate(const VertexSet& outs_base) {
    auto terms = collect_terms(cur_);
    for (size_t i = 0; i < terms.size(); ++i)
      if (base_names(terms[i].outcomes) == outs_base) return {i, terms[i]};
    ok_ = false;
    return {0, ProbTerm{}};
  }

  void record(std::string rule, const ProbTerm& t, bool has_premise,
              Premise premise, ExprPtr next) {
    if (has_premise && !check_premise(premise, g_)) {
      ok_ = false;
      return;
    }
    RewriteStep s;
    s.rule = std::move(rule);
    s.focus = focus_of(t);
    s.has_premise = has_premise && !premise.trivial();
    s.premise = premise;
    s.before = cur_;
    s.after = canonicalize(next);
    cur_ = s.after;
    d_.steps.push_back(std::move(s));
  }

  const Graph& g_;
  Derivation d_;
  ExprPtr cur_;
  bool ok_ = true;
};

/// Adjustment script, optionally behind a surrogate-experiment tag zp:
/// insert do(zp); condition on z; exchange do(x) for x; drop do(x) from
/// the adjustment factor.
std::optional<Derivation> script_adjust(const Graph& g, const Query& q,
                                        const VertexSet& x, const VertexSet& y,
                                        const VertexSet& z,
                                        const VertexSet& zp) {
  Builder b(g, q);
  if (!zp.empty()) b.rule3_insert(y, zp);
  if (!z.empty()) b.condition(y, z);
  b.rule2(y, x);
  if (!z.empty()) b.rule3_delete(z, x);
  if (!b.ok()) return std::nullopt;
  return b.finish();
}

std::optional<Derivation> script_frontdoor(const Graph& g, const Query& q,
                                           const VertexSet& x,
                                           const VertexSet& y,
                                           const VertexSet& med,
                                           const VertexSet& w,
                                           const VertexSet& zp) {
  Builder b(g, q);
  if (!zp.empty()) b.rule3_insert(y, zp);
  if (!w.empty()) {
    b.condition(y, w);
    b.rule3_delete(w, x);
  }
  b.condition(y, med);
  b.rule2(med, x);    // demote: P(med|do(x),w) -> P(med|x,w)
  b.rule2(y, med);    // promote: P(y|do(x),med,w) -> P(y|do(x),do(med),w)
  b.rule3_delete(y, x);
  b.condition(y, x);  // binder gets primed on canonicalization
  b.rule3_delete(x, med);
  b.rule2(y, med);    // demote back: P(y|do(med),w,x') -> P(y|med,w,x')
  if (!b.ok()) return std::nullopt;
  return b.finish();
}

std::optional<Derivation> script_s_backdoor(const Graph& g, const Query& q,
                                            const VertexSet& x,
                                            const VertexSet& y,
                                            const VertexSet& z) {
  Builder b(g, q);
  if (!z.empty()) b.condition(y, z);
  b.rule2(y, x);
  if (!z.empty()) b.rule3_delete(z, x);
  b.selection_attach(y);
  if (!b.ok()) return std::nullopt;
  return b.finish();
}

std::optional<Derivation> script_transport(const Graph& g, const Query& q,
                                           const VertexSet& x,
                                           const VertexSet& y,
                                           const VertexSet& t,
                                           const std::string& source_domain,
                                           const VertexSet& snodes) {
  Builder b(g, q);
  if (!t.empty()) {
    b.condition(y, t);
    b.rule3_delete(t, x);
  }
  b.domain_exchange(y, source_domain, snodes);
  if (!b.ok()) return std::nullopt;
  return b.finish();
}

/// Weighting variant that factors the stratum-specific effect through the
/// observed mediators m, so every exchanged term conditions on the full
/// mechanism chain (the form produced by the transport algorithm).
std::optional<Derivation> script_transport_factored(
    const Graph& g, const Query& q, const VertexSet& x, const VertexSet& y,
    const VertexSet& t, const VertexSet& m, const std::string& source_domain,
    const VertexSet& snodes) {
  Builder b(g, q);
  b.condition(y, t);
  b.rule3_delete(t, x);
  b.condition(y, m);
  b.domain_exchange(y, source_domain, snodes);
  b.domain_exchange(m, source_domain, snodes);
  if (!b.ok()) return std::nullopt;
  return b.finish();
}

/// Accept a scripted derivation only if it verifies and lands on an
/// estimable expression.
std::optional<DeriveResult> accept(std::optional<Derivation> d, const Graph& g,
                                   const SourceCatalog& cat,
                                   const std::string& route) {
  if (!d) return std::nullopt;
  if (!estimable(d->final, cat).estimable) return std::nullopt;
  if (!verify(*d, g).ok) return std::nullopt;
  DeriveResult r;
  r.status = DeriveStatus::Derived;
  r.derivation = std::move(*d);
  r.route = route;
  return r;
}

bool for_each_subset_of(const VertexSet& pool,
                        const std::function<bool(const VertexSet&)>& visit) {
  std::vector<std::string> items(pool.begin(), pool.end());
  VertexSet current;
  std::function<bool(size_t, size_t)> rec = [&](size_t k, size_t start) {
    if (current.size() == k) return visit(current);
    for (size_t i = start; i < items.size(); ++i) {
      current.insert(items[i]);
      if (rec(k, i + 1)) return true;
      current.erase(items[i]);
    }
    return false;
  };
  for (size_t k = 0; k <= items.size(); ++k)
    if (rec(k, 0)) return true;
  return false;
}

}  // namespace

DeriveResult identify(const Graph& g, const Query& q, const SourceCatalog& cat,
                      const SearchBudget& budget) {
  validated(g);
  VertexSet x = base_names(q.target.do_set);
  VertexSet y = base_names(q.target.outcomes);

  std::optional<DeriveResult> hit;
  if (!x.empty() && q.target.conditions.empty()) {
    VertexSet pool = set_minus(set_minus(g.endogenous(), x), y);
    // Backdoor adjustment.
    for_each_subset_of(pool, [&](const VertexSet& z) {
      if (!backdoor_admissible(g, x, y, z)) return false;
      hit = accept(script_adjust(g, q, x, y, z, {}), g, cat, "backdoor");
      return hit.has_value();
    });
    if (hit) return *hit;
    // Conditional frontdoor.
    for_each_subset_of(pool, [&](const VertexSet& med) {
      if (med.empty()) return false;
      VertexSet wpool = set_minus(pool, med);
      // Prefer the full pretreatment covariate set: conditioning on every
      // available nondescendant keeps the estimand stable under refinement
      // of the covariate pool.
      VertexSet wfull = set_minus(wpool, descendants(g, x));
      if (frontdoor_admissible(g, x, y, med, wfull)) {
        hit = accept(script_frontdoor(g, q, x, y, med, wfull, {}), g, cat,
                     "frontdoor");
        if (hit) return true;
      }
      return for_each_subset_of(wpool, [&](const VertexSet& w) {
        if (!frontdoor_admissible(g, x, y, med, w)) return false;
        hit = accept(script_frontdoor(g, q, x, y, med, w, {}), g, cat,
                     "frontdoor");
        return hit.has_value();
      });
    });
    if (hit) return *hit;
    // Surrogate experiments.
    VertexSet exp_vars;
    for (const auto& s : cat.sources)
      if (s.experimental && s.domain == q.target.domain)
        exp_vars.insert(s.intervened.begin(), s.intervened.end());
    exp_vars = set_minus(set_minus(exp_vars, x), y);
    if (!exp_vars.empty()) {
      if (auto zr = zid_sufficient(g, x, y, exp_vars)) {
        hit = accept(script_adjust(g, q, x, y, zr->adjustment, zr->z_used), g,
                     cat, zr->route);
        if (hit) return *hit;
      }
      if (auto zr = zid_frontdoor(g, x, y, exp_vars)) {
        // Mediator route: the adjustment field holds the mediator set; the
        // covariate set is recovered by re-running the admissibility scan.
        VertexSet pool2 = set_minus(set_minus(pool, zr->z_used), zr->adjustment);
        Graph gm = mutilate(g, zr->z_used);
        for_each_subset_of(pool2, [&](const VertexSet& w) {
          if (!frontdoor_admissible(gm, x, y, zr->adjustment, w)) return false;
          hit = accept(script_frontdoor(g, q, x, y, zr->adjustment, w,
                                        zr->z_used),
                       g, cat, zr->route);
          return hit.has_value();
        });
        if (hit) return *hit;
      }
    }
  }
  return derive(q, g, cat, budget);
}

DeriveResult recover(const Graph& g, const Query& q, const SourceCatalog& cat,
                     const SearchBudget& budget) {
  validated(g);
  VertexSet x = base_names(q.target.do_set);
  VertexSet y = base_names(q.target.outcomes);
  if (!x.empty() && q.target.conditions.empty() &&
      !g.selection_vertices().empty()) {
    // s-backdoor over sets the unbiased sources actually measure
    // (condition (iv) of the criterion).
    VertexSet pool;
    for (const auto& s : cat.sources)
      if (!s.selected && s.domain == q.target.domain)
        pool.insert(s.measured.begin(), s.measured.end());
    pool = set_minus(set_minus(pool, x), y);
    std::optional<DeriveResult> hit;
    for_each_subset_of(pool, [&](const VertexSet& z) {
      if (!s_backdoor_admissible(g, x, y, z)) return false;
      hit = accept(script_s_backdoor(g, q, x, y, z), g, cat, "s-backdoor");
      return hit.has_value();
    });
    if (hit) return *hit;
  }
  return derive(q, g, cat, budget);
}

DeriveResult transport(const Graph& g, const Query& q, const SourceCatalog& cat,
                       const SearchBudget& budget) {
  validated(g);
  VertexSet x = base_names(q.target.do_set);
  VertexSet y = base_names(q.target.outcomes);
  if (!x.empty() && q.target.conditions.empty() &&
      !g.discrepancy_vertices().empty()) {
    // One experimental source covering x carries the do-terms.
    const Source* src = nullptr;
    for (const auto& s : cat.sources)
      if (s.domain != q.target.domain && s.experimental &&
          std::includes(s.intervened.begin(), s.intervened.end(), x.begin(),
                        x.end()))
        src = &s;
    const Source* tgt = cat.find(q.target.domain);
    if (src) {
      // Pre-treatment separators only; post-treatment cases go to search.
      VertexSet pool = set_minus(g.endogenous(), descendants(g, x));
      pool = set_minus(pool, y);
      if (tgt) {
        VertexSet meas;
        for (const auto& v : pool)
          if (tgt->measured.count(v)) meas.insert(v);
        pool = meas;
      } else {
        pool.clear();
      }
      // Observed mediators of x on y; when present the stratum-specific
      // effect is factored through them before exchanging domains.
      VertexSet mediators = set_minus(
          set_intersect(descendants(g, x), ancestors(g, y)), set_union(x, y));
      std::optional<DeriveResult> hit;
      for_each_subset_of(pool, [&](const VertexSet& t) {
        if (!s_admissible(g, x, y, t)) return false;
        if (!t.empty() && !mediators.empty())
          hit = accept(script_transport_factored(g, q, x, y, t, mediators,
                                                 src->domain,
                                                 src->discrepancies),
                       g, cat, "s-admissible");
        if (!hit)
          hit = accept(script_transport(g, q, x, y, t, src->domain,
                                        src->discrepancies),
                       g, cat, t.empty() ? "direct" : "s-admissible");
        return hit.has_value();
      });
      if (!hit && s_admissible(g, x, y, {})) {
        hit = accept(script_transport(g, q, x, y, {}, src->domain,
                                      src->discrepancies),
                     g, cat, "direct");
      }
      if (hit) return *hit;
    }
  }
  return derive(q, g, cat, budget);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json set_json(const VertexSet& s) {
  return nlohmann::json(std::vector<std::string>(s.begin(), s.end()));
}

VertexSet set_from(const nlohmann::json& j) {
  VertexSet out;
  for (const auto& v : j) out.insert(v.get<std::string>());
  return out;
}

}  // namespace

std::string derivation_to_json(const Derivation& d) {
  nlohmann::json j;
  j["query"] = render_text(make_term(d.query.target));
  j["steps"] = nlohmann::json::array();
  for (const auto& s : d.steps) {
    nlohmann::json js;
    js["rule"] = s.rule;
    js["focus"] = s.focus;
    if (s.has_premise) {
      js["premise"] = {{"x", set_json(s.premise.x)},
                       {"y", set_json(s.premise.y)},
                       {"z", set_json(s.premise.z)},
                       {"mutilation",
                        {{"cut_incoming", set_json(s.premise.cut_incoming)},
                         {"cut_outgoing", set_json(s.premise.cut_outgoing)}}}};
    } else {
      js["premise"] = nullptr;
    }
    js["before"] = render_text(s.before);
    js["after"] = render_text(s.after);
    j["steps"].push_back(std::move(js));
  }
  j["final"] = render_text(d.final);
  return j.dump(2);
}

Derivation derivation_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Derivation d;
  ExprPtr qe = parse_estimand(j.at("query").get<std::string>());
  if (qe->kind != Expr::Kind::Term)
    throw EstimandError("InvalidQuery", "query must be a single term");
  d.query.target = qe->term;
  for (const auto& js : j.at("steps")) {
    RewriteStep s;
    s.rule = js.at("rule").get<std::string>();
    s.focus = js.value("focus", std::string{});
    if (!js.at("premise").is_null()) {
      s.has_premise = true;
      const auto& p = js.at("premise");
      s.premise.x = set_from(p.at("x"));
      s.premise.y = set_from(p.at("y"));
      s.premise.z = set_from(p.at("z"));
      s.premise.cut_incoming = set_from(p.at("mutilation").at("cut_incoming"));
      s.premise.cut_outgoing = set_from(p.at("mutilation").at("cut_outgoing"));
    }
    s.before = parse_estimand(js.at("before").get<std::string>());
    s.after = parse_estimand(js.at("after").get<std::string>());
    d.steps.push_back(std::move(s));
  }
  d.final = parse_estimand(j.at("final").get<std::string>());
  return d;
}

}  // namespace dofuse
