#include "dofuse/criteria.hpp"

#include <algorithm>
#include <functional>

#include "dofuse/separation.hpp"

namespace dofuse {

namespace {

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

VertexSet set_minus(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  for (const auto& v : a)
    if (!b.count(v)) out.insert(v);
  return out;
}

/// Visit subsets of pool by cardinality then lexicographic member order;
/// stop early when visit returns true.
bool for_each_subset(const VertexSet& pool, size_t max_size,
                     const std::function<bool(const VertexSet&)>& visit) {
  std::vector<std::string> items(pool.begin(), pool.end());
  max_size = std::min(max_size, items.size());
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
  for (size_t k = 0; k <= max_size; ++k)
    if (rec(k, 0)) return true;
  return false;
}

ExprPtr prob(VertexSet outcomes, VertexSet conditions = {}, VertexSet dos = {},
             bool selected = false, std::string domain = kTargetDomain) {
  ProbTerm t;
  t.outcomes = std::move(outcomes);
  t.conditions = std::move(conditions);
  t.do_set = std::move(dos);
  t.selected = selected;
  t.domain = std::move(domain);
  return make_term(std::move(t));
}

}  // namespace

bool backdoor_admissible(const Graph& g, const VertexSet& x, const VertexSet& y,
                         const VertexSet& z) {
  VertexSet desc = descendants(g, x);
  for (const auto& v : z)
    if (desc.count(v)) return false;
  return d_separated(mutilate(g, {}, x), x, y, z);
}

AdjustmentReport enumerate_backdoor_sets(const Graph& g, const VertexSet& x,
                                         const VertexSet& y,
                                         const VertexSet& universe) {
  AdjustmentReport rep;
  rep.criterion = "backdoor";
  for_each_subset(universe, universe.size(), [&](const VertexSet& z) {
    if (backdoor_admissible(g, x, y, z)) rep.admissible_sets.push_back(z);
    return false;
  });
  for (const auto& z : rep.admissible_sets) {
    bool minimal = std::none_of(
        rep.admissible_sets.begin(), rep.admissible_sets.end(),
        [&](const VertexSet& s) {
          return s != z && std::includes(z.begin(), z.end(), s.begin(), s.end());
        });
    if (minimal) rep.minimal_sets.push_back(z);
  }
  return rep;
}

ExprPtr backdoor_estimand(const Graph& g, const VertexSet& x,
                          const VertexSet& y, const VertexSet& z) {
  if (!backdoor_admissible(g, x, y, z))
    throw EstimandError("NotAdmissible", "set fails the backdoor criterion");
  ExprPtr main = prob(y, set_union(x, z));
  if (z.empty()) return canonicalize(main);
  return canonicalize(make_sum(z, make_product({main, prob(z)})));
}

bool intercepts_all_directed_paths(const Graph& g, const VertexSet& x,
                                   const VertexSet& y, const VertexSet& z) {
  require_vertices(g, x);
  require_vertices(g, y);
  require_vertices(g, z);
  VertexSet seen = x;
  std::vector<std::string> frontier(x.begin(), x.end());
  while (!frontier.empty()) {
    std::string v = frontier.back();
    frontier.pop_back();
    for (const auto& c : g.children(v)) {
      if (z.count(c)) continue;
      if (y.count(c)) return false;
      if (seen.insert(c).second) frontier.push_back(c);
    }
  }
  return true;
}

bool frontdoor_admissible(const Graph& g, const VertexSet& x,
                          const VertexSet& y, const VertexSet& z,
                          const VertexSet& w) {
  if (!intercepts_all_directed_paths(g, x, y, z)) return false;
  if (!d_separated(mutilate(g, {}, x), x, z, w)) return false;
  return d_separated(mutilate(g, {}, z), z, y, set_union(x, w));
}

ExprPtr frontdoor_estimand(const Graph& g, const VertexSet& x,
                           const VertexSet& y, const VertexSet& z,
                           const VertexSet& w) {
  if (!frontdoor_admissible(g, x, y, z, w))
    throw EstimandError("NotAdmissible", "sets fail the frontdoor criterion");
  VertexSet xp;
  for (const auto& v : x) xp.insert(v + "'");
  ExprPtr inner = make_sum(
      xp, make_product({prob(y, set_union(w, set_union(z, xp))),
                        prob(xp, w)}));
  std::vector<ExprPtr> outer{prob(z, set_union(w, x))};
  if (!w.empty()) outer.push_back(prob(w));
  outer.push_back(inner);
  return canonicalize(make_sum(set_union(z, w), make_product(std::move(outer))));
}

ExprPtr add_do_everywhere(const ExprPtr& e, const VertexSet& extra) {
  switch (e->kind) {
    case Expr::Kind::Term: {
      ProbTerm t = e->term;
      t.do_set.insert(extra.begin(), extra.end());
      return make_term(std::move(t));
    }
    case Expr::Kind::Sum:
      return make_sum(e->bound, add_do_everywhere(e->body, extra));
    case Expr::Kind::Product: {
      std::vector<ExprPtr> fs;
      for (const auto& f : e->factors) fs.push_back(add_do_everywhere(f, extra));
      return make_product(std::move(fs));
    }
    case Expr::Kind::Quotient:
      return make_quotient(add_do_everywhere(e->numerator, extra),
                           add_do_everywhere(e->denominator, extra));
  }
  return e;
}

namespace {

std::optional<VertexSet> first_backdoor_set(const Graph& g, const VertexSet& x,
                                            const VertexSet& y,
                                            const VertexSet& universe) {
  std::optional<VertexSet> found;
  for_each_subset(universe, universe.size(), [&](const VertexSet& z) {
    if (backdoor_admissible(g, x, y, z)) {
      found = z;
      return true;
    }
    return false;
  });
  return found;
}

}  // namespace

std::optional<ZidResult> zid_sufficient(const Graph& g, const VertexSet& x,
                                        const VertexSet& y,
                                        const VertexSet& z_exp) {
  VertexSet universe = set_minus(set_minus(g.endogenous(), x), y);
  // (i) no experiments needed.
  if (auto z = first_backdoor_set(g, x, y, universe))
    return ZidResult{{}, *z, "backdoor", backdoor_estimand(g, x, y, *z)};
  // (ii) adjust after cutting arrows into an experimental subset whose
  // directed influence on y is intercepted by x.
  std::optional<ZidResult> found;
  for_each_subset(z_exp, z_exp.size(), [&](const VertexSet& zp) {
    if (zp.empty()) return false;
    if (!intercepts_all_directed_paths(g, zp, y, x)) return false;
    Graph gm = mutilate(g, zp);
    auto z = first_backdoor_set(gm, x, y, set_minus(universe, zp));
    if (!z) return false;
    ExprPtr est = add_do_everywhere(backdoor_estimand(gm, x, y, *z), zp);
    found = ZidResult{zp, *z, "zid-backdoor", canonicalize(est)};
    return true;
  });
  return found;
}

std::optional<ZidResult> zid_frontdoor(const Graph& g, const VertexSet& x,
                                       const VertexSet& y,
                                       const VertexSet& z_exp) {
  VertexSet universe = set_minus(set_minus(g.endogenous(), x), y);
  std::optional<ZidResult> found;
  for_each_subset(z_exp, z_exp.size(), [&](const VertexSet& zp) {
    if (zp.empty()) return false;
    if (!intercepts_all_directed_paths(g, zp, y, x)) return false;
    Graph gm = mutilate(g, zp);
    VertexSet pool = set_minus(universe, zp);
    return for_each_subset(pool, pool.size(), [&](const VertexSet& med) {
      if (med.empty()) return false;
      VertexSet wpool = set_minus(pool, med);
      return for_each_subset(wpool, wpool.size(), [&](const VertexSet& w) {
        if (!frontdoor_admissible(gm, x, y, med, w)) return false;
        ExprPtr est =
            add_do_everywhere(frontdoor_estimand(gm, x, y, med, w), zp);
        found = ZidResult{zp, med, "zid-frontdoor", canonicalize(est)};
        return true;
      });
    });
  });
  return found;
}

bool s_backdoor_admissible(const Graph& g_s, const VertexSet& x,
                           const VertexSet& y, const VertexSet& z) {
  VertexSet sel = g_s.selection_vertices();
  if (sel.empty())
    throw GraphError("NoSelectionVertex", "graph has no selection vertex");
  VertexSet desc = descendants(g_s, x);
  VertexSet z_plus, z_minus;
  for (const auto& v : z) (desc.count(v) ? z_minus : z_plus).insert(v);
  if (!d_separated(mutilate(g_s, {}, x), x, y, z_plus)) return false;
  if (!z_minus.empty() &&
      !d_separated(g_s, z_minus, y, set_union(x, z_plus)))
    return false;
  return d_separated(g_s, y, sel, set_union(x, z));
}

ExprPtr s_backdoor_estimand(const Graph& g_s, const VertexSet& x,
                            const VertexSet& y, const VertexSet& z) {
  if (!s_backdoor_admissible(g_s, x, y, z))
    throw EstimandError("NotAdmissible", "set fails the s-backdoor criterion");
  ExprPtr biased = prob(y, set_union(x, z), {}, /*selected=*/true);
  if (z.empty()) return canonicalize(biased);
  return canonicalize(make_sum(z, make_product({biased, prob(z)})));
}

bool s_admissible(const Graph& d, const VertexSet& x, const VertexSet& y,
                  const VertexSet& t) {
  VertexSet snodes = d.discrepancy_vertices();
  if (snodes.empty())
    throw GraphError("NoDiscrepancyVertex", "graph has no discrepancy vertex");
  return d_separated(mutilate(d, x), snodes, y, set_union(t, x));
}

ExprPtr transport_estimand(const Graph& d, const VertexSet& x,
                           const VertexSet& y, const VertexSet& t) {
  if (!s_admissible(d, x, y, t))
    throw EstimandError("NotAdmissible", "set is not s-admissible");
  ExprPtr source = prob(y, t, x, false, /*domain=*/"");
  if (t.empty()) return canonicalize(source);
  return canonicalize(
      make_sum(t, make_product({source, prob(t, {}, {}, false, "*")})));
}

}  // namespace dofuse
