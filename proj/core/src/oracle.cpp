#include "dofuse/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "json.hpp"

namespace dofuse {

namespace {

constexpr double kEnumerationGuard = 1e7;
constexpr double kDenominatorFloor = 1e-14;

std::vector<size_t> strides_of(const std::vector<int>& cards) {
  std::vector<size_t> st(cards.size());
  size_t acc = 1;
  for (size_t i = cards.size(); i-- > 0;) {
    st[i] = acc;
    acc *= static_cast<size_t>(cards[i]);
  }
  return st;
}

size_t table_size(const std::vector<int>& cards) {
  size_t acc = 1;
  for (int c : cards) acc *= static_cast<size_t>(c);
  return acc;
}

bool advance(std::vector<int>& vals, const std::vector<int>& cards) {
  for (size_t i = vals.size(); i-- > 0;) {
    if (++vals[i] < cards[i]) return true;
    vals[i] = 0;
  }
  return false;
}

}  // namespace

int Dist::card_of(const std::string& v) const {
  for (size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == v) return cards[i];
  throw OracleError("UnknownVariable", "no axis named " + v);
}

Dist make_dist(std::vector<std::string> vars, std::vector<int> cards) {
  Dist d;
  d.vars = std::move(vars);
  d.cards = std::move(cards);
  d.table.assign(table_size(d.cards), 0.0);
  return d;
}

namespace {

// Axes sorted by name; every public operation returns sorted-axis tables.
Dist sort_axes(const Dist& d) {
  std::vector<size_t> order(d.vars.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return d.vars[a] < d.vars[b]; });
  bool sorted = true;
  for (size_t i = 0; i < order.size(); ++i) sorted &= order[i] == i;
  if (sorted) return d;

  std::vector<std::string> vars;
  std::vector<int> cards;
  for (size_t i : order) {
    vars.push_back(d.vars[i]);
    cards.push_back(d.cards[i]);
  }
  Dist out = make_dist(vars, cards);
  auto src_strides = strides_of(d.cards);
  std::vector<int> vals(vars.size(), 0);
  size_t lin = 0;
  do {
    size_t src = 0;
    for (size_t i = 0; i < order.size(); ++i)
      src += static_cast<size_t>(vals[i]) * src_strides[order[i]];
    out.table[lin++] = d.table[src];
  } while (advance(vals, cards));
  return out;
}

// Per-result-axis stride into an operand (0 for axes the operand lacks).
std::vector<size_t> operand_strides(const std::vector<std::string>& result_vars,
                                    const Dist& op) {
  auto st = strides_of(op.cards);
  std::vector<size_t> out(result_vars.size(), 0);
  for (size_t i = 0; i < result_vars.size(); ++i)
    for (size_t j = 0; j < op.vars.size(); ++j)
      if (op.vars[j] == result_vars[i]) out[i] = st[j];
  return out;
}

template <typename Op>
Dist broadcast(const Dist& a, const Dist& b, Op op) {
  std::vector<std::string> vars;
  std::vector<int> cards;
  {
    std::map<std::string, int> merged;
    for (size_t i = 0; i < a.vars.size(); ++i) merged[a.vars[i]] = a.cards[i];
    for (size_t i = 0; i < b.vars.size(); ++i) {
      auto [it, fresh] = merged.emplace(b.vars[i], b.cards[i]);
      if (!fresh && it->second != b.cards[i])
        throw OracleError("CardMismatch", "axis " + b.vars[i]);
    }
    for (const auto& [v, c] : merged) {
      vars.push_back(v);
      cards.push_back(c);
    }
  }
  Dist out = make_dist(vars, cards);
  auto sa = operand_strides(vars, a);
  auto sb = operand_strides(vars, b);
  std::vector<int> vals(vars.size(), 0);
  size_t lin = 0;
  do {
    size_t ia = 0, ib = 0;
    for (size_t i = 0; i < vars.size(); ++i) {
      ia += static_cast<size_t>(vals[i]) * sa[i];
      ib += static_cast<size_t>(vals[i]) * sb[i];
    }
    out.table[lin++] = op(a.table[ia], b.table[ib]);
  } while (advance(vals, cards));
  return out;
}

}  // namespace

Dist marginalize(const Dist& d, const VertexSet& keep) {
  std::vector<std::string> vars;
  std::vector<int> cards;
  for (size_t i = 0; i < d.vars.size(); ++i) {
    if (keep.count(d.vars[i])) {
      vars.push_back(d.vars[i]);
      cards.push_back(d.cards[i]);
    }
  }
  Dist out = make_dist(vars, cards);
  auto so = operand_strides(d.vars, out);  // result axis strides, per d axis
  std::vector<int> vals(d.vars.size(), 0);
  size_t lin = 0;
  do {
    size_t io = 0;
    for (size_t i = 0; i < d.vars.size(); ++i)
      io += static_cast<size_t>(vals[i]) * so[i];
    out.table[io] += d.table[lin++];
  } while (advance(vals, d.cards));
  return sort_axes(out);
}

Dist multiply(const Dist& a, const Dist& b) {
  return broadcast(a, b, [](double x, double y) { return x * y; });
}

Dist divide(const Dist& num, const Dist& den) {
  return broadcast(num, den, [](double n, double d) {
    if (std::abs(d) < kDenominatorFloor) {
      if (std::abs(n) < 1e-9) return 0.0;  // 0/0 := 0
      throw OracleError("ZeroDenominator",
                        "nonzero mass over a zero-probability event");
    }
    return n / d;
  });
}

double max_abs_diff(const Dist& a, const Dist& b) {
  Dist d = broadcast(a, b, [](double x, double y) { return std::abs(x - y); });
  double m = 0.0;
  for (double v : d.table) m = std::max(m, v);
  return m;
}

double total_mass(const Dist& d) {
  double s = 0.0;
  for (double v : d.table) s += v;
  return s;
}

// ---------------------------------------------------------------------------
// Randomness

double Rng::u01() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int n) {
  return std::min(n - 1, static_cast<int>(u01() * n));
}

double Rng::exponential() { return -std::log(1.0 - u01()); }

std::vector<double> Rng::dirichlet(int n) {
  std::vector<double> out(n);
  double total = 0.0;
  for (auto& v : out) {
    v = exponential();
    total += v;
  }
  for (auto& v : out) v /= total;
  return out;
}

// ---------------------------------------------------------------------------
// SCM construction

std::string edge_exo_name(const std::string& a, const std::string& b) {
  return a < b ? "U(" + a + "<->" + b + ")" : "U(" + b + "<->" + a + ")";
}

std::string vertex_exo_name(const std::string& v) { return "U(" + v + ")"; }

namespace {

/// Vertices the SCM models: everything except discrepancy markers.
std::vector<std::string> modeled_vertices(const Graph& g) {
  std::vector<std::string> out;
  for (const auto& v : g.vertex_names())
    if (g.kind(v) != VertexKind::Discrepancy) out.push_back(v);
  return out;
}

size_t mech_rows(const Scm& m, const Mechanism& f) {
  size_t rows = 1;
  for (const auto& p : f.parents) rows *= m.sizes.at(p);
  for (const auto& e : f.exo_parents) rows *= m.exo.at(e).card;
  return rows;
}

void fill_mechanism(Scm& m, const std::string& v, Rng& rng) {
  Mechanism& f = m.mech.at(v);
  f.table.resize(mech_rows(m, f));
  int card = m.sizes.at(v);
  // The private block (last exogenous input, fastest-varying) covers every
  // value of v in each row, so no reachable conditional is exactly zero
  // and conditioning never degenerates.
  size_t own_card = m.exo.at(f.exo_parents.back()).card;
  for (size_t base = 0; base < f.table.size(); base += own_card) {
    for (size_t u = 0; u < own_card; ++u)
      f.table[base + u] = u < static_cast<size_t>(card)
                              ? static_cast<int>(u)
                              : rng.uniform_int(card);
    for (size_t u = own_card - 1; u > 0; --u) {
      size_t j = static_cast<size_t>(rng.uniform_int(static_cast<int>(u) + 1));
      std::swap(f.table[base + u], f.table[base + j]);
    }
  }
}

}  // namespace

Scm random_scm(const Graph& g, int size, uint64_t seed, int exo_card) {
  validated(g);
  Scm m;
  m.graph = g;
  Rng rng(seed);
  auto modeled = modeled_vertices(g);
  for (const auto& v : modeled) m.sizes[v] = size;
  for (const auto& [a, b] : g.bidirected_edges()) {
    ExoVar e{edge_exo_name(a, b), exo_card, rng.dirichlet(exo_card)};
    m.exo[e.name] = e;
  }
  for (const auto& v : modeled) {
    ExoVar e{vertex_exo_name(v), exo_card, rng.dirichlet(exo_card)};
    m.exo[e.name] = e;

    Mechanism f;
    for (const auto& p : g.parents(v))
      if (g.kind(p) != VertexKind::Discrepancy) f.parents.push_back(p);
    for (const auto& s : g.siblings(v))
      f.exo_parents.push_back(edge_exo_name(v, s));
    std::sort(f.exo_parents.begin(), f.exo_parents.end());
    f.exo_parents.push_back(vertex_exo_name(v));
    m.mech[v] = std::move(f);
    fill_mechanism(m, v, rng);
  }
  return m;
}

namespace {

/// Mechanism folded over its private exogenous block (when present as its
/// last input): a conditional table over (parents, shared exo parents).
struct FoldedCpt {
  std::vector<std::string> inputs;  // parents then shared exo blocks
  std::vector<int> input_cards;
  std::vector<std::vector<double>> rows;  // per row, distribution over v
};

FoldedCpt fold(const Scm& m, const std::string& v) {
  const Mechanism& f = m.mech.at(v);
  FoldedCpt c;
  bool has_own = !f.exo_parents.empty() &&
                 f.exo_parents.back() == vertex_exo_name(v);
  size_t shared_n = f.exo_parents.size() - (has_own ? 1 : 0);
  for (const auto& p : f.parents) {
    c.inputs.push_back(p);
    c.input_cards.push_back(m.sizes.at(p));
  }
  for (size_t i = 0; i < shared_n; ++i) {
    c.inputs.push_back(f.exo_parents[i]);
    c.input_cards.push_back(m.exo.at(f.exo_parents[i]).card);
  }
  int card = m.sizes.at(v);
  size_t own_card = has_own ? m.exo.at(f.exo_parents.back()).card : 1;
  const std::vector<double>* own_probs =
      has_own ? &m.exo.at(f.exo_parents.back()).probs : nullptr;
  size_t n_rows = table_size(c.input_cards);
  c.rows.assign(n_rows, std::vector<double>(card, 0.0));
  for (size_t r = 0; r < n_rows; ++r) {
    for (size_t u = 0; u < own_card; ++u) {
      int val = f.table[r * own_card + u];
      c.rows[r][val] += own_probs ? (*own_probs)[u] : 1.0;
    }
  }
  return c;
}

/// Exogenous blocks that feed more than one mechanism (edge blocks); these
/// are enumerated explicitly by the joint computation.
std::vector<std::string> shared_blocks(const Scm& m) {
  std::set<std::string> out;
  for (const auto& [v, f] : m.mech) {
    size_t n = f.exo_parents.size();
    bool has_own = n > 0 && f.exo_parents.back() == vertex_exo_name(v);
    for (size_t i = 0; i + (has_own ? 1 : 0) < n; ++i)
      out.insert(f.exo_parents[i]);
  }
  return {out.begin(), out.end()};
}

/// Core enumeration: P(non-fixed vertices | do(fixed)). Entries at a fixed
/// slice give the post-intervention conditional; with fixed empty this is
/// the joint.
Dist enumerate_dist(const Scm& m, const VertexSet& fixed) {
  require_vertices(m.graph, fixed);
  std::vector<std::string> vars;
  std::vector<int> cards;
  for (const auto& [v, c] : m.sizes) {
    vars.push_back(v);
    cards.push_back(c);
  }
  auto shared = shared_blocks(m);
  std::vector<int> shared_cards;
  double work = static_cast<double>(table_size(cards));
  for (const auto& e : shared) {
    shared_cards.push_back(m.exo.at(e).card);
    work *= m.exo.at(e).card;
  }
  if (work > kEnumerationGuard)
    throw OracleError("TooLarge", "enumeration would exceed the guard");

  std::map<std::string, size_t> var_pos;
  for (size_t i = 0; i < vars.size(); ++i) var_pos[vars[i]] = i;
  std::map<std::string, size_t> shared_pos;
  for (size_t i = 0; i < shared.size(); ++i) shared_pos[shared[i]] = i;

  struct Entry {
    bool fixed;
    size_t self;                       // index of v in vars
    FoldedCpt cpt;
    std::vector<bool> input_is_var;    // per cpt input
    std::vector<size_t> input_index;   // into vars or shared
  };
  std::vector<Entry> entries;
  for (const auto& v : vars) {
    Entry e;
    e.fixed = fixed.count(v) != 0;
    e.self = var_pos.at(v);
    if (!e.fixed) {
      e.cpt = fold(m, v);
      for (const auto& in : e.cpt.inputs) {
        bool is_var = var_pos.count(in) != 0;
        e.input_is_var.push_back(is_var);
        e.input_index.push_back(is_var ? var_pos.at(in) : shared_pos.at(in));
      }
    }
    entries.push_back(std::move(e));
  }

  Dist out = make_dist(vars, cards);
  std::vector<int> ucfg(shared.size(), 0);
  do {
    double w = 1.0;
    for (size_t i = 0; i < shared.size(); ++i)
      w *= m.exo.at(shared[i]).probs[ucfg[i]];
    std::vector<int> vals(vars.size(), 0);
    size_t lin = 0;
    do {
      double p = w;
      for (const auto& e : entries) {
        if (e.fixed) continue;
        size_t row = 0;
        for (size_t i = 0; i < e.cpt.inputs.size(); ++i) {
          int val = e.input_is_var[i] ? vals[e.input_index[i]]
                                      : ucfg[e.input_index[i]];
          row = row * e.cpt.input_cards[i] + val;
        }
        p *= e.cpt.rows[row][vals[e.self]];
        if (p == 0.0) break;
      }
      out.table[lin++] += p;
    } while (advance(vals, cards));
  } while (!shared.empty() && advance(ucfg, shared_cards));
  return out;  // vars already sorted (std::map order)
}

}  // namespace

Dist joint(const Scm& m) { return enumerate_dist(m, {}); }

Scm intervene(const Scm& m, const std::map<std::string, int>& assignment) {
  Scm out = m;
  VertexSet cut;
  for (const auto& [v, val] : assignment) {
    auto it = out.mech.find(v);
    if (it == out.mech.end())
      throw OracleError("UnknownVertex", v + " is not a modeled vertex");
    if (val < 0 || val >= out.sizes.at(v))
      throw OracleError("ValueOutOfDomain", v);
    it->second = Mechanism{{}, {}, {val}};
    cut.insert(v);
  }
  out.graph = mutilate(out.graph, cut);
  return out;
}

Dist post_intervention_dist(const Scm& m, const VertexSet& x) {
  return enumerate_dist(m, x);
}

Dist selection_view(const Dist& d, const VertexSet& selection) {
  Dist cur = d;
  for (const auto& s : selection) {
    Dist mask = make_dist({s}, {cur.card_of(s)});
    mask.table[1] = 1.0;
    cur = multiply(cur, mask);
    VertexSet keep(cur.vars.begin(), cur.vars.end());
    keep.erase(s);
    cur = marginalize(cur, keep);
  }
  double mass = total_mass(cur);
  if (mass < kDenominatorFloor)
    throw OracleError("ZeroSelectionMass", "selection event has no mass");
  for (auto& v : cur.table) v /= mass;
  return cur;
}

Scm domain_variant(const Scm& m, const VertexSet& targets, uint64_t seed) {
  Scm out = m;
  Rng rng(seed);
  for (const auto& v : targets) {
    if (!out.mech.count(v))
      throw OracleError("UnknownVertex", v + " is not a modeled vertex");
    ExoVar& own = out.exo.at(vertex_exo_name(v));
    own.probs = rng.dirichlet(own.card);
    fill_mechanism(out, v, rng);
  }
  return out;
}

namespace {

std::vector<std::string> modeled_topological(const Scm& m) {
  std::vector<std::string> out;
  for (const auto& v : topological_order(m.graph))
    if (m.sizes.count(v)) out.push_back(v);
  return out;
}

int mech_value(const Scm& m, const std::string& v,
               const std::map<std::string, int>& world,
               const std::map<std::string, int>& ucfg) {
  const Mechanism& f = m.mech.at(v);
  size_t row = 0;
  for (const auto& p : f.parents) row = row * m.sizes.at(p) + world.at(p);
  for (const auto& e : f.exo_parents)
    row = row * m.exo.at(e).card + ucfg.at(e);
  return f.table[row];
}

}  // namespace

Dist counterfactual_joint(const Scm& m, const std::string& x,
                          const std::string& y) {
  if (!m.sizes.count(x) || !m.sizes.count(y))
    throw OracleError("UnknownVertex", "counterfactual over unmodeled vertex");
  std::vector<std::string> blocks;
  std::vector<int> block_cards;
  double work = 1.0;
  for (const auto& [name, e] : m.exo) {
    blocks.push_back(name);
    block_cards.push_back(e.card);
    work *= e.card;
  }
  if (work > kEnumerationGuard)
    throw OracleError("TooLarge", "counterfactual enumeration too big");

  int xc = m.sizes.at(x);
  std::vector<std::string> vars;
  std::vector<int> cards;
  for (int v = 0; v < xc; ++v) {
    vars.push_back(y + "@" + std::to_string(v));
    cards.push_back(m.sizes.at(y));
  }
  for (const auto& [v, c] : m.sizes) {
    vars.push_back(v);
    cards.push_back(c);
  }
  Dist out = make_dist(vars, cards);
  auto out_strides = strides_of(out.cards);
  auto order = modeled_topological(m);

  std::vector<int> u(blocks.size(), 0);
  do {
    double w = 1.0;
    std::map<std::string, int> ucfg;
    for (size_t i = 0; i < blocks.size(); ++i) {
      w *= m.exo.at(blocks[i]).probs[u[i]];
      ucfg[blocks[i]] = u[i];
    }
    std::map<std::string, int> factual;
    for (const auto& v : order) factual[v] = mech_value(m, v, factual, ucfg);
    size_t idx = 0;
    for (int xv = 0; xv < xc; ++xv) {
      std::map<std::string, int> world;
      for (const auto& v : order)
        world[v] = (v == x) ? xv : mech_value(m, v, world, ucfg);
      idx += static_cast<size_t>(world.at(y)) * out_strides[xv];
    }
    size_t pos = xc;
    for (const auto& [v, c] : m.sizes)
      idx += static_cast<size_t>(factual.at(v)) * out_strides[pos++];
    out.table[idx] += w;
  } while (advance(u, block_cards));
  return sort_axes(out);
}

double average_causal_effect(const Scm& m, const std::string& x,
                             const std::string& y, int x1, int x0) {
  Dist d = post_intervention_dist(m, {x});
  Dist yx = marginalize(d, {x, y});
  auto value = [&](int xv) {
    double e = 0.0;
    for (int yv = 0; yv < yx.card_of(y); ++yv) {
      std::vector<int> vals;
      for (const auto& v : yx.vars) vals.push_back(v == x ? xv : yv);
      size_t idx = 0;
      auto st = strides_of(yx.cards);
      for (size_t i = 0; i < vals.size(); ++i)
        idx += static_cast<size_t>(vals[i]) * st[i];
      e += yv * yx.table[idx];
    }
    return e;
  };
  return value(x1) - value(x0);
}

// ---------------------------------------------------------------------------
// Estimand evaluation

namespace {

Dist rename_axes(const Dist& d, const std::map<std::string, std::string>& m) {
  Dist out = d;
  for (auto& v : out.vars) {
    auto it = m.find(v);
    if (it != m.end()) v = it->second;
  }
  return sort_axes(out);
}

Dist slice_at(const Dist& d, const std::string& var, int value) {
  Dist mask = make_dist({var}, {d.card_of(var)});
  mask.table[value] = 1.0;
  Dist masked = multiply(d, mask);
  VertexSet keep(masked.vars.begin(), masked.vars.end());
  keep.erase(var);
  return marginalize(masked, keep);
}

struct Evaluator {
  const WorldMap& worlds;
  // post-intervention tables are the expensive part; keyed by domain and
  // do-set.
  std::map<std::pair<std::string, VertexSet>, Dist> cache;

  const Scm& world(const std::string& domain) {
    auto it = worlds.find(domain);
    if (it == worlds.end())
      throw OracleError("NotEstimable", "no oracle for domain '" + domain + "'");
    return it->second;
  }

  const Dist& post(const std::string& domain, const VertexSet& dos) {
    auto key = std::make_pair(domain, dos);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, post_intervention_dist(world(domain), dos)).first;
    return it->second;
  }

  Dist term(const ProbTerm& t) {
    const Scm& m = world(t.domain);
    VertexSet outs = base_names(t.outcomes);
    VertexSet conds = base_names(t.conditions);
    VertexSet dos = base_names(t.do_set);
    if (outs.size() + conds.size() + dos.size() != t.variables().size())
      throw OracleError("NotEstimable",
                        "a term names two copies of one variable");
    const Dist& full = post(t.domain, dos);

    VertexSet sel;
    if (t.selected) sel = m.graph.selection_vertices();
    VertexSet num_keep = outs, den_keep = conds;
    num_keep.insert(conds.begin(), conds.end());
    num_keep.insert(dos.begin(), dos.end());
    num_keep.insert(sel.begin(), sel.end());
    den_keep.insert(dos.begin(), dos.end());
    den_keep.insert(sel.begin(), sel.end());

    Dist num = marginalize(full, num_keep);
    Dist den = marginalize(full, den_keep);
    for (const auto& s : sel) {
      num = slice_at(num, s, 1);
      den = slice_at(den, s, 1);
    }
    Dist cond = divide(num, den);

    std::map<std::string, std::string> ren;
    for (const auto& v : t.variables())
      if (base_name(v) != v) ren[base_name(v)] = v;
    return ren.empty() ? cond : rename_axes(cond, ren);
  }

  Dist eval(const ExprPtr& e) {
    switch (e->kind) {
      case Expr::Kind::Term:
        return term(e->term);
      case Expr::Kind::Sum: {
        Dist body = eval(e->body);
        VertexSet keep(body.vars.begin(), body.vars.end());
        for (const auto& b : e->bound) keep.erase(b);
        return marginalize(body, keep);
      }
      case Expr::Kind::Product: {
        Dist acc = eval(e->factors.front());
        for (size_t i = 1; i < e->factors.size(); ++i)
          acc = multiply(acc, eval(e->factors[i]));
        return acc;
      }
      case Expr::Kind::Quotient:
        return divide(eval(e->numerator), eval(e->denominator));
    }
    throw OracleError("NotEstimable", "unreachable expression kind");
  }
};

}  // namespace

Dist evaluate(const ExprPtr& e, const WorldMap& worlds) {
  Evaluator ev{worlds, {}};
  return ev.eval(e);
}

// ---------------------------------------------------------------------------
// Serialization

std::string scm_to_json(const Scm& m) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : m.graph.vertex_names()) {
    const char* kind = "endogenous";
    if (m.graph.kind(v) == VertexKind::Selection) kind = "selection";
    if (m.graph.kind(v) == VertexKind::Discrepancy) kind = "discrepancy";
    j["vertices"].push_back({{"name", v}, {"kind", kind}});
  }
  j["directed"] = nlohmann::json::array();
  for (const auto& [a, b] : m.graph.directed_edges())
    j["directed"].push_back({a, b});
  j["bidirected"] = nlohmann::json::array();
  for (const auto& [a, b] : m.graph.bidirected_edges())
    j["bidirected"].push_back({a, b});
  j["sizes"] = m.sizes;
  j["exogenous"] = nlohmann::json::array();
  for (const auto& [name, e] : m.exo)
    j["exogenous"].push_back(
        {{"name", name}, {"card", e.card}, {"probs", e.probs}});
  j["mechanisms"] = nlohmann::json::array();
  for (const auto& [v, f] : m.mech)
    j["mechanisms"].push_back({{"vertex", v},
                               {"parents", f.parents},
                               {"exo_parents", f.exo_parents},
                               {"table", f.table}});
  return j.dump(2);
}

Scm scm_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Scm m;
  for (const auto& v : j.at("vertices")) {
    std::string kind = v.at("kind");
    VertexKind k = VertexKind::Endogenous;
    if (kind == "selection") k = VertexKind::Selection;
    if (kind == "discrepancy") k = VertexKind::Discrepancy;
    m.graph.add_vertex(v.at("name"), k);
  }
  for (const auto& e : j.at("directed")) m.graph.add_edge(e.at(0), e.at(1));
  for (const auto& e : j.at("bidirected"))
    m.graph.add_bidirected(e.at(0), e.at(1));
  m.sizes = j.at("sizes").get<std::map<std::string, int>>();
  for (const auto& e : j.at("exogenous")) {
    ExoVar x{e.at("name"), e.at("card"), e.at("probs")};
    m.exo[x.name] = x;
  }
  for (const auto& f : j.at("mechanisms")) {
    Mechanism mech{f.at("parents"), f.at("exo_parents"), f.at("table")};
    m.mech[f.at("vertex")] = std::move(mech);
  }
  return m;
}

}  // namespace dofuse
