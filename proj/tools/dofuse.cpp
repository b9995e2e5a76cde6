#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "dofuse/criteria.hpp"
#include "dofuse/engine.hpp"
#include "dofuse/oracle.hpp"
#include "dofuse/separation.hpp"
#include "dofuse/textio.hpp"
#include "json.hpp"

namespace {

using namespace dofuse;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;

struct Options {
  std::string graph_path;
  std::string data_path;
  std::string format = "text";
  uint64_t seed = 1;
  int seeds = 0;
  int workers = 1;
  int max_steps = 12;
  int max_states = 200000;
};

void add_common(CLI::App* cmd, Options& opt, bool needs_data) {
  cmd->add_option("--graph,-g", opt.graph_path, "graph description file")
      ->required();
  if (needs_data)
    cmd->add_option("--data,-d", opt.data_path, "source catalogue file")
        ->required();
  cmd->add_option("--format,-f", opt.format, "text, latex, or json")
      ->check(CLI::IsMember({"text", "latex", "json"}));
  cmd->add_option("--seed", opt.seed, "base seed for oracle validation");
  cmd->add_option("--seeds", opt.seeds, "number of validation seeds");
  cmd->add_option("--workers", opt.workers, "threads for seed evaluation")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-steps", opt.max_steps, "derivation depth budget");
  cmd->add_option("--max-states", opt.max_states, "search state budget");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

VertexSet parse_set(const std::string& csv) {
  VertexSet out;
  std::string cur;
  std::stringstream ss(csv);
  while (std::getline(ss, cur, ',')) {
    std::string t;
    for (char c : cur)
      if (!std::isspace(static_cast<unsigned char>(c)))
        t.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (!t.empty()) out.insert(t);
  }
  return out;
}

std::string set_text(const VertexSet& s) {
  std::string out;
  for (const auto& v : s) {
    if (!out.empty()) out += ",";
    out += v;
  }
  return out;
}

std::string status_text(DeriveStatus s) {
  switch (s) {
    case DeriveStatus::Derived:
      return "derived";
    case DeriveStatus::NotDerivedWithinBudget:
      return "not-derived-within-budget";
    case DeriveStatus::ProvablyNot:
      return "provably-not";
  }
  return "unknown";
}

/// Worlds for every domain the expression mentions: the target world plus
/// per-domain variants resampled at the children of that source's
/// discrepancy vertices.
WorldMap build_worlds(const Graph& g, const SourceCatalog& cat,
                      const ExprPtr& final_expr, const ProbTerm& target,
                      uint64_t seed) {
  Scm base = random_scm(g, 2, seed);
  std::set<std::string> domains = domains_mentioned(final_expr);
  domains.insert(target.domain);
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

/// Max |estimand − ground truth| over `seeds` random worlds; the seed loop
/// is the only parallel section and the merge is a max, so the result is
/// identical for every worker count.
double validate_estimand(const Graph& g, const SourceCatalog& cat,
                         const Query& q, const ExprPtr& final_expr,
                         uint64_t seed, int seeds, int workers) {
  ProbTerm truth_term = q.target;
  truth_term.domain = kTargetDomain;
  ExprPtr truth_expr = make_term(truth_term);

  std::vector<double> errs(static_cast<size_t>(seeds), 0.0);
  auto run_range = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      WorldMap worlds =
          build_worlds(g, cat, final_expr, q.target, seed + static_cast<uint64_t>(i));
      Dist truth = evaluate(truth_expr, worlds);
      Dist got = evaluate(final_expr, worlds);
      errs[static_cast<size_t>(i)] = max_abs_diff(truth, got);
    }
  };
  int n = std::max(1, std::min(workers, seeds));
  if (n == 1) {
    run_range(0, seeds);
  } else {
    std::vector<std::thread> pool;
    int chunk = (seeds + n - 1) / n;
    for (int w = 0; w < n; ++w)
      pool.emplace_back(run_range, w * chunk,
                        std::min(seeds, (w + 1) * chunk));
    for (auto& t : pool) t.join();
  }
  double max_err = 0.0;
  for (double e : errs) max_err = std::max(max_err, e);
  return max_err;
}

int emit_report(const Options& opt, const Graph& g, const SourceCatalog& cat,
                const Query& q, const DeriveResult& r) {
  json report;
  report["query"] = render_text(make_term(q.target));
  report["status"] = status_text(r.status);
  report["estimand_text"] = nullptr;
  report["estimand_latex"] = nullptr;
  report["derivation"] = nullptr;
  report["validation"] = nullptr;
  if (r.status == DeriveStatus::Derived) {
    report["estimand_text"] = render_text(r.derivation.final);
    report["estimand_latex"] = render(r.derivation.final, RenderFormat::Latex);
    report["derivation"] = json::parse(derivation_to_json(r.derivation));
    report["route"] = r.route;
    if (opt.seeds > 0) {
      double err = validate_estimand(g, cat, q, r.derivation.final, opt.seed,
                                     opt.seeds, opt.workers);
      report["validation"] = {{"seeds", opt.seeds}, {"max_abs_error", err}};
    }
  } else {
    report["route"] = r.route;
    report["reason"] = r.reason;
  }

  if (opt.format == "json") {
    std::cout << report.dump(2) << "\n";
  } else if (r.status == DeriveStatus::Derived) {
    if (opt.format == "latex") {
      std::cout << report["estimand_latex"].get<std::string>() << "\n";
    } else {
      std::cout << "status: derived (" << r.route << ")\n";
      std::cout << "estimand: " << report["estimand_text"].get<std::string>()
                << "\n";
      for (size_t i = 0; i < r.derivation.steps.size(); ++i) {
        const auto& s = r.derivation.steps[i];
        std::cout << "  step " << i + 1 << " [" << s.rule << " @ " << s.focus
                  << "]: " << render_text(s.after) << "\n";
      }
      if (!report["validation"].is_null())
        std::cout << "validation: max abs error "
                  << report["validation"]["max_abs_error"].get<double>()
                  << " over " << opt.seeds << " seeds\n";
    }
  } else {
    std::cout << "status: " << status_text(r.status) << "\n";
    if (!r.reason.empty()) std::cout << "reason: " << r.reason << "\n";
  }
  return r.status == DeriveStatus::Derived ? kExitOk : kExitNegative;
}

Query parse_query(const std::string& text) {
  ExprPtr e = parse_estimand(text);
  if (e->kind != Expr::Kind::Term)
    throw EstimandError("InvalidQuery", "query must be a single term");
  return Query{e->term};
}

int run_dsep(const Options& opt, const std::string& spec) {
  Graph g = parse_graph(slurp(opt.graph_path));
  std::vector<std::string> parts;
  std::string cur;
  for (char c : spec) {
    if (c == '|') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  if (parts.size() != 2 && parts.size() != 3)
    throw std::runtime_error("dsep wants 'X | Y' or 'X | Y | Z'");
  VertexSet x = parse_set(parts[0]), y = parse_set(parts[1]);
  VertexSet z = parts.size() == 3 ? parse_set(parts[2]) : VertexSet{};
  bool sep = d_separated(g, x, y, z);
  if (opt.format == "json") {
    json report = {{"query", spec}, {"status", sep}};
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << (sep ? "d-separated" : "d-connected") << "\n";
  }
  return sep ? kExitOk : kExitNegative;
}

int run_ci_list(const Options& opt, int max_given) {
  Graph g = parse_graph(slurp(opt.graph_path));
  auto list = implied_independencies(g, max_given);
  if (opt.format == "json") {
    json arr = json::array();
    for (const auto& s : list)
      arr.push_back({{"left", set_text(s.left)},
                     {"right", set_text(s.right)},
                     {"given", set_text(s.given)}});
    std::cout << json{{"independencies", arr}}.dump(2) << "\n";
  } else {
    for (const auto& s : list) {
      std::cout << set_text(s.left) << " _||_ " << set_text(s.right);
      if (!s.given.empty()) std::cout << " | " << set_text(s.given);
      std::cout << "\n";
    }
  }
  return kExitOk;
}

int run_adjust(const Options& opt, bool frontdoor, const std::string& xs,
               const std::string& ys) {
  Graph g = parse_graph(slurp(opt.graph_path));
  VertexSet x = parse_set(xs), y = parse_set(ys);
  if (!frontdoor) {
    VertexSet pool = g.endogenous();
    for (const auto& v : x) pool.erase(v);
    for (const auto& v : y) pool.erase(v);
    auto rep = enumerate_backdoor_sets(g, x, y, pool);
    if (opt.format == "json") {
      json arr = json::array(), min = json::array();
      for (const auto& z : rep.admissible_sets) arr.push_back(set_text(z));
      for (const auto& z : rep.minimal_sets) min.push_back(set_text(z));
      std::cout << json{{"criterion", rep.criterion},
                        {"admissible_sets", arr},
                        {"minimal_sets", min}}
                       .dump(2)
                << "\n";
    } else {
      for (const auto& z : rep.admissible_sets)
        std::cout << "{" << set_text(z) << "}\n";
    }
    return rep.admissible_sets.empty() ? kExitNegative : kExitOk;
  }
  VertexSet pool = g.endogenous();
  for (const auto& v : x) pool.erase(v);
  for (const auto& v : y) pool.erase(v);
  // Smallest mediator set first, then smallest covariate set.
  std::vector<std::string> items(pool.begin(), pool.end());
  for (size_t mk = 1; mk <= items.size(); ++mk) {
    std::vector<bool> msel(items.size(), false);
    std::fill(msel.end() - static_cast<long>(mk), msel.end(), true);
    std::sort(msel.begin(), msel.end());
    // Iterate subsets of each cardinality via combinations.
    std::vector<size_t> idx(mk);
    std::function<bool(size_t, size_t, VertexSet&)> rec =
        [&](size_t k, size_t start, VertexSet& med) -> bool {
      if (med.size() == mk) {
        VertexSet wpool = pool;
        for (const auto& v : med) wpool.erase(v);
        std::vector<std::string> witems(wpool.begin(), wpool.end());
        std::function<bool(size_t, size_t, VertexSet&)> wrec =
            [&](size_t wk, size_t ws, VertexSet& w) -> bool {
          if (w.size() == wk) {
            if (!frontdoor_admissible(g, x, y, med, w)) return false;
            ExprPtr est = frontdoor_estimand(g, x, y, med, w);
            if (opt.format == "json") {
              std::cout << json{{"mediators", set_text(med)},
                                {"covariates", set_text(w)},
                                {"estimand_text", render_text(est)},
                                {"estimand_latex",
                                 render(est, RenderFormat::Latex)}}
                               .dump(2)
                        << "\n";
            } else if (opt.format == "latex") {
              std::cout << render(est, RenderFormat::Latex) << "\n";
            } else {
              std::cout << "mediators: {" << set_text(med) << "} covariates: {"
                        << set_text(w) << "}\n"
                        << render_text(est) << "\n";
            }
            return true;
          }
          for (size_t i = ws; i < witems.size(); ++i) {
            w.insert(witems[i]);
            if (wrec(wk, i + 1, w)) return true;
            w.erase(witems[i]);
          }
          return false;
        };
        for (size_t wk = 0; wk <= witems.size(); ++wk) {
          VertexSet w;
          if (wrec(wk, 0, w)) return true;
        }
        return false;
      }
      for (size_t i = start; i < items.size(); ++i) {
        med.insert(items[i]);
        if (rec(k, i + 1, med)) return true;
        med.erase(items[i]);
      }
      return false;
    };
    VertexSet med;
    if (rec(mk, 0, med)) return kExitOk;
  }
  std::cout << "no frontdoor pair found\n";
  return kExitNegative;
}

int run_engine_command(const Options& opt, const std::string& query_text,
                       const std::string& mode) {
  Graph g = parse_graph(slurp(opt.graph_path));
  SourceCatalog cat = parse_sources(slurp(opt.data_path), g);
  Query q = parse_query(query_text);
  SearchBudget budget;
  budget.max_steps = opt.max_steps;
  budget.max_states = opt.max_states;
  DeriveResult r;
  if (mode == "identify")
    r = identify(g, q, cat, budget);
  else if (mode == "recover")
    r = recover(g, q, cat, budget);
  else
    r = transport(g, q, cat, budget);
  return emit_report(opt, g, cat, q, r);
}

int run_validate(Options opt, const std::string& query_text,
                 const std::string& mode) {
  if (opt.seeds == 0) opt.seeds = 100;
  return run_engine_command(opt, query_text, mode);
}

int run_check(const Options& opt, const std::string& path) {
  Graph g = parse_graph(slurp(opt.graph_path));
  Derivation d = derivation_from_json(slurp(path));
  VerifyResult v = verify(d, g);
  if (opt.format == "json") {
    std::cout << json{{"ok", v.ok},
                      {"failing_step", v.failing_step},
                      {"message", v.message}}
                     .dump(2)
              << "\n";
  } else if (v.ok) {
    std::cout << "derivation verifies (" << d.steps.size() << " steps)\n";
  } else {
    std::cout << "step " << v.failing_step + 1 << " fails: " << v.message
              << "\n";
  }
  return v.ok ? kExitOk : kExitNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symbolic identification of causal effects on mixed graphs"};
  app.require_subcommand(1);
  Options opt;

  std::string dsep_spec, query_text, check_path, adjust_x, adjust_y;
  int max_given = 1;
  bool frontdoor = false;

  auto* dsep = app.add_subcommand("dsep", "test d-separation 'X | Y [| Z]'");
  dsep->add_option("spec", dsep_spec)->required();
  add_common(dsep, opt, false);

  auto* ci = app.add_subcommand("ci-list", "implied independencies");
  ci->add_option("--max-given", max_given);
  add_common(ci, opt, false);

  auto* adj = app.add_subcommand("adjust", "adjustment-set criteria");
  adj->add_flag("--frontdoor", frontdoor);
  adj->add_flag("--backdoor", "default criterion");
  adj->add_option("x", adjust_x)->required();
  adj->add_option("y", adjust_y)->required();
  add_common(adj, opt, false);

  std::string mode;
  for (const char* name : {"identify", "recover", "transport", "validate"}) {
    auto* c = app.add_subcommand(
        name, std::string(name) + " a causal query against the catalogue");
    c->add_option("query", query_text)->required();
    add_common(c, opt, true);
    c->callback([&mode, name] { mode = name; });
  }

  auto* chk = app.add_subcommand("check-derivation", "verify a trace file");
  chk->add_option("file", check_path)->required();
  add_common(chk, opt, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (dsep->parsed()) return run_dsep(opt, dsep_spec);
    if (ci->parsed()) return run_ci_list(opt, max_given);
    if (adj->parsed()) return run_adjust(opt, frontdoor, adjust_x, adjust_y);
    if (chk->parsed()) return run_check(opt, check_path);
    if (mode == "validate")
      return run_validate(opt, query_text, "identify");
    return run_engine_command(opt, query_text, mode);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitError;
  }
}
