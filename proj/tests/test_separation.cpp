#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <vector>

#include "doctest.h"
#include "dofuse/separation.hpp"
#include "fixtures.hpp"

using namespace dofuse;

namespace {

// Reference d-separation by exhaustive simple-path enumeration: a path
// d-connects given Z when every interior collider has a descendant in Z
// and no interior non-collider lies in Z. Feasible only on small graphs.
struct HalfEdge {
  std::string to;
  bool head_at_from;
  bool head_at_to;
};

bool path_connected(const Graph& g, const VertexSet& x, const VertexSet& y,
                    const VertexSet& z) {
  std::map<std::string, std::vector<HalfEdge>> adj;
  for (const auto& [a, b] : g.directed_edges()) {
    adj[a].push_back({b, false, true});
    adj[b].push_back({a, true, false});
  }
  for (const auto& [a, b] : g.bidirected_edges()) {
    adj[a].push_back({b, true, true});
    adj[b].push_back({a, true, true});
  }
  VertexSet anz = ancestors(g, z);

  std::function<bool(const std::string&, bool, VertexSet&)> dfs =
      [&](const std::string& v, bool arrived_head, VertexSet& on_path) -> bool {
    for (const auto& e : adj[v]) {
      if (on_path.count(e.to)) continue;
      bool collider = arrived_head && e.head_at_from;
      bool passable = collider ? anz.count(v) != 0 : z.count(v) == 0;
      if (!passable) continue;
      if (y.count(e.to)) return true;
      on_path.insert(e.to);
      if (dfs(e.to, e.head_at_to, on_path)) return true;
      on_path.erase(e.to);
    }
    return false;
  };

  for (const auto& s : x) {
    if (y.count(s)) return true;
    for (const auto& e : adj[s]) {
      if (y.count(e.to)) return true;
      VertexSet on_path{s, e.to};
      if (dfs(e.to, e.head_at_to, on_path)) return true;
    }
  }
  return false;
}

void agree_with_oracle(const Graph& g) {
  auto names = g.vertex_names();
  VertexSet endo_set = g.endogenous();
  std::vector<std::string> endo(endo_set.begin(), endo_set.end());
  for (size_t i = 0; i < endo.size(); ++i) {
    for (size_t j = i + 1; j < endo.size(); ++j) {
      VertexSet x{endo[i]}, y{endo[j]};
      std::vector<std::string> rest;
      for (const auto& v : names)
        if (v != endo[i] && v != endo[j]) rest.push_back(v);
      // all conditioning sets of size <= 2
      std::vector<VertexSet> zs{{}};
      for (size_t a = 0; a < rest.size(); ++a) {
        zs.push_back({rest[a]});
        for (size_t b = a + 1; b < rest.size(); ++b)
          zs.push_back({rest[a], rest[b]});
      }
      for (const auto& z : zs) {
        bool fast = d_separated(g, x, y, z);
        bool slow = !path_connected(g, x, y, z);
        INFO(endo[i], " vs ", endo[j]);
        CHECK(fast == slow);
      }
    }
  }
}

}  // namespace

TEST_CASE("bayes-ball agrees with path enumeration") {
  agree_with_oracle(fixtures::chain_fork());
  agree_with_oracle(fixtures::diet_graph());
  agree_with_oracle(fixtures::instrument_graph());
  agree_with_oracle(fixtures::selection_on_cause());
  agree_with_oracle(fixtures::selection_confounded());
  agree_with_oracle(fixtures::transport_covariate());
  agree_with_oracle(fixtures::transport_mediator());
  agree_with_oracle(fixtures::surrogate_graph());
}

TEST_CASE("overlapping argument sets are rejected") {
  Graph g = fixtures::chain_fork();
  CHECK_THROWS_AS(d_separated(g, {"A"}, {"A"}, {}), GraphError);
  CHECK_THROWS_AS(d_separated(g, {"A"}, {"B"}, {"A"}), GraphError);
}

TEST_CASE("implied independencies of the chain-fork benchmark") {
  Graph g = fixtures::chain_fork();
  auto got = implied_independencies(g, 1);
  std::vector<IndependenceStatement> want{
      {{"A"}, {"B"}, {}},      {{"A"}, {"C"}, {}},      {{"A"}, {"E"}, {"D"}},
      {{"B"}, {"E"}, {"D"}},   {{"C"}, {"D"}, {"B"}},   {{"C"}, {"E"}, {"B"}},
      {{"C"}, {"E"}, {"D"}}};
  std::sort(want.begin(), want.end());
  CHECK(got == want);
}

TEST_CASE("separator search finds a smallest witness") {
  Graph g = fixtures::diet_graph();
  auto z = find_separator(g, {"C"}, {"H"}, {"E", "W", "Y"}, 2);
  REQUIRE(z.has_value());
  CHECK(d_separated(g, {"C"}, {"H"}, *z));
  CHECK(z->size() <= 2);

  Graph inst = fixtures::instrument_graph();
  CHECK_FALSE(find_separator(inst, {"X"}, {"Y"}, {"Z"}, 1).has_value());
}
