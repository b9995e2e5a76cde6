#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "dofuse/graph.hpp"
#include "dofuse/textio.hpp"
#include "fixtures.hpp"

using namespace dofuse;

TEST_CASE("construction and kinds") {
  Graph g = fixtures::selection_confounded();
  CHECK(g.kind("S") == VertexKind::Selection);
  CHECK(g.kind("X") == VertexKind::Endogenous);
  CHECK(g.parents("Y") == VertexSet{"U", "X", "Z"});
  CHECK(g.children("Z") == VertexSet{"S", "X", "Y"});
  CHECK(g.endogenous() == VertexSet{"U", "X", "Y", "Z"});
  CHECK(g.selection_vertices() == VertexSet{"S"});
}

TEST_CASE("validate rejects cycles") {
  Graph g;
  g.add_vertex("A");
  g.add_vertex("B");
  g.add_edge("A", "B");
  g.add_edge("B", "A");
  CHECK_THROWS_WITH_AS(validated(g), doctest::Contains("A"), GraphError);
}

TEST_CASE("validate rejects emitting selection vertices") {
  Graph g;
  g.add_vertex("X");
  g.add_vertex("S", VertexKind::Selection);
  g.add_edge("S", "X");
  CHECK_THROWS_AS(validated(g), GraphError);
}

TEST_CASE("validate rejects receiving discrepancy vertices") {
  Graph g;
  g.add_vertex("X");
  g.add_vertex("S", VertexKind::Discrepancy);
  g.add_edge("X", "S");
  CHECK_THROWS_AS(validated(g), GraphError);
}

TEST_CASE("bidirected edges are forbidden on special vertices") {
  Graph g;
  g.add_vertex("X");
  g.add_vertex("S", VertexKind::Selection);
  g.add_bidirected("S", "X");
  CHECK_THROWS_AS(validated(g), GraphError);
}

TEST_CASE("mutilation is idempotent and commutes") {
  for (const Graph& g : {fixtures::diet_graph(), fixtures::backdoor_maze(),
                         fixtures::surrogate_graph()}) {
    for (const auto& a : g.vertex_names()) {
      for (const auto& b : g.vertex_names()) {
        Graph in_a = mutilate(g, {a});
        CHECK(mutilate(in_a, {a}) == in_a);
        CHECK(mutilate(mutilate(g, {a}), {b}) == mutilate(mutilate(g, {b}), {a}));
        CHECK(mutilate(mutilate(g, {a}, {}), {}, {b}) ==
              mutilate(mutilate(g, {}, {b}), {a}, {}));
      }
    }
  }
}

TEST_CASE("descendants are ancestors in the reversed graph") {
  for (const Graph& g : {fixtures::diet_graph(), fixtures::backdoor_maze(),
                         fixtures::transport_two_sources()}) {
    Graph r = reversed(g);
    for (const auto& v : g.vertex_names())
      CHECK(descendants(g, {v}) == ancestors(r, {v}));
  }
}

TEST_CASE("topological order respects every edge") {
  Graph g = fixtures::backdoor_maze();
  auto order = topological_order(g);
  std::map<std::string, size_t> pos;
  for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  for (const auto& [a, b] : g.directed_edges()) CHECK(pos[a] < pos[b]);
  CHECK(order.size() == g.vertex_names().size());
}

TEST_CASE("graph text round trip") {
  for (const Graph& g :
       {fixtures::chain_fork(), fixtures::diet_graph(),
        fixtures::backdoor_maze(), fixtures::mediator_graph(),
        fixtures::selection_confounded(), fixtures::transport_two_sources(),
        fixtures::fusion_graph()}) {
    Graph h = parse_graph(print_graph(g));
    CHECK(h == g);
    CHECK(print_graph(h) == print_graph(g));
  }
}

TEST_CASE("graph parser diagnostics carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_graph("var A\nA -> B\n"),
                       doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_AS(parse_graph("var A\nvar A\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("var A B\nA => B\n"), ParseError);
  // Validation failures surface as parse errors too.
  CHECK_THROWS_AS(parse_graph("var A B\nA -> B\nB -> A\n"), ParseError);
}

TEST_CASE("source spec parsing") {
  Graph g = fixtures::selection_two_covariates();
  SourceCatalog cat =
      parse_sources("obs selected\nmarginal Z,W\n", g);
  REQUIRE(cat.sources.size() == 2);
  CHECK(cat.sources[0].selected);
  CHECK(cat.sources[0].domain == kTargetDomain);
  CHECK(cat.sources[0].measured == g.endogenous());
  CHECK_FALSE(cat.sources[1].selected);
  CHECK(cat.sources[1].measured == VertexSet{"W", "Z"});

  Graph d = fixtures::transport_covariate();
  SourceCatalog tc = parse_sources("exp X snodes=S\nobs\n", d);
  CHECK(tc.sources[0].domain == "");  // distinct population, unnamed
  CHECK(tc.sources[0].intervened == VertexSet{"X"});
  CHECK(tc.sources[0].discrepancies == VertexSet{"S"});
  CHECK(tc.sources[1].domain == kTargetDomain);

  CHECK_THROWS_AS(parse_sources("exp Q\n", d), ParseError);
  CHECK_THROWS_AS(parse_sources("obs snodes=X\n", d), ParseError);
  CHECK_THROWS_AS(parse_sources("obs selected\n", d), ParseError);
  CHECK_THROWS_AS(parse_sources("", d), ParseError);
}
