#include <benchmark/benchmark.h>

#include "dofuse/engine.hpp"
#include "dofuse/oracle.hpp"
#include "dofuse/separation.hpp"
#include "fixtures.hpp"

using namespace dofuse;

static void BM_DSeparation(benchmark::State& state) {
  Graph g = fixtures::backdoor_maze();
  for (auto _ : state)
    benchmark::DoNotOptimize(d_separated(g, {"X"}, {"Y"}, {"W2", "W5"}));
}
BENCHMARK(BM_DSeparation);

static void BM_BackdoorEnumeration(benchmark::State& state) {
  Graph g = fixtures::backdoor_maze();
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerate_backdoor_sets(
        g, {"X"}, {"Y"}, {"W1", "W2", "W3", "W4", "W5", "W6"}));
}
BENCHMARK(BM_BackdoorEnumeration);

static void BM_IdentifyAdjustment(benchmark::State& state) {
  Graph g = fixtures::diet_graph();
  SourceCatalog cat = fixtures::observational(g);
  Query q;
  q.target.outcomes = {"Y"};
  q.target.do_set = {"C"};
  for (auto _ : state) benchmark::DoNotOptimize(identify(g, q, cat, {}));
}
BENCHMARK(BM_IdentifyAdjustment);

static void BM_RecoverySearch(benchmark::State& state) {
  Graph g = fixtures::selection_on_cause();
  SourceCatalog cat = fixtures::selected_only(g);
  Query q;
  q.target.outcomes = {"Y"};
  q.target.do_set = {"X"};
  for (auto _ : state) benchmark::DoNotOptimize(recover(g, q, cat, {}));
}
BENCHMARK(BM_RecoverySearch);

static void BM_OracleJoint(benchmark::State& state) {
  Graph g = fixtures::diet_graph();
  Scm m = random_scm(g, 2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(joint(m));
}
BENCHMARK(BM_OracleJoint);

BENCHMARK_MAIN();
