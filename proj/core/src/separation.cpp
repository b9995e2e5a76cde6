#include "dofuse/separation.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace dofuse {

namespace {

// Bidirected edges expand to an explicit latent parent of both endpoints,
// after which plain Bayes-ball reachability on a DAG applies. Latent names
// use a character that cannot appear in identifiers.
Graph latent_expansion(const Graph& g) {
  Graph out;
  for (const auto& name : g.vertex_names()) out.add_vertex(name, g.kind(name));
  for (const auto& [from, to] : g.directed_edges()) out.add_edge(from, to);
  int i = 0;
  for (const auto& [a, b] : g.bidirected_edges()) {
    std::string latent = "#u" + std::to_string(i++);
    out.add_vertex(latent, VertexKind::Endogenous);
    out.add_edge(latent, a);
    out.add_edge(latent, b);
  }
  return out;
}

void check_disjoint(const VertexSet& x, const VertexSet& y, const VertexSet& z) {
  auto overlap = [](const VertexSet& a, const VertexSet& b) {
    return std::any_of(a.begin(), a.end(),
                       [&](const std::string& v) { return b.count(v) != 0; });
  };
  if (overlap(x, y) || overlap(x, z) || overlap(y, z))
    throw GraphError("OverlappingSets", "query sets must be pairwise disjoint");
}

}  // namespace

bool d_separated(const Graph& g, const VertexSet& x, const VertexSet& y,
                 const VertexSet& z) {
  check_disjoint(x, y, z);
  require_vertices(g, x);
  require_vertices(g, y);
  require_vertices(g, z);
  if (x.empty() || y.empty()) return true;

  Graph dag = latent_expansion(g);
  VertexSet an_z = ancestors(dag, z);

  // State: (vertex, arrived-from-child). Standard reachability ball-pass:
  // a ball arriving from a child may bounce to parents and children unless
  // the vertex is conditioned on; a ball arriving from a parent passes to
  // children when unconditioned and back to parents when the vertex is a
  // (conditioned-ancestry) collider.
  enum Dir { FromChild = 0, FromParent = 1 };
  std::set<std::pair<std::string, int>> seen;
  std::deque<std::pair<std::string, int>> frontier;
  for (const auto& v : x) frontier.push_back({v, FromChild});

  while (!frontier.empty()) {
    auto [v, dir] = frontier.front();
    frontier.pop_front();
    if (!seen.insert({v, dir}).second) continue;

    bool conditioned = z.count(v) != 0;
    if (!conditioned && y.count(v)) return false;

    if (dir == FromChild && !conditioned) {
      for (const auto& p : dag.parents(v)) frontier.push_back({p, FromChild});
      for (const auto& c : dag.children(v)) frontier.push_back({c, FromParent});
    } else if (dir == FromParent) {
      if (!conditioned)
        for (const auto& c : dag.children(v)) frontier.push_back({c, FromParent});
      if (an_z.count(v))
        for (const auto& p : dag.parents(v)) frontier.push_back({p, FromChild});
    }
  }
  return true;
}

namespace {

// All subsets of pool with exactly k elements, in lexicographic order of
// member lists (pool itself is sorted).
void subsets_of_size(const std::vector<std::string>& pool, size_t k, size_t start,
                     VertexSet& current,
                     const std::function<bool(const VertexSet&)>& visit,
                     bool& stop) {
  if (stop) return;
  if (current.size() == k) {
    if (visit(current)) stop = true;
    return;
  }
  for (size_t i = start; i < pool.size(); ++i) {
    current.insert(pool[i]);
    subsets_of_size(pool, k, i + 1, current, visit, stop);
    current.erase(pool[i]);
    if (stop) return;
  }
}

}  // namespace

std::vector<IndependenceStatement> implied_independencies(const Graph& g,
                                                          size_t max_given) {
  std::vector<IndependenceStatement> out;
  auto endo = g.endogenous();
  std::vector<std::string> names(endo.begin(), endo.end());

  for (size_t i = 0; i < names.size(); ++i) {
    for (size_t j = i + 1; j < names.size(); ++j) {
      const auto& a = names[i];
      const auto& b = names[j];
      std::vector<std::string> pool;
      for (const auto& v : names)
        if (v != a && v != b) pool.push_back(v);

      std::vector<VertexSet> separators;
      for (size_t k = 0; k <= std::min(max_given, pool.size()); ++k) {
        bool stop = false;
        VertexSet current;
        subsets_of_size(
            pool, k, 0, current,
            [&](const VertexSet& given) {
              bool minimal = std::none_of(
                  separators.begin(), separators.end(), [&](const VertexSet& s) {
                    return std::includes(given.begin(), given.end(), s.begin(),
                                         s.end());
                  });
              if (minimal && d_separated(g, {a}, {b}, given))
                separators.push_back(given);
              return false;
            },
            stop);
      }
      for (const auto& given : separators) out.push_back({{a}, {b}, given});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<VertexSet> find_separator(const Graph& g, const VertexSet& x,
                                        const VertexSet& y,
                                        const VertexSet& candidates,
                                        size_t max_size) {
  std::vector<std::string> pool(candidates.begin(), candidates.end());
  for (size_t k = 0; k <= std::min(max_size, pool.size()); ++k) {
    std::optional<VertexSet> found;
    bool stop = false;
    VertexSet current;
    subsets_of_size(
        pool, k, 0, current,
        [&](const VertexSet& z) {
          if (d_separated(g, x, y, z)) {
            found = z;
            return true;
          }
          return false;
        },
        stop);
    if (found) return found;
  }
  return std::nullopt;
}

}  // namespace dofuse
