#include "dofuse/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace dofuse {

void Graph::add_vertex(const std::string& name, VertexKind kind) {
  if (name.empty()) throw GraphError("EmptyName", "vertex name must be nonempty");
  auto [it, inserted] = kinds_.emplace(name, kind);
  if (!inserted && it->second != kind)
    throw GraphError("DuplicateVertex", "vertex '" + name + "' redeclared with a different kind");
}

void Graph::add_edge(const std::string& from, const std::string& to) {
  if (!has_vertex(from)) throw GraphError("UnknownEndpoint", "unknown vertex '" + from + "'");
  if (!has_vertex(to)) throw GraphError("UnknownEndpoint", "unknown vertex '" + to + "'");
  if (from == to) throw GraphError("SelfLoop", "self-loop on '" + from + "'");
  directed_.emplace(from, to);
}

void Graph::add_bidirected(const std::string& a, const std::string& b) {
  if (!has_vertex(a)) throw GraphError("UnknownEndpoint", "unknown vertex '" + a + "'");
  if (!has_vertex(b)) throw GraphError("UnknownEndpoint", "unknown vertex '" + b + "'");
  if (a == b) throw GraphError("SelfLoop", "bidirected self-loop on '" + a + "'");
  bidirected_.emplace(std::min(a, b), std::max(a, b));
}

bool Graph::has_vertex(const std::string& name) const { return kinds_.count(name) != 0; }

VertexKind Graph::kind(const std::string& name) const {
  auto it = kinds_.find(name);
  if (it == kinds_.end()) throw GraphError("UnknownVertex", "unknown vertex '" + name + "'");
  return it->second;
}

bool Graph::has_edge(const std::string& from, const std::string& to) const {
  return directed_.count({from, to}) != 0;
}

bool Graph::has_bidirected(const std::string& a, const std::string& b) const {
  return bidirected_.count({std::min(a, b), std::max(a, b)}) != 0;
}

std::vector<std::string> Graph::vertex_names() const {
  std::vector<std::string> out;
  out.reserve(kinds_.size());
  for (const auto& [name, _] : kinds_) out.push_back(name);
  return out;
}

VertexSet Graph::vertices_of_kind(VertexKind k) const {
  VertexSet out;
  for (const auto& [name, kind] : kinds_)
    if (kind == k) out.insert(name);
  return out;
}

VertexSet Graph::parents(const std::string& v) const {
  VertexSet out;
  for (const auto& [from, to] : directed_)
    if (to == v) out.insert(from);
  return out;
}

VertexSet Graph::children(const std::string& v) const {
  VertexSet out;
  for (const auto& [from, to] : directed_)
    if (from == v) out.insert(to);
  return out;
}

VertexSet Graph::siblings(const std::string& v) const {
  VertexSet out;
  for (const auto& [a, b] : bidirected_) {
    if (a == v) out.insert(b);
    if (b == v) out.insert(a);
  }
  return out;
}

void require_vertices(const Graph& g, const VertexSet& s) {
  for (const auto& v : s)
    if (!g.has_vertex(v)) throw GraphError("UnknownVertex", "unknown vertex '" + v + "'");
}

namespace {

// Returns one directed cycle through the endogenous part, or empty.
std::vector<std::string> find_cycle(const Graph& g) {
  std::map<std::string, int> state;  // 0 unvisited, 1 on stack, 2 done
  std::vector<std::string> stack;
  std::vector<std::string> cycle;

  std::function<bool(const std::string&)> dfs = [&](const std::string& v) {
    state[v] = 1;
    stack.push_back(v);
    for (const auto& c : g.children(v)) {
      if (state[c] == 1) {
        auto it = std::find(stack.begin(), stack.end(), c);
        cycle.assign(it, stack.end());
        cycle.push_back(c);
        return true;
      }
      if (state[c] == 0 && dfs(c)) return true;
    }
    stack.pop_back();
    state[v] = 2;
    return false;
  };

  for (const auto& v : g.vertex_names())
    if (state[v] == 0 && dfs(v)) return cycle;
  return {};
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

std::vector<Violation> validate(const Graph& g) {
  std::vector<Violation> out;

  auto cycle = find_cycle(g);
  if (!cycle.empty())
    out.push_back({"CycleDetected", join(cycle, ",")});

  for (const auto& name : g.vertex_names()) {
    switch (g.kind(name)) {
      case VertexKind::Selection:
        if (!g.children(name).empty())
          out.push_back({"BadSelectionVertex", name + " emits a directed edge"});
        if (!g.siblings(name).empty())
          out.push_back({"BadSelectionVertex", name + " touches a bidirected edge"});
        break;
      case VertexKind::Discrepancy:
        if (!g.parents(name).empty() || !g.siblings(name).empty())
          out.push_back({"BadDiscrepancyVertex", name + " has an incoming edge"});
        if (g.children(name).empty())
          out.push_back({"BadDiscrepancyVertex", name + " has no outgoing edge"});
        break;
      case VertexKind::Endogenous:
        break;
    }
  }
  return out;
}

const Graph& validated(const Graph& g) {
  auto violations = validate(g);
  if (!violations.empty())
    throw GraphError(violations.front().code,
                     violations.front().code + ": " + violations.front().detail);
  return g;
}

Graph mutilate(const Graph& g, const VertexSet& cut_incoming,
               const VertexSet& cut_outgoing) {
  require_vertices(g, cut_incoming);
  require_vertices(g, cut_outgoing);
  Graph out;
  for (const auto& name : g.vertex_names()) out.add_vertex(name, g.kind(name));
  for (const auto& [from, to] : g.directed_edges()) {
    if (cut_incoming.count(to) || cut_outgoing.count(from)) continue;
    out.add_edge(from, to);
  }
  for (const auto& [a, b] : g.bidirected_edges()) {
    if (cut_incoming.count(a) || cut_incoming.count(b)) continue;
    out.add_bidirected(a, b);
  }
  return out;
}

namespace {

VertexSet closure(const Graph& g, const VertexSet& s, bool along) {
  require_vertices(g, s);
  VertexSet out = s;
  std::queue<std::string> frontier;
  for (const auto& v : s) frontier.push(v);
  while (!frontier.empty()) {
    auto v = frontier.front();
    frontier.pop();
    for (const auto& n : along ? g.children(v) : g.parents(v))
      if (out.insert(n).second) frontier.push(n);
  }
  return out;
}

}  // namespace

VertexSet ancestors(const Graph& g, const VertexSet& s) { return closure(g, s, false); }
VertexSet descendants(const Graph& g, const VertexSet& s) { return closure(g, s, true); }

Graph reversed(const Graph& g) {
  Graph out;
  for (const auto& name : g.vertex_names()) out.add_vertex(name, g.kind(name));
  for (const auto& [from, to] : g.directed_edges()) out.add_edge(to, from);
  for (const auto& [a, b] : g.bidirected_edges()) out.add_bidirected(a, b);
  return out;
}

std::vector<std::string> topological_order(const Graph& g) {
  std::map<std::string, int> indegree;
  for (const auto& v : g.vertex_names()) indegree[v] = 0;
  for (const auto& [from, to] : g.directed_edges()) indegree[to]++;

  // std::set keyed by name gives the lexicographic tie-break.
  std::set<std::string> ready;
  for (const auto& [v, d] : indegree)
    if (d == 0) ready.insert(v);

  std::vector<std::string> order;
  while (!ready.empty()) {
    auto v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (const auto& c : g.children(v))
      if (--indegree[c] == 0) ready.insert(c);
  }
  if (order.size() != g.vertex_count())
    throw GraphError("CycleDetected", "graph has a directed cycle");
  return order;
}

}  // namespace dofuse
