#include "gscat/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <queue>
#include <stdexcept>
#include <string>

namespace gscat {

DirectedGraph::DirectedGraph(int n_vertices, std::vector<std::pair<int, int>> edge_list)
    : n(n_vertices), edges(std::move(edge_list)) {
  if (n <= 0) throw std::invalid_argument("graph needs at least one vertex");
  std::sort(edges.begin(), edges.end());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [i, j] = edges[k];
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw std::invalid_argument("edge (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") has an endpoint outside 0.." + std::to_string(n - 1));
    if (i == j)
      throw std::invalid_argument("self-loop at vertex " + std::to_string(i));
    if (k > 0 && edges[k] == edges[k - 1])
      throw std::invalid_argument("duplicate edge (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
  }
}

bool DirectedGraph::has_edge(int i, int j) const { return edge_id(i, j) >= 0; }

int DirectedGraph::edge_id(int i, int j) const {
  const auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(i, j));
  if (it == edges.end() || *it != std::make_pair(i, j)) return -1;
  return static_cast<int>(it - edges.begin());
}

DirectedGraph orient_by_order(int n_vertices,
                              const std::vector<std::pair<int, int>>& undirected) {
  std::vector<std::pair<int, int>> oriented;
  oriented.reserve(undirected.size());
  for (const auto& [i, j] : undirected) {
    if (i == j)
      throw std::invalid_argument("self-loop pair {" + std::to_string(i) + "," +
                                  std::to_string(j) + "} cannot be oriented");
    oriented.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(oriented.begin(), oriented.end());
  oriented.erase(std::unique(oriented.begin(), oriented.end()), oriented.end());
  return DirectedGraph(n_vertices, std::move(oriented));
}

namespace {

// Undirected adjacency as (neighbor, edge id) lists.
std::vector<std::vector<std::pair<int, int>>> adjacency(const DirectedGraph& g) {
  std::vector<std::vector<std::pair<int, int>>> adj(g.n);
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto [i, j] = g.edges[e];
    adj[i].emplace_back(j, e);
    adj[j].emplace_back(i, e);
  }
  return adj;
}

}  // namespace

bool is_weakly_connected(const DirectedGraph& g) {
  if (g.n == 1) return true;
  const auto adj = adjacency(g);
  std::vector<char> seen(g.n, 0);
  std::queue<int> todo;
  todo.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!todo.empty()) {
    const int v = todo.front();
    todo.pop();
    for (const auto& [u, e] : adj[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        todo.push(u);
      }
    }
  }
  return reached == g.n;
}

std::optional<std::vector<double>> potential_from_drift(const DirectedGraph& g,
                                                        const std::vector<double>& drift,
                                                        double tol) {
  if (static_cast<int>(drift.size()) != g.edge_count())
    throw std::invalid_argument("drift size does not match edge count");
  if (!is_weakly_connected(g))
    throw std::invalid_argument("potential undefined on a disconnected graph");

  const auto adj = adjacency(g);
  std::vector<double> phi(g.n, 0.0);
  std::vector<char> seen(g.n, 0);
  std::queue<int> todo;
  todo.push(0);
  seen[0] = 1;
  while (!todo.empty()) {
    const int v = todo.front();
    todo.pop();
    for (const auto& [u, e] : adj[v]) {
      if (seen[u]) continue;
      const auto [i, j] = g.edges[e];
      // a(i,j) = phi(j) - phi(i) along the tree edge, whichever way we walk it.
      phi[u] = (v == i) ? phi[v] + drift[e] : phi[v] - drift[e];
      seen[u] = 1;
      todo.push(u);
    }
  }
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto [i, j] = g.edges[e];
    if (std::abs(drift[e] - (phi[j] - phi[i])) > tol) return std::nullopt;
  }
  return phi;
}

void EdgeFields::validate(const DirectedGraph& g, double grad_tol) const {
  if (static_cast<int>(weight.size()) != g.edge_count() ||
      static_cast<int>(drift.size()) != g.edge_count())
    throw std::invalid_argument("edge fields must cover exactly the edge set");
  for (int e = 0; e < g.edge_count(); ++e)
    if (!(weight[e] > 0.0))
      throw std::invalid_argument("nonpositive weight on edge " + std::to_string(e));
  if (potential) {
    if (static_cast<int>(potential->size()) != g.n)
      throw std::invalid_argument("potential must cover the vertex set");
    for (int e = 0; e < g.edge_count(); ++e) {
      const auto [i, j] = g.edges[e];
      if (std::abs(drift[e] - ((*potential)[j] - (*potential)[i])) > grad_tol)
        throw std::invalid_argument("drift is not the gradient of the stated potential");
    }
  }
}

DirectedGraph EdgeSubset::induced(const DirectedGraph& parent) const {
  std::vector<std::pair<int, int>> local_edges;
  local_edges.reserve(edge_ids.size());
  for (const int e : edge_ids) {
    const auto [i, j] = parent.edges[e];
    local_edges.emplace_back(local_of_vertex[i], local_of_vertex[j]);
  }
  return DirectedGraph(boundary_size(), std::move(local_edges));
}

std::vector<double> EdgeSubset::restrict_signal(const std::vector<double>& f) const {
  std::vector<double> out(boundary.size());
  for (std::size_t k = 0; k < boundary.size(); ++k) out[k] = f[boundary[k]];
  return out;
}

EdgeSubset induce_subgraph(const DirectedGraph& g, std::vector<int> edge_ids) {
  std::sort(edge_ids.begin(), edge_ids.end());
  edge_ids.erase(std::unique(edge_ids.begin(), edge_ids.end()), edge_ids.end());
  EdgeSubset sub;
  for (const int e : edge_ids) {
    if (e < 0 || e >= g.edge_count())
      throw std::invalid_argument("edge id " + std::to_string(e) + " not in parent graph");
    sub.boundary.push_back(g.edges[e].first);
    sub.boundary.push_back(g.edges[e].second);
  }
  std::sort(sub.boundary.begin(), sub.boundary.end());
  sub.boundary.erase(std::unique(sub.boundary.begin(), sub.boundary.end()),
                     sub.boundary.end());
  sub.local_of_vertex.assign(g.n, -1);
  for (std::size_t k = 0; k < sub.boundary.size(); ++k)
    sub.local_of_vertex[sub.boundary[k]] = static_cast<int>(k);
  sub.edge_ids = std::move(edge_ids);
  return sub;
}

}  // namespace gscat
