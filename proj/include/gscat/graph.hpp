#pragma once
// Finite directed graphs over a fixed total vertex order. Vertices are dense
// indices 0..n-1; edges are ordered pairs kept sorted so iteration order is
// deterministic and membership is a binary search.

#include <optional>
#include <utility>
#include <vector>

namespace gscat {

struct DirectedGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // sorted, unique, no self-loops

  DirectedGraph() = default;
  // Validates: endpoints in range, i != j, no duplicates. Sorts the edge list.
  DirectedGraph(int n_vertices, std::vector<std::pair<int, int>> edge_list);

  bool has_edge(int i, int j) const;
  // Index into edges, or -1.
  int edge_id(int i, int j) const;
  int edge_count() const { return static_cast<int>(edges.size()); }
};

// Orients each unordered pair {i, j} as (min, max). Idempotent on its output.
DirectedGraph orient_by_order(int n_vertices,
                              const std::vector<std::pair<int, int>>& undirected);

// Connectivity of the underlying undirected graph; single vertex counts as
// connected, an empty vertex set does not arise (n >= 1 enforced upstream).
bool is_weakly_connected(const DirectedGraph& g);

// Recovers a potential phi with a(i,j) = phi(j) - phi(i) on every edge and
// phi(0) = 0, by spanning-tree assignment plus cycle-closure check. Returns
// nullopt when a cycle obstructs consistency beyond tol. Throws on a
// disconnected graph (a potential is only defined per component).
std::optional<std::vector<double>> potential_from_drift(
    const DirectedGraph& g, const std::vector<double>& drift, double tol = 1e-9);

/**
 * Per-edge weight and drift, aligned with DirectedGraph::edges. The optional
 * potential is present iff the drift is a verified gradient field; then
 * a(i,j) = phi(j) - phi(i) within the gradient tolerance on every edge.
 */
struct EdgeFields {
  std::vector<double> weight;  // > 0
  std::vector<double> drift;
  std::optional<std::vector<double>> potential;

  void validate(const DirectedGraph& g, double grad_tol = 1e-9) const;
};

/**
 * Edge subset F of a parent graph together with its boundary vertex set
 * (all endpoints of F) and the relabeling onto 0..|boundary|-1 used to
 * restrict signals.
 */
struct EdgeSubset {
  std::vector<int> edge_ids;         // indices into parent edges, sorted
  std::vector<int> boundary;         // sorted parent vertex ids
  std::vector<int> local_of_vertex;  // parent vertex -> local index, -1 outside

  int local(int v) const { return local_of_vertex[v]; }
  int boundary_size() const { return static_cast<int>(boundary.size()); }

  // The induced graph on local indices, edge order preserved.
  DirectedGraph induced(const DirectedGraph& parent) const;
  // Restrict a parent-indexed signal to boundary vertices, local order.
  std::vector<double> restrict_signal(const std::vector<double>& f) const;
};

EdgeSubset induce_subgraph(const DirectedGraph& g, std::vector<int> edge_ids);

}  // namespace gscat
