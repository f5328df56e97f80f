#pragma once
// Built-in invariant suite behind the selftest command, plus the random
// instance generators it shares with the test binaries.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gscat/graph.hpp"
#include "gscat/rng.hpp"

namespace gscat {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Random weakly connected graph on n_min..n_max vertices: a random spanning
// tree plus a few extra pairs, oriented by vertex order.
DirectedGraph random_connected_graph(Rng& rng, int n_min, int n_max);

// Weights in (0, 2], drift the gradient of a potential with |phi| <= bound.
EdgeFields random_gradient_fields(Rng& rng, const DirectedGraph& g,
                                  double phi_bound = 2.0);

// Weights in (0, 2], unconstrained drift in (-1.5, 1.5]; the potential is
// attached when the drift happens to close (always on trees).
EdgeFields random_free_fields(Rng& rng, const DirectedGraph& g);

Eigen::VectorXd random_signal(Rng& rng, int n, double lo = -1.0, double hi = 1.0);

/**
 * Algebraic checks (heat positivity, semigroup composition, filter
 * complementarity, layer Pythagoras, absolute-value smoothing, decay and
 * refined bounds, kernel suppression, energy closure) always run on fixed
 * internal instances, so they are independent of `seed`. The Monte Carlo
 * blocks (moment formulas, edge energy, window mean, Cantelli coverage) use
 * `seed` and are skipped entirely by `quick`.
 */
std::vector<CheckResult> run_selftest(bool quick, std::uint64_t seed);

}  // namespace gscat
