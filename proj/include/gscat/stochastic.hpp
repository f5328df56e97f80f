#pragma once
// Log-normal multiplicative random-walk model over graph vertices: simulation,
// closed-form moments, variance-adapted edge weights, the chain variance bound
// U, and the Cantelli-calibrated anomaly test.
//
// A walk chain visits its vertices in increasing index order; nu accumulates
// independent Gaussian increments with variance sigma2[j] - sigma2[i] and mean
// minus half that, so E[e^{nu(j) - nu(i)}] = 1 on every chain step and
// marginally nu(i) ~ Normal(-sigma2[i]/2, sigma2[i]). Signals are
// f = e^{phi + nu}, strictly positive.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "gscat/semigroup.hpp"

namespace gscat {

struct WalkModel {
  std::vector<double> phi;     // per vertex
  std::vector<double> sigma2;  // per vertex, nondecreasing along each chain
  std::vector<int> chain;      // chain id per vertex; distinct ids are independent walks

  int n() const { return static_cast<int>(phi.size()); }
  // Enforces: equal sizes, sigma2 >= 0 and nondecreasing in index order
  // within each chain. The implied mean -sigma2/2 is never stored.
  void validate() const;
};

// E[e^{n nu}] = e^{n(n-1) sigma2 / 2} for nu ~ Normal(-sigma2/2, sigma2).
double lognormal_moment(int n, double sigma2);

// One draw of f = e^{phi + nu}. Each chain consumes its own RNG stream derived
// from (seed, chain id), so restricting a model to a window reproduces the
// same values the full graph would see. Deterministic given seed.
std::vector<double> simulate_walk(const WalkModel& model, std::uint64_t seed);

/**
 * Weights that normalize every edge statistic to unit mean energy,
 * E[w |D_a f|^2] = 1, with drift a = grad phi:
 *   same chain:       w = 1 / (e^{2 phi(j)} (e^{sigma2_j} - e^{sigma2_i}))
 *   distinct chains:  w = 1 / (e^{2 phi(j)} (e^{sigma2_i} + e^{sigma2_j} - 2))
 * Denominators are floored at 1e-12. A cross-chain edge between two
 * deterministic endpoints (both sigma2 = 0) has no meaningful weight and is
 * dropped; the returned graph omits it and dropped_edges counts them.
 */
struct AdaptedWeights {
  DirectedGraph graph;
  EdgeFields fields;
  int dropped_edges = 0;
};

AdaptedWeights adapted_weights(const WalkModel& model, const DirectedGraph& g);

// E[|M_{sqrt w} D_a f|^4] on a chain edge:
// e^{4 s_j} + 2 e^{3 s_j + s_i} + 3 e^{2 s_j + 2 s_i} - 3 e^{4 s_i}.
double fourth_moment_edge(double sigma2_i, double sigma2_j);

// U = e^{4 sigma_n^2} + sum_{j=1}^{n} (3 e^{4 sigma_j^2} - 1) - 3 for a chain
// with vertex variances sigma2[0..n]. Nonnegative for nondecreasing input.
double variance_bound_U(const std::vector<double>& sigma2_chain);

// P[S_F >= |F| + delta] <= U / (U + delta^2). Requires delta > 0, U >= 0.
double cantelli_p(double U, double delta);

// Squared-norm thresholds t (1 - e^{-t lambda_max})^{k-1} (|F| + delta) for
// k = 1..K; a layer whose ||g_k||^2 reaches its threshold is a rare event
// under the model, with union probability at most cantelli_p(U, delta).
std::vector<double> layer_thresholds(double t, double lambda_max, double f_size,
                                     double delta, int K);

struct AnomalyVerdict {
  double statistic = 0.0;  // S_F = <L^F f, f>
  double expected = 0.0;   // |F|
  double U = 0.0;
  double delta = 0.0;
  double p_bound = 0.0;  // U / (U + delta^2)
  double t = 0.0;
  std::vector<double> layer_norms;    // ||g_k||, k = 1..K
  std::vector<char> layer_flags;      // ||g_k||^2 >= threshold_k
  std::vector<double> g1_magnitudes;  // |g_1| entrywise, local vertex order

  bool flagged() const;
};

// Runs the windowed test: S_F via the quadratic form of the filter pair's
// Laplacian, U summed over the maximal same-chain vertex runs inside the edge
// set, then K scattering layers against layer_thresholds. delta resolves to
// 3 sqrt(U) when absent (or to 1 when U = 0, where p_bound is 0 anyway).
// Rejects signals with nonpositive entries (the log model forbids them).
AnomalyVerdict anomaly_test(const FilterPair& filters, const WalkModel& model,
                            const Eigen::VectorXd& f, std::optional<double> delta,
                            int K);

// Sum of variance_bound_U over the maximal runs of consecutive same-chain
// edges in g; distinct chains are independent, so their bounds add.
double window_chain_variance_bound(const WalkModel& model, const DirectedGraph& g);

}  // namespace gscat
