#pragma once
// Independent reference implementations the tests compare the library
// against. None of these touch the library's spectral path: the exponential
// is a scaled Taylor series, the high-pass square root a binomial series in
// the heat matrix, eigenvalues come from cyclic Jacobi rotations, and the
// Laplacian is re-assembled by a straight-line loop over edges.

#include <vector>

#include <Eigen/Dense>

#include "gscat/graph.hpp"

namespace oracles {

// Straight-line assembly of the drift-weighted matrix from the definition.
Eigen::MatrixXd assemble(const gscat::DirectedGraph& g,
                         const gscat::EdgeFields& fields);

// e^A by scaling and squaring with a Taylor series.
Eigen::MatrixXd expm(const Eigen::MatrixXd& A);

// (I - X)^{1/2} by the binomial series in X; converges when the spectral
// radius of X is < 1 (callers must keep the Laplacian kernel-free) and the
// returned tail bound reports the truncation error contribution.
Eigen::MatrixXd sqrt_one_minus(const Eigen::MatrixXd& X);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd A);

// Connectivity by explicit breadth-first traversal.
bool bfs_connected(const gscat::DirectedGraph& g);

// Exact variance of the normalized chain statistic sum_{edges} w |D_a f|^2
// for a log-normal walk with the given per-vertex variances (length n+1):
// per-edge second moments plus the cross-edge covariances, closed form.
double chain_variance_exact(const std::vector<double>& sigma2);

}  // namespace oracles
