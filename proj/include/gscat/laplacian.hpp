#pragma once
// The drift-weighted Laplacian L = D_a^T M_w D_a as a dense symmetric operator
// with an eagerly cached spectral decomposition. Immutable after build; safe
// for concurrent reads.

#include <Eigen/Dense>

#include "gscat/graph.hpp"

namespace gscat {

// (D_a f)(i,j) = f(j) - e^{a(i,j)} f(i), one entry per edge.
std::vector<double> apply_incidence(const DirectedGraph& g,
                                    const std::vector<double>& drift,
                                    const std::vector<double>& f);

// Q_{w,a}(f) = sum_e w(e) |e^{a(e)} f(i) - f(j)|^2 = <Lf, f>. Nonnegative.
double quadratic_form(const DirectedGraph& g, const EdgeFields& fields,
                      const std::vector<double>& f);
double quadratic_form(const DirectedGraph& g, const EdgeFields& fields,
                      const Eigen::VectorXd& f);

class SpectralLaplacian {
 public:
  // Assembles the symmetric matrix and its eigendecomposition. Diagonal (i,i)
  // accumulates w e^{2a} over out-edges plus w over in-edges; off-diagonal
  // (i,j) is -w e^{a} for edge (i,j), mirrored. Eigenvalues ascending;
  // roundoff negatives in [-1e-10, 0) are clamped to 0.
  static SpectralLaplacian build(const DirectedGraph& g, const EdgeFields& fields);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
  double lambda_max() const { return lambda_max_; }

  // Smallest nonzero eigenvalue. Requires a one-dimensional kernel (throws
  // otherwise, e.g. on a disconnected graph).
  double lambda_1() const;

  // Count of eigenvalues <= zero_tol; defaults to 1e-9 * max(1, lambda_max)
  // so the threshold survives large weights.
  int kernel_dimension() const;
  int kernel_dimension(double zero_tol) const;

  int size() const { return static_cast<int>(matrix_.rows()); }
  const DirectedGraph& graph() const { return graph_; }
  const EdgeFields& fields() const { return fields_; }

 private:
  SpectralLaplacian() = default;

  DirectedGraph graph_;
  EdgeFields fields_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  double lambda_max_ = 0.0;
};

}  // namespace gscat
