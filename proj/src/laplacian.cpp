#include "gscat/laplacian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gscat {

std::vector<double> apply_incidence(const DirectedGraph& g,
                                    const std::vector<double>& drift,
                                    const std::vector<double>& f) {
  if (static_cast<int>(drift.size()) != g.edge_count())
    throw std::invalid_argument("drift size does not match edge count");
  if (static_cast<int>(f.size()) != g.n)
    throw std::invalid_argument("signal size does not match vertex count");
  std::vector<double> out(g.edges.size());
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto [i, j] = g.edges[e];
    out[e] = f[j] - std::exp(drift[e]) * f[i];
  }
  return out;
}

double quadratic_form(const DirectedGraph& g, const EdgeFields& fields,
                      const std::vector<double>& f) {
  if (static_cast<int>(f.size()) != g.n)
    throw std::invalid_argument("signal size does not match vertex count");
  double q = 0.0;
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto [i, j] = g.edges[e];
    const double d = std::exp(fields.drift[e]) * f[i] - f[j];
    q += fields.weight[e] * d * d;
  }
  return q;
}

double quadratic_form(const DirectedGraph& g, const EdgeFields& fields,
                      const Eigen::VectorXd& f) {
  return quadratic_form(g, fields,
                        std::vector<double>(f.data(), f.data() + f.size()));
}

SpectralLaplacian SpectralLaplacian::build(const DirectedGraph& g,
                                           const EdgeFields& fields) {
  fields.validate(g);
  SpectralLaplacian L;
  L.graph_ = g;
  L.fields_ = fields;
  L.matrix_ = Eigen::MatrixXd::Zero(g.n, g.n);
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto [i, j] = g.edges[e];
    const double w = fields.weight[e];
    const double ea = std::exp(fields.drift[e]);
    L.matrix_(i, i) += w * ea * ea;
    L.matrix_(j, j) += w;
    L.matrix_(i, j) -= w * ea;
    L.matrix_(j, i) -= w * ea;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L.matrix_);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed to converge");
  L.eigenvalues_ = solver.eigenvalues();
  L.eigenvectors_ = solver.eigenvectors();
  for (int k = 0; k < L.eigenvalues_.size(); ++k) {
    double& lam = L.eigenvalues_[k];
    if (lam < 0.0) {
      // L is a Gram-type form, hence positive semidefinite; anything below
      // the roundoff band is a genuine numerical failure.
      if (lam < -1e-10)
        throw std::runtime_error("eigenvalue " + std::to_string(lam) +
                                 " below the positive semidefinite roundoff band");
      lam = 0.0;
    }
  }
  L.lambda_max_ = L.eigenvalues_[L.eigenvalues_.size() - 1];
  return L;
}

int SpectralLaplacian::kernel_dimension() const {
  return kernel_dimension(1e-9 * std::max(1.0, lambda_max_));
}

int SpectralLaplacian::kernel_dimension(double zero_tol) const {
  int dim = 0;
  for (int k = 0; k < eigenvalues_.size(); ++k)
    if (eigenvalues_[k] <= zero_tol) ++dim;
  return dim;
}

double SpectralLaplacian::lambda_1() const {
  const int dim = kernel_dimension();
  if (dim != 1)
    throw std::invalid_argument("lambda_1 needs a one-dimensional kernel, got dimension " +
                                std::to_string(dim));
  return eigenvalues_[1];
}

}  // namespace gscat
