#include "gscat/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace gscat {

namespace {

Eigen::MatrixXd spectral_map(const SpectralLaplacian& L,
                             const std::function<double(double)>& fn) {
  const Eigen::MatrixXd& Q = L.eigenvectors();
  Eigen::VectorXd d(L.size());
  for (int k = 0; k < L.size(); ++k) d[k] = fn(L.eigenvalues()[k]);
  return Q * d.asDiagonal() * Q.transpose();
}

}  // namespace

Eigen::MatrixXd heat_operator(const SpectralLaplacian& L, double t) {
  if (t < 0.0) throw std::invalid_argument("diffusion time must be nonnegative");
  return spectral_map(L, [t](double lam) { return std::exp(-t * lam); });
}

double semigroup_property_check(const SpectralLaplacian& L, double t, double t_prime) {
  const Eigen::MatrixXd lhs = heat_operator(L, t) * heat_operator(L, t_prime);
  const Eigen::MatrixXd rhs = heat_operator(L, t + t_prime);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

FilterPair make_filters(const SpectralLaplacian& L, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("diffusion time must be positive");
  FilterPair fp;
  fp.source = &L;
  fp.t = t;
  fp.decay_factor = 1.0 - std::exp(-t * L.lambda_max());
  fp.T = spectral_map(L, [t](double lam) { return std::exp(-t * lam / 2.0); });
  fp.S = spectral_map(L, [t](double lam) {
    const double s2 = std::clamp(1.0 - std::exp(-t * lam), 0.0, 1.0);
    return std::sqrt(s2);
  });
  return fp;
}

double default_time(const SpectralLaplacian& L) {
  if (L.lambda_max() <= 0.0)
    throw std::invalid_argument("default time undefined for an edgeless graph");
  return std::log(2.0) / L.lambda_max();
}

}  // namespace gscat
