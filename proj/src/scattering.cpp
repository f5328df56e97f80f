#include "gscat/scattering.hpp"

#include <cmath>
#include <stdexcept>

namespace gscat {

ScatteringOutput scatter(const FilterPair& filters, const Eigen::VectorXd& f, int K) {
  if (K < 1) throw std::invalid_argument("need at least one layer");
  if (f.size() != filters.T.rows())
    throw std::invalid_argument("signal size does not match the filter dimension");

  ScatteringOutput out;
  out.g0_norm = f.norm();
  out.f_layers.reserve(K);
  out.g_layers.reserve(K);

  const double refined_base = refined_first_layer_bound(filters, f);
  const double sqrt_decay = std::sqrt(filters.decay_factor);

  Eigen::VectorXd g_prev = f;
  double bound = out.g0_norm;
  double refined = refined_base;
  for (int k = 1; k <= K; ++k) {
    const Eigen::VectorXd h = g_prev.cwiseAbs();
    out.f_layers.emplace_back(filters.T * h);
    out.g_layers.emplace_back(filters.S * h);
    out.layer_norms.push_back(out.g_layers.back().norm());
    bound *= sqrt_decay;
    out.bound_curve.push_back(bound);
    out.refined_bound.push_back(refined);
    refined *= sqrt_decay;
    g_prev = out.g_layers.back();
  }
  return out;
}

double energy_identity_defect(const ScatteringOutput& out, int K) {
  if (K < 0 || K > static_cast<int>(out.layer_norms.size()))
    throw std::invalid_argument("layer count exceeds the computed output");
  double sum = 0.0;
  for (int k = 0; k < K; ++k) sum += out.layer_norms[k] * out.layer_norms[k];
  return out.g0_norm * out.g0_norm - sum;
}

std::pair<double, double> beurling_deny_check(const FilterPair& filters,
                                              const Eigen::VectorXd& f) {
  return {(filters.S * f.cwiseAbs()).norm(), (filters.S * f).norm()};
}

double refined_first_layer_bound(const FilterPair& filters, const Eigen::VectorXd& f) {
  // ||M_{sqrt w} D_a f||^2 is exactly the quadratic form of the source.
  const SpectralLaplacian& L = *filters.source;
  return std::sqrt(filters.t * quadratic_form(L.graph(), L.fields(), f));
}

}  // namespace gscat
