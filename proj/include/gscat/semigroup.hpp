#pragma once
// Heat semigroup G_t = e^{-tL} and the filter pair T_t = e^{-tL/2},
// S_t = (I - e^{-tL})^{1/2}, realized through the cached spectral
// decomposition. T^2 + S^2 = I exactly at the spectral level, so the filters
// partition signal energy.

#include <Eigen/Dense>

#include "gscat/laplacian.hpp"

namespace gscat {

// Spectral mapping lambda -> e^{-t lambda}. G_0 = I; positivity preserving.
Eigen::MatrixXd heat_operator(const SpectralLaplacian& L, double t);

// max-norm defect ||G_t G_t' - G_{t+t'}||, for the self-test suite.
double semigroup_property_check(const SpectralLaplacian& L, double t, double t_prime);

/**
 * Low-pass T and high-pass S at diffusion time t, with
 * decay_factor = 1 - e^{-t lambda_max}. Immutable; matrix-vector products are
 * pure and safe to share across threads. Keeps a pointer to its Laplacian,
 * whose lifetime must cover the pair's.
 */
struct FilterPair {
  const SpectralLaplacian* source = nullptr;
  double t = 0.0;
  double decay_factor = 0.0;
  Eigen::MatrixXd T;
  Eigen::MatrixXd S;
};

// Spectral values 1 - e^{-t lambda} are clamped to [0, 1] before the square
// root; lambda already clamped to 0 can still leave -1e-16 behind.
FilterPair make_filters(const SpectralLaplacian& L, double t);

// t = ln 2 / lambda_max, the time at which decay_factor = 1/2. Throws on an
// edgeless graph (lambda_max = 0).
double default_time(const SpectralLaplacian& L);

}  // namespace gscat
