#pragma once
// The iterated two-channel transform. With g_0 = f, each layer applies the
// entrywise absolute value and the filter pair:
//   f_{k+1} = T |g_k|,   g_{k+1} = S |g_k|.
// Per layer, ||f_k||^2 + ||g_k||^2 = ||g_{k-1}||^2 exactly (spectral algebra),
// and ||g_k|| <= decay_factor^{k/2} ||f||.

#include <Eigen/Dense>

#include "gscat/semigroup.hpp"

namespace gscat {

struct ScatteringOutput {
  double g0_norm = 0.0;
  std::vector<Eigen::VectorXd> f_layers;  // f_k, k = 1..K
  std::vector<Eigen::VectorXd> g_layers;  // g_k, k = 1..K
  std::vector<double> layer_norms;        // ||g_k||
  std::vector<double> bound_curve;        // decay_factor^{k/2} ||f||
  std::vector<double> refined_bound;      // sqrt(t) decay^{(k-1)/2} ||M_{sqrt w} D_a f||
};

// K >= 1 layers; f indexed by the filter pair's vertex set. Deterministic.
ScatteringOutput scatter(const FilterPair& filters, const Eigen::VectorXd& f, int K);

// ||f||^2 - sum_{k<=K} ||g_k||^2 for the first K layers of out. On an edgeless
// graph this stays at ||f||^2 (S = 0 keeps all energy low-pass); the energy
// accounting that closes to zero is ||f||^2 = sum_{k<=K} ||f_k||^2 + ||g_K||^2,
// which the test suite asserts separately.
double energy_identity_defect(const ScatteringOutput& out, int K);

// (||S|f|||, ||S f||); the first never exceeds the second. This inequality is
// what lets norm bounds pass through the absolute value between layers.
std::pair<double, double> beurling_deny_check(const FilterPair& filters,
                                              const Eigen::VectorXd& f);

// sqrt(t) ||M_{sqrt w} D_a f||, the k = 1 value of the refined layer bound
// ||g_k|| <= sqrt(t) decay^{(k-1)/2} ||M_{sqrt w} D_a f||. Zero exactly on
// kernel inputs c e^{phi}.
double refined_first_layer_bound(const FilterPair& filters, const Eigen::VectorXd& f);

}  // namespace gscat
