#include "gscat/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "gscat/rng.hpp"
#include "gscat/scattering.hpp"

namespace gscat {

void WalkModel::validate() const {
  const std::size_t n = phi.size();
  if (sigma2.size() != n || chain.size() != n)
    throw std::invalid_argument("model fields must have one entry per vertex");
  std::map<int, double> last;  // chain id -> last sigma2 seen in index order
  for (std::size_t v = 0; v < n; ++v) {
    if (sigma2[v] < 0.0)
      throw std::invalid_argument("negative variance at vertex " + std::to_string(v));
    const auto it = last.find(chain[v]);
    if (it != last.end() && sigma2[v] < it->second)
      throw std::invalid_argument("variance decreases along chain " +
                                  std::to_string(chain[v]) + " at vertex " +
                                  std::to_string(v));
    last[chain[v]] = sigma2[v];
  }
}

double lognormal_moment(int n, double sigma2) {
  if (n < 0) throw std::invalid_argument("moment order must be nonnegative");
  if (sigma2 < 0.0) throw std::invalid_argument("variance must be nonnegative");
  return std::exp(0.5 * n * (n - 1) * sigma2);
}

std::vector<double> simulate_walk(const WalkModel& model, std::uint64_t seed) {
  model.validate();
  std::vector<double> f(model.n());
  // Vertices grouped by chain, preserving index order within each chain.
  std::map<int, std::vector<int>> chains;
  for (int v = 0; v < model.n(); ++v) chains[model.chain[v]].push_back(v);
  for (const auto& [id, verts] : chains) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(id));
    double nu = 0.0;
    double prev_s2 = 0.0;
    for (const int v : verts) {
      const double lam = model.sigma2[v] - prev_s2;
      // Draw unconditionally so stream consumption does not depend on lam.
      nu += rng.normal(-0.5 * lam, std::sqrt(lam));
      prev_s2 = model.sigma2[v];
      f[v] = std::exp(model.phi[v] + nu);
    }
  }
  return f;
}

AdaptedWeights adapted_weights(const WalkModel& model, const DirectedGraph& g) {
  model.validate();
  if (model.n() != g.n)
    throw std::invalid_argument("model size does not match the graph");
  AdaptedWeights out;
  std::vector<std::pair<int, int>> kept;
  kept.reserve(g.edges.size());
  out.fields.weight.reserve(g.edges.size());
  out.fields.drift.reserve(g.edges.size());
  for (const auto& [i, j] : g.edges) {
    const double si = model.sigma2[i];
    const double sj = model.sigma2[j];
    double denom;
    if (model.chain[i] == model.chain[j]) {
      denom = std::abs(std::exp(sj) - std::exp(si));
    } else {
      if (si == 0.0 && sj == 0.0) {
        ++out.dropped_edges;  // both endpoints deterministic: infinite weight
        continue;
      }
      denom = std::exp(si) + std::exp(sj) - 2.0;
    }
    denom *= std::exp(2.0 * model.phi[j]);
    denom = std::max(denom, 1e-12);
    kept.emplace_back(i, j);
    out.fields.weight.push_back(1.0 / denom);
    out.fields.drift.push_back(model.phi[j] - model.phi[i]);
  }
  out.graph = DirectedGraph(g.n, std::move(kept));
  out.fields.potential = model.phi;
  return out;
}

double fourth_moment_edge(double sigma2_i, double sigma2_j) {
  const double si = sigma2_i, sj = sigma2_j;
  return std::exp(4 * sj) + 2 * std::exp(3 * sj + si) + 3 * std::exp(2 * sj + 2 * si) -
         3 * std::exp(4 * si);
}

double variance_bound_U(const std::vector<double>& sigma2_chain) {
  if (sigma2_chain.size() < 2)
    throw std::invalid_argument("a chain needs at least one edge");
  const std::size_t n = sigma2_chain.size() - 1;
  double u = std::exp(4 * sigma2_chain[n]) - 3.0;
  for (std::size_t j = 1; j <= n; ++j) u += 3 * std::exp(4 * sigma2_chain[j]) - 1.0;
  return u;
}

double cantelli_p(double U, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("threshold excess must be positive");
  if (U < 0.0) throw std::invalid_argument("variance bound must be nonnegative");
  return U / (U + delta * delta);
}

std::vector<double> layer_thresholds(double t, double lambda_max, double f_size,
                                     double delta, int K) {
  const double decay = 1.0 - std::exp(-t * lambda_max);
  std::vector<double> thr(K);
  double scale = t * (f_size + delta);
  for (int k = 0; k < K; ++k) {
    thr[k] = scale;
    scale *= decay;
  }
  return thr;
}

double window_chain_variance_bound(const WalkModel& model, const DirectedGraph& g) {
  // Same-chain edges grouped per chain; a run extends while consecutive edges
  // share their middle vertex. Edge lists stay sorted by construction.
  std::map<int, std::vector<std::pair<int, int>>> per_chain;
  for (const auto& [i, j] : g.edges)
    if (model.chain[i] == model.chain[j]) per_chain[model.chain[i]].push_back({i, j});

  double total = 0.0;
  for (const auto& [id, chain_edges] : per_chain) {
    std::vector<double> run;  // sigma2 along the current run's vertices
    int run_end = -1;
    auto flush = [&] {
      if (run.size() >= 2) total += variance_bound_U(run);
      run.clear();
    };
    for (const auto& [i, j] : chain_edges) {
      if (!run.empty() && i == run_end) {
        run.push_back(model.sigma2[j]);
      } else {
        flush();
        run = {model.sigma2[i], model.sigma2[j]};
      }
      run_end = j;
    }
    flush();
  }
  return total;
}

bool AnomalyVerdict::flagged() const {
  return std::any_of(layer_flags.begin(), layer_flags.end(),
                     [](char f) { return f != 0; });
}

AnomalyVerdict anomaly_test(const FilterPair& filters, const WalkModel& model,
                            const Eigen::VectorXd& f, std::optional<double> delta,
                            int K) {
  const SpectralLaplacian& L = *filters.source;
  if (f.size() != L.size())
    throw std::invalid_argument("signal size does not match the window");
  for (int v = 0; v < f.size(); ++v)
    if (!(f[v] > 0.0))
      throw std::invalid_argument("nonpositive signal entry at local vertex " +
                                  std::to_string(v) + " violates the log model");

  AnomalyVerdict verdict;
  verdict.statistic = quadratic_form(L.graph(), L.fields(), f);
  verdict.expected = static_cast<double>(L.graph().edge_count());
  verdict.U = window_chain_variance_bound(model, L.graph());
  verdict.delta = delta ? *delta : (verdict.U > 0.0 ? 3.0 * std::sqrt(verdict.U) : 1.0);
  verdict.p_bound = cantelli_p(verdict.U, verdict.delta);
  verdict.t = filters.t;

  const ScatteringOutput out = scatter(filters, f, K);
  const std::vector<double> thr = layer_thresholds(
      filters.t, L.lambda_max(), verdict.expected, verdict.delta, K);
  verdict.layer_norms = out.layer_norms;
  verdict.layer_flags.resize(K);
  for (int k = 0; k < K; ++k) {
    const double gk2 = out.layer_norms[k] * out.layer_norms[k];
    verdict.layer_flags[k] = gk2 >= thr[k] ? 1 : 0;
  }
  verdict.g1_magnitudes.assign(out.g_layers[0].size(), 0.0);
  for (int v = 0; v < out.g_layers[0].size(); ++v)
    verdict.g1_magnitudes[v] = std::abs(out.g_layers[0][v]);
  return verdict;
}

}  // namespace gscat
