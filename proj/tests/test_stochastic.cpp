#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gscat/stochastic.hpp"
#include "gscat/rng.hpp"
#include "oracles.hpp"

using namespace gscat;

namespace {

DirectedGraph path_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1});
  return DirectedGraph(n, edges);
}

WalkModel ramp_chain(int n_vertices, double top) {
  WalkModel m;
  for (int v = 0; v < n_vertices; ++v) {
    m.phi.push_back(0.1 * v);
    m.sigma2.push_back(top * v / std::max(1, n_vertices - 1));
    m.chain.push_back(0);
  }
  return m;
}

struct MomentStats {
  double mean = 0.0;
  double se = 0.0;
};

template <typename Fn>
MomentStats sample_stats(int trials, Fn&& draw) {
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < trials; ++i) {
    const double x = draw(i);
    sum += x;
    sumsq += x * x;
  }
  MomentStats s;
  s.mean = sum / trials;
  const double var = (sumsq - sum * sum / trials) / (trials - 1);
  s.se = std::sqrt(std::max(var, 0.0) / trials);
  return s;
}

}  // namespace

TEST_CASE("log-normal moments in closed form") {
  CHECK(lognormal_moment(1, 0.7) == doctest::Approx(1.0));
  CHECK(lognormal_moment(0, 0.7) == doctest::Approx(1.0));
  CHECK(lognormal_moment(2, 0.0) == doctest::Approx(1.0));
  CHECK(lognormal_moment(4, 0.1) == doctest::Approx(std::exp(0.6)).epsilon(1e-12));
  CHECK(lognormal_moment(2, 0.5) == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
  CHECK_THROWS(lognormal_moment(-1, 0.1));
  CHECK_THROWS(lognormal_moment(2, -0.1));
}

TEST_CASE("log-normal moment matches Monte Carlo") {
  Rng rng = Rng::stream(7, 1);
  const double s2 = 0.1;
  const double sd = std::sqrt(s2);
  const auto st = sample_stats(1000000, [&](int) {
    return std::exp(4.0 * rng.normal(-s2 / 2.0, sd));
  });
  CHECK(std::abs(st.mean - lognormal_moment(4, s2)) <
        0.01 * lognormal_moment(4, s2));
}

TEST_CASE("walk model validation") {
  WalkModel ok = ramp_chain(4, 0.2);
  CHECK_NOTHROW(ok.validate());

  WalkModel shrink = ok;
  shrink.sigma2[2] = 0.0;  // decreasing within the chain
  CHECK_THROWS(shrink.validate());

  WalkModel negative = ok;
  negative.sigma2[0] = -0.1;
  CHECK_THROWS(negative.validate());

  WalkModel ragged = ok;
  ragged.phi.pop_back();
  CHECK_THROWS(ragged.validate());

  // a fresh chain may reset sigma2 downward
  WalkModel two = ok;
  two.chain = {0, 0, 1, 1};
  two.sigma2 = {0.1, 0.2, 0.05, 0.01};
  CHECK_THROWS(two.validate());
  two.sigma2 = {0.1, 0.2, 0.05, 0.3};
  CHECK_NOTHROW(two.validate());
}

TEST_CASE("deterministic walks and the degenerate limit") {
  WalkModel m = ramp_chain(5, 0.2);
  const auto a = simulate_walk(m, 99);
  const auto b = simulate_walk(m, 99);
  CHECK(a == b);
  CHECK(simulate_walk(m, 100) != a);
  for (double v : a) CHECK(v > 0.0);

  WalkModel frozen = m;
  frozen.sigma2.assign(5, 0.0);
  const auto f = simulate_walk(frozen, 99);
  for (int v = 0; v < 5; ++v) CHECK(f[v] == doctest::Approx(std::exp(m.phi[v])));
}

TEST_CASE("restricting a model to one chain reproduces its values") {
  WalkModel full;
  full.phi = {0.0, 0.1, 0.5, 0.6, 0.7};
  full.sigma2 = {0.02, 0.08, 0.01, 0.05, 0.11};
  full.chain = {3, 3, 7, 7, 7};

  WalkModel part;
  part.phi = {0.5, 0.6, 0.7};
  part.sigma2 = {0.01, 0.05, 0.11};
  part.chain = {7, 7, 7};

  const auto f_full = simulate_walk(full, 4242);
  const auto f_part = simulate_walk(part, 4242);
  for (int k = 0; k < 3; ++k) CHECK(f_part[k] == doctest::Approx(f_full[2 + k]).epsilon(1e-15));
}

TEST_CASE("walk moments match the model") {
  WalkModel m = ramp_chain(3, 0.2);
  const int N = 100000;
  Rng seeder = Rng::stream(8, 2);

  std::vector<std::vector<double>> draws(N);
  for (int i = 0; i < N; ++i) draws[i] = simulate_walk(m, seeder.bits());

  for (int v = 0; v < 3; ++v) {
    const double scale = std::exp(m.phi[v]);
    const auto first = sample_stats(N, [&](int i) { return draws[i][v] / scale; });
    CHECK(std::abs(first.mean - 1.0) <= 3.0 * first.se);
    const auto second =
        sample_stats(N, [&](int i) { return std::pow(draws[i][v] / scale, 2.0); });
    CHECK(std::abs(second.mean - std::exp(m.sigma2[v])) <= 4.0 * second.se);
  }
}

TEST_CASE("adapted weights on the two frozen examples") {
  // chain edge: phi(j) = 0, sigma moves 0 -> ln 2
  WalkModel chain;
  chain.phi = {0.3, 0.0};
  chain.sigma2 = {0.0, std::log(2.0)};
  chain.chain = {0, 0};
  const AdaptedWeights aw = adapted_weights(chain, path_graph(2));
  REQUIRE(aw.graph.edge_count() == 1);
  CHECK(aw.fields.weight[0] == doctest::Approx(1.0));
  CHECK(aw.fields.drift[0] == doctest::Approx(-0.3));
  CHECK(aw.dropped_edges == 0);

  // independent edge: phi = 0, sigma2 = ln 2 at both ends
  WalkModel indep;
  indep.phi = {0.0, 0.0};
  indep.sigma2 = {std::log(2.0), std::log(2.0)};
  indep.chain = {0, 1};
  const AdaptedWeights aw2 = adapted_weights(indep, path_graph(2));
  CHECK(aw2.fields.weight[0] == doctest::Approx(0.5));
}

TEST_CASE("adapted weights drop doubly deterministic independent edges") {
  WalkModel m;
  m.phi = {0.0, 0.0, 0.1};
  m.sigma2 = {0.0, 0.0, 0.2};
  m.chain = {0, 1, 1};
  const AdaptedWeights aw =
      adapted_weights(m, DirectedGraph(3, {{0, 1}, {1, 2}}));
  CHECK(aw.dropped_edges == 1);
  CHECK(aw.graph.edge_count() == 1);
  CHECK(aw.graph.edges[0] == std::pair<int, int>{1, 2});
  // potential survives on the kept subgraph
  REQUIRE(aw.fields.potential.has_value());
  CHECK((*aw.fields.potential)[1] - (*aw.fields.potential)[2] ==
        doctest::Approx(-0.1));
}

TEST_CASE("adapted weights floor vanishing denominators") {
  WalkModel m;
  m.phi = {0.0, 0.0};
  m.sigma2 = {0.2, 0.2};  // chain edge with zero variance increment
  m.chain = {0, 0};
  const AdaptedWeights aw = adapted_weights(m, path_graph(2));
  REQUIRE(aw.graph.edge_count() == 1);
  CHECK(std::isfinite(aw.fields.weight[0]));
  CHECK(aw.fields.weight[0] == doctest::Approx(1e12));
}

TEST_CASE("normalized edge energy has unit mean") {
  WalkModel m = ramp_chain(4, 0.3);
  const AdaptedWeights aw = adapted_weights(m, path_graph(4));
  const int N = 50000;
  Rng seeder = Rng::stream(9, 3);
  std::vector<std::vector<double>> draws(N);
  for (int i = 0; i < N; ++i) draws[i] = simulate_walk(m, seeder.bits());

  for (int e = 0; e < aw.graph.edge_count(); ++e) {
    const auto [i, j] = aw.graph.edges[e];
    const double w = aw.fields.weight[e];
    const double a = aw.fields.drift[e];
    const auto st = sample_stats(N, [&](int k) {
      const double d = draws[k][j] - std::exp(a) * draws[k][i];
      return w * d * d;
    });
    CHECK(std::abs(st.mean - 1.0) <= 4.0 * st.se);
  }
}

TEST_CASE("fourth moment of the normalized edge increment") {
  CHECK(fourth_moment_edge(0.0, 0.0) == doctest::Approx(3.0));
  CHECK(fourth_moment_edge(0.0, std::log(2.0)) == doctest::Approx(41.0));

  // simulation oracle at (0.05, 0.15): nu walks two independent increments,
  // f = e^{nu}, and the adapted weight normalizes the squared difference
  const double si = 0.05, sj = 0.15;
  WalkModel m;
  m.phi = {0.0, 0.0};
  m.sigma2 = {si, sj};
  m.chain = {0, 0};
  const AdaptedWeights aw = adapted_weights(m, path_graph(2));
  const double w = aw.fields.weight[0];
  Rng rng = Rng::stream(10, 4);
  const auto st = sample_stats(10000000, [&](int) {
    const double nu_i = rng.normal(-si / 2.0, std::sqrt(si));
    const double nu_j = nu_i + rng.normal(-(sj - si) / 2.0, std::sqrt(sj - si));
    const double d = std::exp(nu_j) - std::exp(nu_i);
    const double x = w * d * d;
    return x * x;
  });
  CHECK(std::abs(st.mean - fourth_moment_edge(si, sj)) <
        0.02 * fourth_moment_edge(si, sj));
}

TEST_CASE("chain variance bound U frozen values") {
  CHECK(variance_bound_U({0.0, 0.0}) == doctest::Approx(0.0));
  CHECK(variance_bound_U({0.0, 0.0, 0.0}) == doctest::Approx(2.0));
  // direct formula evaluation for a nontrivial chain
  const std::vector<double> s = {0.02, 0.08, 0.2};
  const double expected = std::exp(4 * 0.2) + (3 * std::exp(4 * 0.08) - 1) +
                          (3 * std::exp(4 * 0.2) - 1) - 3;
  CHECK(variance_bound_U(s) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS(variance_bound_U({0.1}));  // needs at least one edge
}

TEST_CASE("window statistic has mean |F|; its variance has the closed form") {
  // The a priori bound U undercounts the variance (it drops positive
  // cross-edge covariance), so the reference here is the exact closed form;
  // the acceptance suite reports the U comparison as specified.
  WalkModel m = ramp_chain(4, 0.2);
  const AdaptedWeights aw = adapted_weights(m, path_graph(4));
  REQUIRE(aw.graph.edge_count() == 3);

  const int N = 200000;
  Rng seeder = Rng::stream(11, 5);
  std::vector<double> samples(N);
  for (int k = 0; k < N; ++k) {
    const auto f = simulate_walk(m, seeder.bits());
    double s = 0.0;
    for (int e = 0; e < aw.graph.edge_count(); ++e) {
      const auto [i, j] = aw.graph.edges[e];
      const double d = f[j] - std::exp(aw.fields.drift[e]) * f[i];
      s += aw.fields.weight[e] * d * d;
    }
    samples[k] = s;
  }
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= N;
  double sumsq = 0.0;
  for (double s : samples) sumsq += (s - mean) * (s - mean);
  const double var_mc = sumsq / (N - 1);
  const double se_mean = std::sqrt(var_mc / N);
  CHECK(std::abs(mean - 3.0) <= 4.0 * se_mean);

  // the variance estimator is heavy tailed here: its relative SE is about
  // 5.5% at this sample size, so 10% is roughly a two sigma window. The
  // closed form sits 35% above variance_bound_U, still cleanly separated.
  const double var_exact = oracles::chain_variance_exact(m.sigma2);
  CHECK(std::abs(var_mc - var_exact) < 0.10 * var_exact);
  CHECK(var_exact > variance_bound_U(m.sigma2));  // the undercount, documented
}

TEST_CASE("tail probability bound") {
  CHECK(cantelli_p(0.0, 1.0) == doctest::Approx(0.0));
  CHECK(cantelli_p(1.0, 1.0) == doctest::Approx(0.5));
  CHECK(cantelli_p(2.0, 3.0) == doctest::Approx(2.0 / 11.0));
  CHECK_THROWS(cantelli_p(1.0, 0.0));
  CHECK_THROWS(cantelli_p(-1.0, 1.0));
}

TEST_CASE("layer thresholds") {
  const double lmax = 2.0;
  const double t = std::log(2.0) / lmax;
  const auto th = layer_thresholds(t, lmax, 4.0, 2.0, 3);
  REQUIRE(th.size() == 3);
  CHECK(th[0] == doctest::Approx(t * 6.0));
  CHECK(th[1] == doctest::Approx(t * 0.5 * 6.0));
  CHECK(th[2] / th[1] == doctest::Approx(th[1] / th[0]).epsilon(1e-12));
}

TEST_CASE("anomaly test accepts the deterministic profile") {
  WalkModel m = ramp_chain(6, 0.25);
  const AdaptedWeights aw = adapted_weights(m, path_graph(6));
  const SpectralLaplacian L = SpectralLaplacian::build(aw.graph, aw.fields);
  const FilterPair filters = make_filters(L, default_time(L));

  Eigen::VectorXd f(6);
  for (int v = 0; v < 6; ++v) f(v) = std::exp(m.phi[v]);
  const AnomalyVerdict v = anomaly_test(filters, m, f, std::nullopt, 4);
  CHECK(v.statistic == doctest::Approx(0.0));
  CHECK(v.expected == doctest::Approx(5.0));
  CHECK(v.U == doctest::Approx(variance_bound_U(m.sigma2)));
  CHECK(v.delta == doctest::Approx(3.0 * std::sqrt(v.U)));
  CHECK(v.p_bound == doctest::Approx(0.1));
  CHECK_FALSE(v.flagged());
  for (char flag : v.layer_flags) CHECK_FALSE(static_cast<bool>(flag));

  Eigen::VectorXd bad = f;
  bad(2) = 0.0;
  CHECK_THROWS(anomaly_test(filters, m, bad, std::nullopt, 4));
}

TEST_CASE("anomaly test null coverage and injected detection") {
  WalkModel m = ramp_chain(8, 0.2);
  const AdaptedWeights aw = adapted_weights(m, path_graph(8));
  const SpectralLaplacian L = SpectralLaplacian::build(aw.graph, aw.fields);
  const FilterPair filters = make_filters(L, default_time(L));

  const int N = 10000;
  Rng seeder = Rng::stream(12, 6);
  int null_flags = 0;
  double p_bound = 0.0;
  for (int trial = 0; trial < N; ++trial) {
    const auto draw = simulate_walk(m, seeder.bits());
    Eigen::VectorXd f(8);
    for (int v = 0; v < 8; ++v) f(v) = draw[v];
    const AnomalyVerdict v = anomaly_test(filters, m, f, std::nullopt, 4);
    p_bound = v.p_bound;
    if (v.flagged()) ++null_flags;
  }
  const double rate = static_cast<double>(null_flags) / N;
  const double se = std::sqrt(p_bound * (1.0 - p_bound) / N);
  CHECK(rate <= p_bound + 3.0 * se);

  // multiplying a run of entries by 5 must trip the first layer
  Rng seeder2 = Rng::stream(12, 7);
  int first_layer = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto draw = simulate_walk(m, seeder2.bits());
    Eigen::VectorXd f(8);
    for (int v = 0; v < 8; ++v) f(v) = draw[v] * (v >= 3 && v <= 5 ? 5.0 : 1.0);
    const AnomalyVerdict v = anomaly_test(filters, m, f, std::nullopt, 4);
    if (v.flagged() && v.layer_flags[0]) ++first_layer;
  }
  CHECK(first_layer == 50);
}

TEST_CASE("mean of the Laplacian image vanishes") {
  WalkModel m = ramp_chain(5, 0.2);
  const AdaptedWeights aw = adapted_weights(m, path_graph(5));
  const SpectralLaplacian L = SpectralLaplacian::build(aw.graph, aw.fields);

  const int N = 100000;
  Rng seeder = Rng::stream(13, 8);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(5);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(5);
  for (int k = 0; k < N; ++k) {
    const auto draw = simulate_walk(m, seeder.bits());
    const Eigen::VectorXd f = Eigen::Map<const Eigen::VectorXd>(draw.data(), 5);
    const Eigen::VectorXd img = L.matrix() * f;
    sum += img;
    sumsq += img.cwiseProduct(img);
  }
  for (int v = 0; v < 5; ++v) {
    const double mean = sum(v) / N;
    const double var = (sumsq(v) - sum(v) * sum(v) / N) / (N - 1);
    const double se = std::sqrt(std::max(var, 1e-300) / N);
    CHECK(std::abs(mean) <= 4.0 * se);
  }
}

TEST_CASE("window variance bound sums over maximal chain runs") {
  WalkModel m;
  m.phi = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  m.sigma2 = {0.02, 0.05, 0.1, 0.01, 0.04, 0.09};
  m.chain = {0, 0, 0, 1, 1, 1};

  // two disjoint chain paths: bounds add
  const DirectedGraph two_runs(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}});
  const double expected = variance_bound_U({0.02, 0.05, 0.1}) +
                          variance_bound_U({0.01, 0.04, 0.09});
  CHECK(window_chain_variance_bound(m, two_runs) ==
        doctest::Approx(expected).epsilon(1e-12));

  // a gap splits a chain into two maximal runs
  const DirectedGraph gap(6, {{0, 1}, {3, 4}, {4, 5}});
  CHECK(window_chain_variance_bound(m, gap) ==
        doctest::Approx(variance_bound_U({0.02, 0.05}) +
                        variance_bound_U({0.01, 0.04, 0.09})).epsilon(1e-12));

  // cross-chain edges contribute nothing
  const DirectedGraph crossed(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
  CHECK(window_chain_variance_bound(m, crossed) ==
        doctest::Approx(expected).epsilon(1e-12));
}
