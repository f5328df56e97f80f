// gscat: synthetic count generation, model fitting, scattering curves, and
// windowed anomaly detection over (block, day) grids.
//
// Exit codes: 0 clean, 1 error, 2 detect found at least one flagged day.
// stderr carries diagnostics; data goes to stdout only for the path "-".

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gscat/io.hpp"
#include "gscat/laplacian.hpp"
#include "gscat/scattering.hpp"
#include "gscat/selfcheck.hpp"
#include "gscat/semigroup.hpp"
#include "gscat/stochastic.hpp"
#include "gscat/traffic.hpp"

namespace {

double parse_policy(const std::string& text, const char* flag) {
  if (text == "auto") return 0.0;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || v <= 0.0)
    throw std::runtime_error(std::string(flag) + " must be 'auto' or a positive real");
  return v;
}

struct InjectSpec {
  int day = 0;
  double factor = 1.0;
};

InjectSpec parse_inject(const std::string& text) {
  InjectSpec spec;
  bool saw_day = false, saw_factor = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string part = text.substr(pos, comma - pos);
    const std::size_t eq = part.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--inject expects day=D,factor=X");
    const std::string key = part.substr(0, eq);
    const std::string value = part.substr(eq + 1);
    try {
      if (key == "day") {
        spec.day = std::stoi(value);
        saw_day = true;
      } else if (key == "factor") {
        spec.factor = std::stod(value);
        saw_factor = true;
      } else {
        throw std::runtime_error("unknown key");
      }
    } catch (const std::exception&) {
      throw std::runtime_error("--inject expects day=D,factor=X, got '" + text + "'");
    }
    pos = comma + 1;
  }
  if (!saw_day || !saw_factor)
    throw std::runtime_error("--inject needs both day= and factor=");
  if (spec.day < 1) throw std::runtime_error("--inject day must be >= 1");
  if (spec.factor < 0) throw std::runtime_error("--inject factor must be >= 0");
  return spec;
}

gscat::WeekdayModel resolve_model(const std::string& model_path, bool demo,
                                  int blocks, bool blocks_given) {
  if (!model_path.empty()) {
    gscat::WeekdayModel model = gscat::read_model(model_path);
    if (blocks_given && model.blocks_per_day != blocks)
      throw std::runtime_error("model file has blocks_per_day " +
                               std::to_string(model.blocks_per_day) +
                               " but --blocks says " + std::to_string(blocks));
    return model;
  }
  if (demo) return gscat::demo_model(blocks);
  throw std::runtime_error("need --model FILE or --demo");
}

int run_simulate(const std::string& model_path, int blocks, bool blocks_given,
                 int days, std::uint64_t seed, const std::string& inject,
                 const std::string& out_path) {
  // No --demo flag here: simulate falls back to the demo profile by design.
  gscat::WeekdayModel model =
      model_path.empty() ? gscat::demo_model(blocks)
                         : resolve_model(model_path, false, blocks, blocks_given);
  const gscat::TimeGrid grid(model.blocks_per_day, days);

  std::vector<int> all_days(grid.days);
  for (int d = 1; d <= grid.days; ++d) all_days[d - 1] = d;
  const gscat::WalkModel walk = gscat::window_model(model, all_days);
  const std::vector<double> f = gscat::simulate_walk(walk, seed);

  std::optional<InjectSpec> injection;
  if (!inject.empty()) {
    injection = parse_inject(inject);
    if (injection->day > grid.days)
      throw std::runtime_error("--inject day outside the grid");
  }

  gscat::CountSeries series = gscat::CountSeries::empty(grid);
  for (int d = 1; d <= grid.days; ++d)
    for (int m = 1; m <= grid.blocks_per_day; ++m) {
      double value = f[grid.vertex(m, d)];
      if (injection && injection->day == d) value *= injection->factor;
      series.counts[d - 1][m - 1] = std::llround(std::max(value, 0.0));
    }
  gscat::write_counts(out_path, series);
  return 0;
}

int run_fit(const std::string& in_path, int blocks, int days,
            const std::string& station, const std::string& out_path) {
  const gscat::TimeGrid grid(blocks, days);
  const gscat::CountSeries series = gscat::read_counts(in_path, grid, station);
  const gscat::WeekdayModel model = gscat::fit_model(series, grid);
  std::map<std::string, std::string> metadata = {{"source", "fit"},
                                                 {"input", in_path}};
  if (!station.empty()) metadata["station"] = station;
  gscat::write_model(out_path, model, metadata);
  return 0;
}

int run_scatter(const std::string& graph_path, const std::string& signal_path,
                const std::string& t_text, int layers, bool dump_laplacian,
                const std::string& out_path) {
  const gscat::EdgeListGraph input = gscat::read_edge_list(graph_path);
  const gscat::SpectralLaplacian L =
      gscat::SpectralLaplacian::build(input.graph, input.fields);
  if (dump_laplacian) {
    std::cerr << "laplacian " << L.size() << "x" << L.size() << ":\n";
    for (int i = 0; i < L.size(); ++i) {
      for (int j = 0; j < L.size(); ++j)
        std::cerr << (j ? "," : "") << L.matrix()(i, j);
      std::cerr << '\n';
    }
  }
  double t = parse_policy(t_text, "--t");
  if (t == 0.0) t = gscat::default_time(L);
  const gscat::FilterPair filters = gscat::make_filters(L, t);

  const std::vector<double> values = gscat::read_signal(signal_path, input.graph.n);
  Eigen::VectorXd f(input.graph.n);
  for (int i = 0; i < input.graph.n; ++i) f[i] = values[i];

  const gscat::ScatteringOutput out = gscat::scatter(filters, f, layers);
  gscat::write_scattering_csv(out_path, out);
  std::cerr << "scatter: " << layers << " layers, t = " << t
            << ", ||f|| = " << out.g0_norm << '\n';
  return 0;
}

int run_detect(const std::string& in_path, const std::string& model_path,
               bool fit_first, bool demo, int blocks, bool blocks_given, int days,
               const std::string& t_text, const std::string& delta_text, int layers,
               const std::string& station, int threads, const std::string& out_path,
               const std::string& heatmap_path) {
  const int choices = (!model_path.empty() ? 1 : 0) + (fit_first ? 1 : 0) + (demo ? 1 : 0);
  if (choices != 1)
    throw std::runtime_error("pick exactly one of --model, --fit-first, --demo");

  gscat::WeekdayModel model;
  if (fit_first) {
    const gscat::TimeGrid grid(blocks, days);
    model = gscat::fit_model(gscat::read_counts(in_path, grid, station), grid);
  } else {
    model = resolve_model(model_path, demo, blocks, blocks_given);
  }
  const gscat::TimeGrid grid(model.blocks_per_day, days);
  const gscat::CountSeries series = gscat::read_counts(in_path, grid, station);

  const double t = parse_policy(t_text, "--t");
  const double delta = parse_policy(delta_text, "--delta");
  const gscat::ScanResult scan =
      gscat::scan_year(series, grid, model, t, delta, layers, threads);

  gscat::write_verdicts(out_path, scan, layers);
  if (!heatmap_path.empty()) gscat::write_heatmap_pgm(heatmap_path, scan.g1);

  int skipped = 0;
  for (const auto& v : scan.verdicts)
    if (!v) ++skipped;
  const std::vector<int> flagged = scan.flagged_days();
  std::cerr << "detect: " << scan.verdicts.size() - skipped << " days scored, "
            << skipped << " skipped, " << flagged.size() << " flagged";
  if (!flagged.empty()) {
    std::cerr << " (";
    for (std::size_t i = 0; i < flagged.size(); ++i)
      std::cerr << (i ? " " : "") << flagged[i];
    std::cerr << ")";
  }
  std::cerr << '\n';
  return flagged.empty() ? 0 : 2;
}

int run_selftest_cmd(bool quick, std::uint64_t seed) {
  const std::vector<gscat::CheckResult> results = gscat::run_selftest(quick, seed);
  bool all_pass = true;
  for (const auto& r : results) {
    std::printf("%-20s %s  %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                r.detail.c_str());
    all_pass = all_pass && r.pass;
  }
  std::printf("%zu checks, %s\n", results.size(), all_pass ? "all passed" : "FAILURES");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive graph scattering pipeline"};
  app.require_subcommand(1);

  int blocks = 288;
  int days = 364;
  int layers = 5;
  int threads = 0;
  std::uint64_t seed = 42;
  std::string t_text = "auto";
  std::string delta_text = "auto";
  std::string station;
  std::string model_path;
  std::string in_path;
  std::string out_path = "-";
  std::string heatmap_path;
  std::string graph_path;
  std::string signal_path;
  std::string inject;
  bool fit_first = false;
  bool demo = false;
  bool quick = false;
  bool dump_laplacian = false;

  CLI::App* sim = app.add_subcommand("simulate", "write a synthetic count year");
  sim->add_option("--model", model_path, "model JSON (default: built-in demo profile)");
  CLI::Option* sim_blocks =
      sim->add_option("--blocks", blocks, "blocks per day")->check(CLI::PositiveNumber);
  sim->add_option("--days", days, "days (multiple of 7)")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "simulation seed");
  sim->add_option("--inject", inject, "day=D,factor=X multiplicative anomaly");
  sim->add_option("--out", out_path, "output counts CSV ('-' = stdout)");

  CLI::App* fit = app.add_subcommand("fit", "fit a weekday model from counts");
  fit->add_option("--in", in_path, "input counts CSV")->required();
  fit->add_option("--blocks", blocks, "blocks per day")->check(CLI::PositiveNumber);
  fit->add_option("--days", days, "days (multiple of 7)")->check(CLI::PositiveNumber);
  fit->add_option("--station", station, "station filter for 4-column files");
  fit->add_option("--out", out_path, "output model JSON ('-' = stdout)");

  CLI::App* sca = app.add_subcommand("scatter", "scattering curve of a signal on a graph");
  sca->add_option("--graph", graph_path, "edge list: i j [weight [drift]]")->required();
  sca->add_option("--signal", signal_path, "signal file, one value per vertex")->required();
  sca->add_option("--t", t_text, "diffusion time, 'auto' = ln2/lambda_max");
  sca->add_option("--layers", layers, "scattering depth")->check(CLI::PositiveNumber);
  sca->add_flag("--dump-laplacian", dump_laplacian, "print the assembled matrix to stderr");
  sca->add_option("--out", out_path, "output CSV ('-' = stdout)");

  CLI::App* det = app.add_subcommand("detect", "scan a count year for anomalous days");
  det->add_option("--in", in_path, "input counts CSV")->required();
  det->add_option("--model", model_path, "model JSON");
  det->add_flag("--fit-first", fit_first, "fit the model from the input counts");
  det->add_flag("--demo", demo, "use the built-in demo profile");
  CLI::Option* det_blocks =
      det->add_option("--blocks", blocks, "blocks per day")->check(CLI::PositiveNumber);
  det->add_option("--days", days, "days (multiple of 7)")->check(CLI::PositiveNumber);
  det->add_option("--t", t_text, "diffusion time, 'auto' = per-window ln2/lambda_max");
  det->add_option("--delta", delta_text, "threshold offset, 'auto' = 3 sqrt(U)");
  det->add_option("--layers", layers, "scattering depth")->check(CLI::PositiveNumber);
  det->add_option("--station", station, "station filter for 4-column files");
  det->add_option("--threads", threads, "worker cap, 0 = hardware");
  det->add_option("--out", out_path, "verdict CSV ('-' = stdout)");
  det->add_option("--heatmap", heatmap_path, "first-layer PGM heatmap path");

  CLI::App* self = app.add_subcommand("selftest", "run the built-in invariant suite");
  self->add_flag("--quick", quick, "algebraic checks only, skip Monte Carlo");
  self->add_option("--seed", seed, "Monte Carlo seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim)
      return run_simulate(model_path, blocks, sim_blocks->count() > 0, days, seed,
                          inject, out_path);
    if (*fit) return run_fit(in_path, blocks, days, station, out_path);
    if (*sca)
      return run_scatter(graph_path, signal_path, t_text, layers, dump_laplacian,
                         out_path);
    if (*det)
      return run_detect(in_path, model_path, fit_first, demo, blocks,
                        det_blocks->count() > 0, days, t_text, delta_text, layers,
                        station, threads, out_path, heatmap_path);
    if (*self) return run_selftest_cmd(quick, seed);
  } catch (const std::exception& e) {
    std::cerr << "gscat: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
