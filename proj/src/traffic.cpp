#include "gscat/traffic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "gscat/laplacian.hpp"
#include "gscat/scattering.hpp"
#include "gscat/semigroup.hpp"

namespace gscat {

TimeGrid::TimeGrid(int blocks, int day_count)
    : blocks_per_day(blocks), days(day_count) {
  if (blocks < 1) throw std::invalid_argument("grid needs at least one block per day");
  if (days < 1 || days % 7 != 0)
    throw std::invalid_argument("grid day count must be a positive multiple of 7");
}

DirectedGraph build_grid_graph(const TimeGrid& grid) {
  const int B = grid.blocks_per_day;
  const int D = grid.days;
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(D) * (B - 1) +
                static_cast<std::size_t>(B) * std::max(0, D - 7));
  for (int d = 1; d <= D; ++d)
    for (int m = 1; m < B; ++m)
      edges.push_back({grid.vertex(m, d), grid.vertex(m + 1, d)});
  for (int d = 1; d + 7 <= D; ++d)
    for (int m = 1; m <= B; ++m)
      edges.push_back({grid.vertex(m, d), grid.vertex(m, d + 7)});
  return DirectedGraph(grid.vertex_count(), std::move(edges));
}

namespace {

// Week pairs (x, x+7) of the day-d window that fit inside the year.
std::vector<int> week_pair_bases(const TimeGrid& grid, int d) {
  std::vector<int> bases;
  for (int x : {d - 14, d - 7, d, d + 7})
    if (x >= 1 && x + 7 <= grid.days) bases.push_back(x);
  return bases;
}

std::vector<int> window_days_for(const TimeGrid& grid, int d) {
  std::vector<int> days = {d};
  for (int x : week_pair_bases(grid, d)) {
    days.push_back(x);
    days.push_back(x + 7);
  }
  std::sort(days.begin(), days.end());
  days.erase(std::unique(days.begin(), days.end()), days.end());
  return days;
}

}  // namespace

DayWindow build_day_window(const TimeGrid& grid, const DirectedGraph& parent, int d) {
  if (d < 1 || d > grid.days) throw std::invalid_argument("day outside the grid");
  const int B = grid.blocks_per_day;
  std::vector<int> ids;
  for (int m = 1; m < B; ++m)
    ids.push_back(parent.edge_id(grid.vertex(m, d), grid.vertex(m + 1, d)));
  for (int x : week_pair_bases(grid, d))
    for (int m = 1; m <= B; ++m)
      ids.push_back(parent.edge_id(grid.vertex(m, x), grid.vertex(m, x + 7)));
  DayWindow window;
  window.day = d;
  window.window_days = window_days_for(grid, d);
  window.subset = induce_subgraph(parent, std::move(ids));
  return window;
}

DayWindow build_day_window(const TimeGrid& grid, int d) {
  return build_day_window(grid, build_grid_graph(grid), d);
}

CountSeries CountSeries::empty(const TimeGrid& grid, std::string station_id) {
  CountSeries s;
  s.station = std::move(station_id);
  s.blocks_per_day = grid.blocks_per_day;
  s.days = grid.days;
  s.counts.assign(grid.days, std::vector<std::int64_t>(grid.blocks_per_day, -1));
  return s;
}

bool CountSeries::day_complete(int day) const {
  for (std::int64_t c : counts[day - 1])
    if (c < 0) return false;
  return true;
}

void WeekdayModel::validate() const {
  if (blocks_per_day < 1) throw std::invalid_argument("model has no blocks");
  for (int wd = 0; wd < 7; ++wd) {
    if (static_cast<int>(phi[wd].size()) != blocks_per_day ||
        static_cast<int>(sigma2[wd].size()) != blocks_per_day)
      throw std::invalid_argument("model profile length != blocks_per_day on weekday " +
                                  std::to_string(wd + 1));
    for (int m = 0; m < blocks_per_day; ++m) {
      if (!std::isfinite(phi[wd][m]) || !std::isfinite(sigma2[wd][m]) ||
          sigma2[wd][m] < 0.0)
        throw std::invalid_argument("model profile not finite/nonnegative at weekday " +
                                    std::to_string(wd + 1) + " block " +
                                    std::to_string(m + 1));
    }
  }
}

WeekdayModel demo_model(int blocks_per_day) {
  if (blocks_per_day < 1) throw std::invalid_argument("demo model needs blocks >= 1");
  const int B = blocks_per_day;
  auto hump = [](double x) {
    const double u = (x - 0.33) / 0.13;
    const double v = (x - 0.71) / 0.11;
    return std::exp(-u * u) + 0.9 * std::exp(-v * v);
  };
  WeekdayModel model;
  model.blocks_per_day = B;
  for (int wd = 0; wd < 7; ++wd) {
    const bool weekend = wd >= 5;
    const double amp = weekend ? 0.55 : 1.1;
    const double smax = weekend ? 1.5 : 1.4;
    model.phi[wd].resize(B);
    model.sigma2[wd].resize(B);
    for (int m = 0; m < B; ++m) {
      model.phi[wd][m] = std::log(200.0) + amp * hump((m + 0.5) / B);
      model.sigma2[wd][m] =
          B == 1 ? smax
                 : smax * std::pow(0.001 / smax,
                                   static_cast<double>(B - 1 - m) / (B - 1));
    }
  }
  return model;
}

WeekdayModel fit_model(const CountSeries& series, const TimeGrid& grid) {
  if (series.blocks_per_day != grid.blocks_per_day || series.days != grid.days)
    throw std::invalid_argument("count series dimensions do not match the grid");
  const int B = grid.blocks_per_day;
  const int weeks = grid.days / 7;
  WeekdayModel model;
  model.blocks_per_day = B;
  for (int wd = 0; wd < 7; ++wd) {
    std::vector<double> medians(B);
    model.sigma2[wd].resize(B);
    model.phi[wd].resize(B);
    for (int m = 0; m < B; ++m) {
      std::vector<double> x;
      x.reserve(weeks);
      for (int w = 0; w < weeks; ++w) {
        const std::int64_t c = series.counts[w * 7 + wd][m];
        if (c < 0) continue;
        x.push_back(std::log(static_cast<double>(std::max<std::int64_t>(c, 1))));
      }
      if (x.size() < 8)
        throw std::runtime_error(
            "fit_model: weekday " + std::to_string(wd + 1) + " block " +
            std::to_string(m + 1) + " has only " + std::to_string(x.size()) +
            " non-missing weeks (need at least 8)");
      std::sort(x.begin(), x.end());
      const std::size_t h = x.size() / 2;
      medians[m] = x.size() % 2 ? x[h] : 0.5 * (x[h - 1] + x[h]);
      if (x.front() == x.back()) {
        model.sigma2[wd][m] = 0.0;  // identical samples, exact zero, no roundoff
      } else {
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(x.size());
        double ss = 0.0;
        for (double v : x) ss += (v - mean) * (v - mean);
        model.sigma2[wd][m] = ss / static_cast<double>(x.size() - 1);
      }
    }
    for (int m = 1; m < B; ++m)
      model.sigma2[wd][m] = std::max(model.sigma2[wd][m], model.sigma2[wd][m - 1]);
    for (int m = 0; m < B; ++m)
      model.phi[wd][m] = medians[m] + 0.5 * model.sigma2[wd][m];
  }
  return model;
}

WalkModel window_model(const WeekdayModel& model, const std::vector<int>& day_list) {
  model.validate();
  if (day_list.empty()) throw std::invalid_argument("window needs at least one day");
  if (!std::is_sorted(day_list.begin(), day_list.end()) ||
      std::adjacent_find(day_list.begin(), day_list.end()) != day_list.end())
    throw std::invalid_argument("window day list must be strictly ascending");
  const int B = model.blocks_per_day;
  WalkModel walk;
  walk.phi.reserve(day_list.size() * B);
  walk.sigma2.reserve(day_list.size() * B);
  walk.chain.reserve(day_list.size() * B);
  for (int day : day_list) {
    if (day < 1) throw std::invalid_argument("window day list must be positive");
    const int wd = WeekdayModel::weekday_of(day);
    for (int m = 0; m < B; ++m) {
      double s = model.sigma2[wd][m];
      if (m > 0) s = std::max(s, walk.sigma2.back() + 1e-6);
      walk.phi.push_back(model.phi[wd][m]);
      walk.sigma2.push_back(s);
      walk.chain.push_back(day);
    }
  }
  walk.validate();
  return walk;
}

std::vector<int> ScanResult::flagged_days() const {
  std::vector<int> days;
  for (std::size_t i = 0; i < verdicts.size(); ++i)
    if (verdicts[i] && verdicts[i]->flagged()) days.push_back(static_cast<int>(i) + 1);
  return days;
}

namespace {

// Runs fn(0..tasks-1) over up to `threads` workers; rethrows the first
// worker exception after joining.
void parallel_for(int tasks, int threads, const std::function<void(int)>& fn) {
  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, tasks));
  if (workers == 1) {
    for (int i = 0; i < tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr error;
  auto body = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= tasks) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// One spectral build shared by every day whose window has this weekday and
// truncation shape. The walk model's chain ids come from the representative
// day; only their equality pattern matters downstream.
struct WindowEntry {
  std::vector<int> window_days;
  WalkModel walk;
  std::unique_ptr<SpectralLaplacian> laplacian;
  FilterPair filters;
};

int window_key(const TimeGrid& grid, int d) {
  const int mask = (d >= 15 ? 1 : 0) | (d >= 8 ? 2 : 0) |
                   (d + 7 <= grid.days ? 4 : 0) | (d + 14 <= grid.days ? 8 : 0);
  return WeekdayModel::weekday_of(d) * 16 + mask;
}

}  // namespace

ScanResult scan_year(const CountSeries& series, const TimeGrid& grid,
                     const WeekdayModel& model, double t, double delta, int K,
                     int threads) {
  if (series.blocks_per_day != grid.blocks_per_day || series.days != grid.days)
    throw std::invalid_argument("count series dimensions do not match the grid");
  if (model.blocks_per_day != grid.blocks_per_day)
    throw std::invalid_argument("model dimensions do not match the grid");
  if (K < 1) throw std::invalid_argument("need at least one scattering layer");

  const int B = grid.blocks_per_day;
  const int D = grid.days;
  const DirectedGraph parent = build_grid_graph(grid);

  // Representative day per distinct (weekday, truncation) window shape.
  std::map<int, int> rep_day;
  for (int d = 1; d <= D; ++d) rep_day.insert({window_key(grid, d), d});
  std::vector<std::pair<int, int>> key_rep(rep_day.begin(), rep_day.end());
  std::vector<WindowEntry> entries(key_rep.size());
  std::map<int, const WindowEntry*> entry_of_key;

  parallel_for(static_cast<int>(key_rep.size()), threads, [&](int i) {
    const int d = key_rep[i].second;
    WindowEntry& e = entries[i];
    const DayWindow window = build_day_window(grid, parent, d);
    e.window_days = window.window_days;
    e.walk = window_model(model, window.window_days);
    AdaptedWeights aw = adapted_weights(e.walk, window.subset.induced(parent));
    e.laplacian = std::make_unique<SpectralLaplacian>(
        SpectralLaplacian::build(aw.graph, aw.fields));
    const double t_used = t > 0 ? t : default_time(*e.laplacian);
    e.filters = make_filters(*e.laplacian, t_used);
  });
  for (std::size_t i = 0; i < key_rep.size(); ++i)
    entry_of_key[key_rep[i].first] = &entries[i];

  ScanResult result;
  result.verdicts.assign(D, std::nullopt);
  result.g1.assign(D, std::vector<double>(B, 0.0));

  parallel_for(D, threads, [&](int i) {
    const int d = i + 1;
    const std::vector<int> days = window_days_for(grid, d);
    for (int x : days)
      if (!series.day_complete(x)) return;  // no verdict without a full window

    const WindowEntry& e = *entry_of_key.at(window_key(grid, d));
    Eigen::VectorXd f(static_cast<int>(days.size()) * B);
    for (std::size_t idx = 0; idx < days.size(); ++idx)
      for (int m = 0; m < B; ++m)
        f[static_cast<int>(idx) * B + m] = static_cast<double>(
            std::max<std::int64_t>(series.counts[days[idx] - 1][m], 1));

    AnomalyVerdict verdict = anomaly_test(
        e.filters, e.walk, f,
        delta > 0 ? std::optional<double>(delta) : std::nullopt, K);
    const auto self = std::find(days.begin(), days.end(), d) - days.begin();
    for (int m = 0; m < B; ++m)
      result.g1[d - 1][m] = verdict.g1_magnitudes[static_cast<int>(self) * B + m];
    result.verdicts[d - 1] = std::move(verdict);
  });
  return result;
}

}  // namespace gscat
