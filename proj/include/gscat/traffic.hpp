#pragma once
// A year of per-block counts as a graph over (block, day) cells: grid
// construction, per-day edge windows, weekday model fitting, and the windowed
// scan that turns a count series into per-day anomaly verdicts plus a
// first-layer magnitude grid.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gscat/stochastic.hpp"

namespace gscat {

/**
 * blocks_per_day blocks by days days, days divisible by 7. Vertex ids are
 * chronological: (block m, day d) -> (d-1)*blocks_per_day + (m-1) with
 * 1-based m and d, so the linear index order is time order.
 */
struct TimeGrid {
  int blocks_per_day = 288;
  int days = 364;

  TimeGrid() = default;
  TimeGrid(int blocks, int day_count);

  int vertex(int block, int day) const {
    return (day - 1) * blocks_per_day + (block - 1);
  }
  int block_of(int v) const { return v % blocks_per_day + 1; }
  int day_of(int v) const { return v / blocks_per_day + 1; }
  int vertex_count() const { return blocks_per_day * days; }
};

// Consecutive blocks within each day plus same-block edges seven days apart,
// oriented chronologically. days*(blocks-1) + blocks*(days-7) edges.
DirectedGraph build_grid_graph(const TimeGrid& grid);

/**
 * Edge window for day d: the within-day chain on day d plus the same-block
 * week edges (d-14,d-7), (d-7,d), (d,d+7), (d+7,d+14), each pair kept only
 * when both endpoints lie inside the year. window_days lists the days that
 * carry boundary vertices, ascending; the subset's local vertex order is
 * day-major over window_days, block order within each day.
 */
struct DayWindow {
  int day = 0;
  std::vector<int> window_days;
  EdgeSubset subset;
};

// parent must be build_grid_graph(grid); the two-argument form builds it
// internally, which is convenient but rebuilds the full graph per call.
DayWindow build_day_window(const TimeGrid& grid, const DirectedGraph& parent, int d);
DayWindow build_day_window(const TimeGrid& grid, int d);

/**
 * Counts indexed [day-1][block-1], -1 marking a missing cell. Missing cells
 * stay distinguishable from zero counts throughout.
 */
struct CountSeries {
  std::string station;
  int blocks_per_day = 0;
  int days = 0;
  std::vector<std::vector<std::int64_t>> counts;

  static CountSeries empty(const TimeGrid& grid, std::string station_id = "");
  std::int64_t at(int block, int day) const { return counts[day - 1][block - 1]; }
  bool day_complete(int day) const;
};

/**
 * Per-weekday walk parameters on the block axis. Weekday of day d is
 * (d-1) % 7 in 0..6, so days 1 and 8 share index 0; indices 5 and 6 are the
 * weekend in the demo profile. sigma2 profiles are nondecreasing in block.
 */
struct WeekdayModel {
  int blocks_per_day = 0;
  std::array<std::vector<double>, 7> phi;
  std::array<std::vector<double>, 7> sigma2;

  static int weekday_of(int day) { return (day - 1) % 7; }
  void validate() const;
};

// Built-in synthetic profile: a two-peak commute hump on log level around
// log 200 (amplitude 1.1 weekdays, 0.55 weekends) and noise variance rising
// geometrically across the day from 1e-3 to 1.4 (weekdays) or 1.5 (weekends).
WeekdayModel demo_model(int blocks_per_day);

/**
 * Per-(weekday, block) fit of the log-normal level and noise:
 *   phi-hat  = median over weeks of log(max(count, 1)) + sigma2-hat / 2
 *   sigma2-hat = sample variance over weeks of log(max(count, 1)),
 * then sigma2-hat made nondecreasing in block by running maximum (phi-hat's
 * correction uses the repaired value). Missing cells are excluded; a cell
 * with fewer than 8 non-missing weeks throws, naming the cell.
 */
WeekdayModel fit_model(const CountSeries& series, const TimeGrid& grid);

/**
 * The walk model over the listed days (ascending), vertex order day-major.
 * Chain id is the global day number, so simulation streams agree between a
 * window and the full grid. Equal consecutive sigma2 within a day are
 * separated by +1e-6 so chain-edge weight denominators stay meaningful.
 */
WalkModel window_model(const WeekdayModel& model, const std::vector<int>& day_list);

/**
 * One verdict slot per day (nullopt when any window day has a missing block)
 * and the first-layer magnitude grid, g1[day-1][block-1], zero on skipped
 * days. flagged_days lists days whose verdict flagged, ascending.
 */
struct ScanResult {
  std::vector<std::optional<AnomalyVerdict>> verdicts;
  std::vector<std::vector<double>> g1;

  std::vector<int> flagged_days() const;
};

/**
 * Runs the windowed anomaly test for every day of the year. t <= 0 means the
 * per-window default time ln 2 / lambda_max; delta <= 0 means the per-window
 * default 3 sqrt(U). Signals are counts clamped up to 1 (the log model
 * forbids zeros). Windows sharing weekday and truncation shape reuse one
 * spectral build; days are processed in parallel across at most `threads`
 * workers (0 = hardware default) with output independent of the thread count.
 */
ScanResult scan_year(const CountSeries& series, const TimeGrid& grid,
                     const WeekdayModel& model, double t, double delta, int K,
                     int threads = 0);

}  // namespace gscat
