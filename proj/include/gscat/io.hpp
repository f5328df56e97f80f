#pragma once
// File formats: count CSVs, weekday model JSON, edge-list graphs, verdict
// CSVs, PGM heatmaps, scattering curves. Readers report the offending line
// or field; writers print floating point with %.10g so identical runs emit
// identical bytes. The path "-" means stdout (writers) or stdin (readers).

#include <map>
#include <string>
#include <vector>

#include "gscat/scattering.hpp"
#include "gscat/traffic.hpp"

namespace gscat {

/**
 * CSV with header `day,block,count` or `station,day,block,count`; the
 * four-column form requires a station filter. Cells never mentioned stay
 * missing. Duplicate cells, out-of-range indices, and negative counts are
 * line-numbered errors.
 */
CountSeries read_counts(const std::string& path, const TimeGrid& grid,
                        const std::string& station = "");

// Day-major `day,block,count` rows; missing cells are omitted, which is how
// missingness round-trips.
void write_counts(const std::string& path, const CountSeries& series);

// JSON document: blocks_per_day, phi[7][blocks], sigma2[7][blocks], plus a
// free-form string metadata object (seed, provenance).
WeekdayModel read_model(const std::string& path);
void write_model(const std::string& path, const WeekdayModel& model,
                 const std::map<std::string, std::string>& metadata);

/**
 * Whitespace-separated `i j [weight [drift]]` per line, `#` starts a comment.
 * Weight defaults to 1, drift to 0. Vertex count is max index + 1. When the
 * drift turns out to be a gradient field its potential is attached.
 */
struct EdgeListGraph {
  DirectedGraph graph;
  EdgeFields fields;
};

EdgeListGraph read_edge_list(const std::string& path);

// One value per line, `#` comments; must supply exactly expected_n values.
std::vector<double> read_signal(const std::string& path, int expected_n);

// Header day,S_F,expected,U,delta,p_bound,flag,g1_norm,...,gK_norm; one row
// per day that received a verdict.
void write_verdicts(const std::string& path, const ScanResult& scan, int K);

// Binary PGM (P5), blocks_per_day rows by days columns, brightness
// 255 * |g1| / max over the grid (all zero when the grid is identically 0).
void write_heatmap_pgm(const std::string& path,
                       const std::vector<std::vector<double>>& g1);

// Rows k,g_norm,bound,refined_bound for k = 1..K.
void write_scattering_csv(const std::string& path, const ScatteringOutput& out);

}  // namespace gscat
