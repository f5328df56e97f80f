#include "gscat/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gscat {

namespace {

std::string display_name(const std::string& path, bool reading) {
  if (path == "-") return reading ? "<stdin>" : "<stdout>";
  return path;
}

// %.10g: enough digits that equal doubles print equally and round-trip to
// the same verdict ordering, short enough to stay readable.
std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

std::runtime_error line_error(const std::string& path, std::size_t line,
                              const std::string& what) {
  return std::runtime_error(display_name(path, true) + " line " +
                            std::to_string(line) + ": " + what);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
    s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

std::int64_t parse_int(const std::string& path, std::size_t line,
                       const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw line_error(path, line, "bad integer '" + text + "' in field " + field);
  }
}

double parse_real(const std::string& path, std::size_t line,
                  const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw line_error(path, line, "bad number '" + text + "' in field " + field);
  }
}

// Readers and writers funnel through these so "-" maps to the standard
// streams everywhere.
struct InStream {
  std::ifstream file;
  std::istream* stream = nullptr;

  explicit InStream(const std::string& path) {
    if (path == "-") {
      stream = &std::cin;
      return;
    }
    file.open(path);
    if (!file) throw std::runtime_error("cannot open " + path + " for reading");
    stream = &file;
  }
};

struct OutStream {
  std::ofstream file;
  std::ostream* stream = nullptr;

  OutStream(const std::string& path, bool binary) {
    if (path == "-") {
      stream = &std::cout;
      return;
    }
    file.open(path, binary ? std::ios::out | std::ios::binary : std::ios::out);
    if (!file) throw std::runtime_error("cannot open " + path + " for writing");
    stream = &file;
  }

  void finish(const std::string& path) {
    stream->flush();
    if (!*stream) throw std::runtime_error("write to " + display_name(path, false) + " failed");
  }
};

}  // namespace

CountSeries read_counts(const std::string& path, const TimeGrid& grid,
                        const std::string& station) {
  InStream in(path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(*in.stream, line))
    throw std::runtime_error(display_name(path, true) + ": empty counts file");
  ++lineno;
  const std::string header = strip(line);
  bool with_station = false;
  if (header == "day,block,count") {
    with_station = false;
  } else if (header == "station,day,block,count") {
    with_station = true;
    if (station.empty())
      throw std::runtime_error(display_name(path, true) +
                               ": station column present, a --station filter is required");
  } else {
    throw line_error(path, lineno, "unrecognized header '" + header + "'");
  }

  CountSeries series = CountSeries::empty(grid, station);
  while (std::getline(*in.stream, line)) {
    ++lineno;
    const std::string row = strip(line);
    if (row.empty()) continue;
    std::vector<std::string> fields = split_csv(row);
    const std::size_t expected = with_station ? 4 : 3;
    if (fields.size() != expected)
      throw line_error(path, lineno,
                       "expected " + std::to_string(expected) + " fields, got " +
                           std::to_string(fields.size()));
    std::size_t at = 0;
    if (with_station) {
      if (strip(fields[at++]) != station) continue;
    }
    const std::int64_t day = parse_int(path, lineno, "day", strip(fields[at]));
    const std::int64_t block = parse_int(path, lineno, "block", strip(fields[at + 1]));
    const std::int64_t count = parse_int(path, lineno, "count", strip(fields[at + 2]));
    if (day < 1 || day > grid.days)
      throw line_error(path, lineno, "day " + std::to_string(day) + " outside 1.." +
                                         std::to_string(grid.days));
    if (block < 1 || block > grid.blocks_per_day)
      throw line_error(path, lineno, "block " + std::to_string(block) + " outside 1.." +
                                         std::to_string(grid.blocks_per_day));
    if (count < 0) throw line_error(path, lineno, "negative count");
    std::int64_t& cell = series.counts[day - 1][block - 1];
    if (cell >= 0)
      throw line_error(path, lineno, "duplicate cell day " + std::to_string(day) +
                                         " block " + std::to_string(block));
    cell = count;
  }
  return series;
}

void write_counts(const std::string& path, const CountSeries& series) {
  OutStream out(path, false);
  *out.stream << "day,block,count\n";
  for (int d = 1; d <= series.days; ++d)
    for (int m = 1; m <= series.blocks_per_day; ++m) {
      const std::int64_t c = series.counts[d - 1][m - 1];
      if (c < 0) continue;
      *out.stream << d << ',' << m << ',' << c << '\n';
    }
  out.finish(path);
}

WeekdayModel read_model(const std::string& path) {
  InStream in(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(*in.stream);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(display_name(path, true) + ": " + e.what());
  }
  auto field_error = [&](const std::string& what) {
    return std::runtime_error(display_name(path, true) + ": model field " + what);
  };
  if (!doc.is_object()) throw field_error("root must be an object");
  if (!doc.contains("blocks_per_day") || !doc["blocks_per_day"].is_number_integer())
    throw field_error("'blocks_per_day' missing or not an integer");
  WeekdayModel model;
  model.blocks_per_day = doc["blocks_per_day"].get<int>();
  for (const char* key : {"phi", "sigma2"}) {
    if (!doc.contains(key) || !doc[key].is_array() || doc[key].size() != 7)
      throw field_error(std::string("'") + key + "' must be an array of 7 arrays");
    for (int wd = 0; wd < 7; ++wd) {
      const auto& arr = doc[key][wd];
      if (!arr.is_array())
        throw field_error(std::string("'") + key + "'[" + std::to_string(wd) +
                          "] must be an array");
      std::vector<double> values;
      values.reserve(arr.size());
      for (const auto& v : arr) {
        if (!v.is_number())
          throw field_error(std::string("'") + key + "'[" + std::to_string(wd) +
                            "] contains a non-number");
        values.push_back(v.get<double>());
      }
      (key[0] == 'p' ? model.phi : model.sigma2)[wd] = std::move(values);
    }
  }
  try {
    model.validate();
  } catch (const std::exception& e) {
    throw std::runtime_error(display_name(path, true) + ": " + e.what());
  }
  return model;
}

void write_model(const std::string& path, const WeekdayModel& model,
                 const std::map<std::string, std::string>& metadata) {
  model.validate();
  nlohmann::json doc;
  doc["blocks_per_day"] = model.blocks_per_day;
  doc["phi"] = model.phi;
  doc["sigma2"] = model.sigma2;
  doc["metadata"] = metadata;
  OutStream out(path, false);
  *out.stream << doc.dump(1) << '\n';
  out.finish(path);
}

EdgeListGraph read_edge_list(const std::string& path) {
  InStream in(path);
  std::string line;
  std::size_t lineno = 0;
  struct Row {
    int i, j;
    double w, a;
  };
  std::vector<Row> rows;
  int n = 0;
  while (std::getline(*in.stream, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::vector<std::string> parts;
    std::string tok;
    while (tokens >> tok) parts.push_back(tok);
    if (parts.empty()) continue;
    if (parts.size() < 2 || parts.size() > 4)
      throw line_error(path, lineno, "expected 'i j [weight [drift]]'");
    Row row;
    row.i = static_cast<int>(parse_int(path, lineno, "i", parts[0]));
    row.j = static_cast<int>(parse_int(path, lineno, "j", parts[1]));
    row.w = parts.size() > 2 ? parse_real(path, lineno, "weight", parts[2]) : 1.0;
    row.a = parts.size() > 3 ? parse_real(path, lineno, "drift", parts[3]) : 0.0;
    if (row.i < 0 || row.j < 0) throw line_error(path, lineno, "negative vertex index");
    if (row.i == row.j) throw line_error(path, lineno, "self loop");
    if (row.w <= 0) throw line_error(path, lineno, "weight must be positive");
    n = std::max(n, std::max(row.i, row.j) + 1);
    rows.push_back(row);
  }
  if (rows.empty())
    throw std::runtime_error(display_name(path, true) + ": no edges");
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    return std::pair(x.i, x.j) < std::pair(y.i, y.j);
  });
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (rows[k].i == rows[k - 1].i && rows[k].j == rows[k - 1].j)
      throw std::runtime_error(display_name(path, true) + ": duplicate edge " +
                               std::to_string(rows[k].i) + " -> " +
                               std::to_string(rows[k].j));

  EdgeListGraph out;
  std::vector<std::pair<int, int>> edges;
  edges.reserve(rows.size());
  for (const Row& r : rows) {
    edges.push_back({r.i, r.j});
    out.fields.weight.push_back(r.w);
    out.fields.drift.push_back(r.a);
  }
  out.graph = DirectedGraph(n, std::move(edges));
  if (is_weakly_connected(out.graph))
    out.fields.potential = potential_from_drift(out.graph, out.fields.drift);
  return out;
}

std::vector<double> read_signal(const std::string& path, int expected_n) {
  InStream in(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> values;
  while (std::getline(*in.stream, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = strip(line);
    if (body.empty()) continue;
    values.push_back(parse_real(path, lineno, "value", body));
  }
  if (static_cast<int>(values.size()) != expected_n)
    throw std::runtime_error(display_name(path, true) + ": expected " +
                             std::to_string(expected_n) + " values, got " +
                             std::to_string(values.size()));
  return values;
}

void write_verdicts(const std::string& path, const ScanResult& scan, int K) {
  OutStream out(path, false);
  *out.stream << "day,S_F,expected,U,delta,p_bound,flag";
  for (int k = 1; k <= K; ++k) *out.stream << ",g" << k << "_norm";
  *out.stream << '\n';
  for (std::size_t i = 0; i < scan.verdicts.size(); ++i) {
    const auto& v = scan.verdicts[i];
    if (!v) continue;
    *out.stream << (i + 1) << ',' << fmt(v->statistic) << ',' << fmt(v->expected)
                << ',' << fmt(v->U) << ',' << fmt(v->delta) << ','
                << fmt(v->p_bound) << ',' << (v->flagged() ? 1 : 0);
    for (double norm : v->layer_norms) *out.stream << ',' << fmt(norm);
    *out.stream << '\n';
  }
  out.finish(path);
}

void write_heatmap_pgm(const std::string& path,
                       const std::vector<std::vector<double>>& g1) {
  const int days = static_cast<int>(g1.size());
  if (days == 0) throw std::invalid_argument("empty heatmap grid");
  const int blocks = static_cast<int>(g1[0].size());
  double peak = 0.0;
  for (const auto& col : g1)
    for (double v : col) peak = std::max(peak, v);
  OutStream out(path, true);
  *out.stream << "P5\n" << days << ' ' << blocks << "\n255\n";
  std::vector<unsigned char> row(days);
  for (int m = 0; m < blocks; ++m) {
    for (int d = 0; d < days; ++d) {
      const double shade = peak > 0 ? std::clamp(g1[d][m] / peak, 0.0, 1.0) : 0.0;
      row[d] = static_cast<unsigned char>(std::lround(255.0 * shade));
    }
    out.stream->write(reinterpret_cast<const char*>(row.data()), days);
  }
  out.finish(path);
}

void write_scattering_csv(const std::string& path, const ScatteringOutput& out_data) {
  OutStream out(path, false);
  *out.stream << "k,g_norm,bound,refined_bound\n";
  for (std::size_t k = 0; k < out_data.layer_norms.size(); ++k)
    *out.stream << (k + 1) << ',' << fmt(out_data.layer_norms[k]) << ','
                << fmt(out_data.bound_curve[k]) << ','
                << fmt(out_data.refined_bound[k]) << '\n';
  out.finish(path);
}

}  // namespace gscat
