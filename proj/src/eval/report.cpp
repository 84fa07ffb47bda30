#include "pitt/eval/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pitt/eval/image.hpp"
#include "pitt/train/trainer.hpp"

namespace pitt::eval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// JSON has no infinities; they are stored as null and read back as NaN.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double get_num(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> get_nums(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(get_num(x));
  return v;
}

std::string file_stem(const std::string& name) {
  std::string s;
  for (char c : name) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return s.empty() ? "unnamed" : s;
}

std::pair<double, double> range_of(std::initializer_list<const std::vector<double>*> vs) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto* v : vs)
    for (double x : *v)
      if (std::isfinite(x)) lo = std::min(lo, x), hi = std::max(hi, x);
  if (!std::isfinite(lo)) return {0.0, 1.0};
  if (hi - lo < 1e-300) hi = lo + 1.0;
  return {lo, hi};
}

int grid_rows(const std::vector<int>& grid) { return grid.size() == 2 ? grid[0] : 1; }
int grid_cols(const std::vector<int>& grid) { return grid.empty() ? 0 : grid.back(); }

std::vector<double> axis(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i) / static_cast<double>(n);
  return x;
}

Image decomposition_image(const DecompositionPanel& p) {
  if (p.grid.size() == 1) {
    const auto x = axis(p.truth.size());
    PlotOptions o;
    o.title = p.name;
    o.xlabel = "x";
    return line_plot({{"truth", x, p.truth}, {"passthrough", x, p.passthrough}, {"update", x, p.update},
                      {"output", x, p.output}},
                     o);
  }
  const int r = grid_rows(p.grid), c = grid_cols(p.grid);
  const auto [lo, hi] = range_of({&p.truth, &p.passthrough, &p.output});
  const int cell = std::max(1, 256 / std::max(r, c));
  return hstack({heatmap(p.truth, r, c, {cell, "truth", false, lo, hi}),
                 heatmap(p.passthrough, r, c, {cell, "passthrough", false, lo, hi}),
                 heatmap(p.update, r, c, {cell, "update", true, 0.0, 0.0}),
                 heatmap(p.output, r, c, {cell, "sum", false, lo, hi})});
}

Image error_image(const ErrorMap& e) {
  const int r = grid_rows(e.grid), c = grid_cols(e.grid);
  std::vector<double> err(e.truth.size());
  for (std::size_t i = 0; i < err.size(); ++i) err[i] = std::abs(e.prediction.at(i) - e.truth[i]);
  const auto [lo, hi] = range_of({&e.truth, &e.prediction});
  const int cell = std::max(1, 256 / std::max(r, c));
  return hstack({heatmap(e.prediction, r, c, {cell, "prediction", false, lo, hi}),
                 heatmap(e.truth, r, c, {cell, "truth", false, lo, hi}),
                 heatmap(err, r, c, {cell, "abs error", false, 0.0, 0.0})});
}

}  // namespace

json MetricsRecord::to_json() const {
  json j;
  j["benchmark"] = benchmark;
  j["model"] = model;
  j["n"] = n;
  j["mae_mean"] = num(mae_mean);
  if (mae_std) j["mae_std"] = num(*mae_std);
  j["per_seed"] = nums(per_seed);
  if (rollout_curve)
    j["rollout_curve"] = {{"time", nums(rollout_curve->time)},
                          {"per_step", nums(rollout_curve->per_step)},
                          {"cumulative", nums(rollout_curve->cumulative)}};
  j["flags"] = flags;
  return j;
}

MetricsRecord MetricsRecord::from_json(const json& j) {
  MetricsRecord r;
  r.benchmark = j.at("benchmark").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.n = j.at("n").get<int>();
  r.mae_mean = get_num(j.at("mae_mean"));
  if (j.contains("mae_std")) r.mae_std = get_num(j.at("mae_std"));
  r.per_seed = get_nums(j.at("per_seed"));
  if (j.contains("rollout_curve")) {
    const auto& c = j.at("rollout_curve");
    r.rollout_curve = RolloutCurve{get_nums(c.at("time")), get_nums(c.at("per_step")), get_nums(c.at("cumulative"))};
  }
  r.flags = j.at("flags").get<std::map<std::string, bool>>();
  return r;
}

MetricsRecord make_record(const std::string& benchmark, const std::string& model, const std::vector<double>& per_seed) {
  MetricsRecord r;
  r.benchmark = benchmark;
  r.model = model;
  r.per_seed = per_seed;
  const auto s = train::summarize(per_seed);
  r.n = s.n;
  r.mae_mean = s.mean;
  r.mae_std = s.std;
  return r;
}

RolloutCurve make_curve(const RolloutSummary& s) { return {s.time, s.per_step, s.cumulative}; }

json MetricsDocument::to_json() const {
  json recs = json::array();
  for (const auto& r : records) recs.push_back(r.to_json());
  return {{"records", recs}};
}

MetricsDocument MetricsDocument::from_json(const json& j) {
  MetricsDocument d;
  for (const auto& r : j.at("records")) d.records.push_back(MetricsRecord::from_json(r));
  return d;
}

std::string MetricsDocument::dump() const { return to_json().dump(2) + "\n"; }

void MetricsDocument::save(const fs::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write metrics document " + path.string());
  out << dump();
  if (!out) throw std::runtime_error("cannot write metrics document " + path.string());
}

MetricsDocument MetricsDocument::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read metrics document " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed metrics document " + path.string() + ": " + e.what());
  }
}

std::string format_mae(const MetricsRecord& r) {
  char buf[64];
  if (r.mae_std) std::snprintf(buf, sizeof buf, "%.4g ± %.2g", r.mae_mean, *r.mae_std);
  else std::snprintf(buf, sizeof buf, "%.4g", r.mae_mean);
  return buf;
}

std::string mae_table(const std::vector<MetricsRecord>& records) {
  std::vector<std::string> benches, models;
  for (const auto& r : records) {
    if (std::find(benches.begin(), benches.end(), r.benchmark) == benches.end()) benches.push_back(r.benchmark);
    if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
  }
  std::vector<std::vector<std::string>> cells{{"benchmark"}};
  for (const auto& m : models) cells[0].push_back(m);
  for (const auto& b : benches) {
    std::vector<std::string> row{b};
    for (const auto& m : models) {
      std::string cell = "-";
      for (const auto& r : records)
        if (r.benchmark == b && r.model == m) cell = format_mae(r) + " (n=" + std::to_string(r.n) + ")";
      row.push_back(cell);
    }
    cells.push_back(row);
  }
  // "±" is two bytes but one column
  auto width = [](const std::string& s) {
    std::size_t w = 0;
    for (unsigned char c : s) w += (c & 0xC0) != 0x80;
    return w;
  };
  std::vector<std::size_t> w(cells[0].size(), 0);
  for (const auto& row : cells)
    for (std::size_t i = 0; i < row.size(); ++i) w[i] = std::max(w[i], width(row[i]));
  std::ostringstream out;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    for (std::size_t i = 0; i < cells[k].size(); ++i) {
      out << (i ? "  " : "") << cells[k][i];
      if (i + 1 < cells[k].size()) out << std::string(w[i] - width(cells[k][i]), ' ');
    }
    out << "\n";
    if (k == 0) {
      std::size_t total = 0;
      for (auto x : w) total += x;
      out << std::string(total + 2 * (w.size() - 1), '-') << "\n";
    }
  }
  return out.str();
}

bool Report::empty() const {
  return metrics.records.empty() && decompositions.empty() && attention.empty() && error_maps.empty();
}

std::vector<fs::path> emit_report(const Report& report, const fs::path& dir) {
  if (report.empty()) throw std::invalid_argument("emit_report: nothing to report");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("emit_report: cannot create " + dir.string());
  std::vector<fs::path> written;

  if (!report.metrics.records.empty()) {
    report.metrics.save(dir / "metrics.json");
    written.push_back(dir / "metrics.json");
    bool any_seeds = false;
    for (const auto& r : report.metrics.records) any_seeds = any_seeds || r.n > 0;
    if (any_seeds) {
      std::ofstream t(dir / "mae_table.txt");
      t << mae_table(report.metrics.records);
      if (!t) throw std::runtime_error("emit_report: cannot write " + (dir / "mae_table.txt").string());
      written.push_back(dir / "mae_table.txt");
    }
  }

  // one figure per benchmark, one curve per model
  std::vector<std::string> benches;
  for (const auto& r : report.metrics.records)
    if (r.rollout_curve && std::find(benches.begin(), benches.end(), r.benchmark) == benches.end())
      benches.push_back(r.benchmark);
  for (const auto& b : benches) {
    std::vector<Series> series;
    for (const auto& r : report.metrics.records)
      if (r.benchmark == b && r.rollout_curve) series.push_back({r.model, r.rollout_curve->time, r.rollout_curve->per_step});
    PlotOptions o;
    o.title = b.ends_with("-rollout") ? b : b + " rollout";
    o.xlabel = "time";
    o.ylabel = "MAE";
    o.log_y = true;
    const auto path = dir / ("rollout_" + file_stem(b) + ".png");
    write_png(line_plot(series, o), path);
    written.push_back(path);
  }

  for (const auto& p : report.decompositions) {
    const auto path = dir / ("decomposition_" + file_stem(p.name) + ".png");
    write_png(decomposition_image(p), path);
    written.push_back(path);
  }
  for (const auto& [name, m] : report.attention) {
    const auto path = dir / ("attention_" + file_stem(name) + ".png");
    write_png(heatmap(m.diff, m.length, m.length, {m.length > 200 ? 1 : 4, name, false, 0.0, 0.0}), path);
    written.push_back(path);
  }
  for (const auto& e : report.error_maps) {
    const auto path = dir / ("error_" + file_stem(e.name) + ".png");
    write_png(error_image(e), path);
    written.push_back(path);
  }
  return written;
}

}  // namespace pitt::eval
