#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pitt/eval/probe.hpp"
#include "pitt/eval/rollout.hpp"

namespace pitt::eval {

struct RolloutCurve {
  std::vector<double> time, per_step, cumulative;
  bool operator==(const RolloutCurve&) const = default;
};

/// One (benchmark, model) row of the metrics document.
struct MetricsRecord {
  std::string benchmark, model;
  int n = 0;                      // seeds
  double mae_mean = 0.0;
  std::optional<double> mae_std;  // absent for a single seed
  std::vector<double> per_seed;
  std::optional<RolloutCurve> rollout_curve;
  std::map<std::string, bool> flags;

  nlohmann::json to_json() const;
  static MetricsRecord from_json(const nlohmann::json& j);
  bool operator==(const MetricsRecord&) const = default;
};

/// Fills n, mean and std from per-seed test MAEs.
MetricsRecord make_record(const std::string& benchmark, const std::string& model, const std::vector<double>& per_seed);
RolloutCurve make_curve(const RolloutSummary& s);

struct MetricsDocument {
  std::vector<MetricsRecord> records;

  nlohmann::json to_json() const;
  static MetricsDocument from_json(const nlohmann::json& j);
  /// Stable text form: fixed key order, two-space indent, trailing newline.
  std::string dump() const;
  void save(const std::filesystem::path& path) const;
  static MetricsDocument load(const std::filesystem::path& path);
  bool operator==(const MetricsDocument&) const = default;
};

/// "mean ± std", or just the mean for one seed.
std::string format_mae(const MetricsRecord& r);
/// Benchmarks as rows, models as columns.
std::string mae_table(const std::vector<MetricsRecord>& records);

/// Physical-unit fields of one prediction on `grid` (one entry for 1D, [ny, nx] for 2D).
struct DecompositionPanel {
  std::string name;
  std::vector<int> grid;
  std::vector<double> truth, passthrough, update, output;
};

struct ErrorMap {
  std::string name;
  std::vector<int> grid;
  std::vector<double> prediction, truth;
};

struct Report {
  MetricsDocument metrics;
  std::vector<DecompositionPanel> decompositions;
  std::vector<std::pair<std::string, AttentionDiffMap>> attention;
  std::vector<ErrorMap> error_maps;

  bool empty() const;
};

/// Writes metrics.json, mae_table.txt (when any record has seeds), one rollout figure per
/// benchmark with curves, and one image per panel, attention map and error map.
/// Returns the written paths. Throws std::invalid_argument for an empty report and
/// std::runtime_error when `dir` cannot be written.
std::vector<std::filesystem::path> emit_report(const Report& report, const std::filesystem::path& dir);

}  // namespace pitt::eval
