#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pitt/io/dataset.hpp"
#include "pitt/nn/models.hpp"
#include "pitt/train/config.hpp"

namespace pitt::train {

enum class Part : std::uint8_t { train = 0, val = 1, test = 2 };

struct SplitPlan {
  SplitKey key = SplitKey::random;
  std::uint64_t seed = 0;
  std::vector<Part> part;  // per sample

  std::vector<std::size_t> indices(Part p) const;
  std::array<std::size_t, 3> counts() const;
};

/// Grouping key per sample: samples with equal keys always land in one partition.
std::vector<std::int64_t> group_keys(const io::Dataset& ds, SplitKey key);

/// Shuffles groups with `seed` and assigns round(train * G) groups to train,
/// round(val * G) to validation and the rest to test.
SplitPlan split_dataset(const io::Dataset& ds, SplitKey key, std::uint64_t seed, double train_fraction = 0.6,
                        double val_fraction = 0.2);

/// True when no group key appears in more than one partition.
bool leakage_free(const io::Dataset& ds, const SplitPlan& plan);

/// One supervised pair. Input frames [first, first + frames), target frame `target`.
struct Window {
  std::size_t sample = 0;
  int first = 0;
  int frames = 1;
  int target = 0;
};

struct Layout {
  std::vector<int> grid;  // spatial dims of one field
  int in_channels = 1;
  std::int64_t points() const;
};

Layout regime_layout(const io::Dataset& ds, Regime regime);
void check_regime(const io::Dataset& ds, Regime regime);
std::vector<Window> make_windows(const io::Dataset& ds, Regime regime, std::span<const std::size_t> samples,
                                 double target_time = 20.0);
/// Closed-form window count per sample.
std::size_t windows_per_sample(const io::Dataset& ds, Regime regime, double target_time = 20.0);

/// Everything a predictor sees for one window, in physical units.
struct Query {
  std::size_t sample = 0;
  int target = 0;              // target frame index in the stored trajectory
  double target_time = 0.0;    // absolute time written into the tokens
  double dt = 0.0;             // time differential from the last input frame
  std::vector<double> fields;  // [S, Cin]
};

double window_target_time(const io::Dataset& ds, Regime regime, const Window& w, double target_time);
double window_dt(const io::Dataset& ds, Regime regime, const Window& w, double target_time);
Query make_query(const io::Dataset& ds, Regime regime, const Window& w, double target_time);
std::vector<double> window_target(const io::Dataset& ds, const Window& w);

/// Token ids of a sample's spec with the target time replaced, cached per (sample, time).
class TokenCache {
 public:
  explicit TokenCache(const io::Dataset& ds);
  const std::vector<double>& counts(std::size_t sample, double target_time);
  std::vector<std::int32_t> ids(std::size_t sample, double target_time) const;
  int vocab() const { return vocab_; }

 private:
  const io::Dataset& ds_;
  int vocab_;
  std::map<std::pair<std::size_t, double>, std::vector<double>> cache_;
};

/// Field standardization from training-partition statistics.
struct Normalizer {
  double in_mean = 0.0, in_std = 1.0;
  double out_mean = 0.0, out_std = 1.0;

  static Normalizer fit(const io::Dataset& ds, std::span<const std::size_t> train_samples);
  nlohmann::json to_json() const;
  static Normalizer from_json(const nlohmann::json& j);
};

/// Standardized model input for a batch of queries.
nn::ModelInput make_batch(const std::vector<Query>& qs, const Layout& layout, const Normalizer& norm,
                          TokenCache* tokens);

}  // namespace pitt::train
