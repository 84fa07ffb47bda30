#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pitt/io/dataset.hpp"
#include "pitt/train/checkpoint.hpp"
#include "pitt/train/config.hpp"
#include "pitt/train/data.hpp"

namespace pitt::train {

class TrainDiverged : public std::runtime_error {
 public:
  TrainDiverged(int epoch, double last_finite);
  int epoch;
  double last_finite_loss;
};

std::unique_ptr<nn::Model> build_model(const TrainConfig& cfg, const Layout& layout, int vocab, int pad_length);

/// Tracks the epoch with the lowest validation loss (first one wins ties).
struct EarlyStopping {
  int best_epoch = 0;
  double best = std::numeric_limits<double>::infinity();
  bool update(int epoch, double val_loss) {
    if (!(val_loss < best)) return false;
    best = val_loss;
    best_epoch = epoch;
    return true;
  }
};

/// The split a configuration trains on: its split key, seed and fractions.
SplitPlan plan_for(const TrainConfig& cfg, const io::Dataset& ds);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Adam with the configured schedule; keeps the weights of the lowest validation loss.
Checkpoint train_model(const TrainConfig& cfg, const SplitPlan& plan, const io::Dataset& ds,
                       const EpochCallback& on_epoch = {});

/// Maps queries to physical-unit target fields, one [S] vector per query.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::vector<std::vector<double>> predict(const std::vector<Query>& qs) = 0;
};

struct Decomposition {
  std::vector<std::vector<double>> output, passthrough, update;
};

class ModelPredictor : public Predictor {
 public:
  ModelPredictor(const Checkpoint& ck, const io::Dataset& ds);
  std::vector<std::vector<double>> predict(const std::vector<Query>& qs) override;
  /// Physical-unit passthrough and update (update carries no mean shift).
  Decomposition decompose(const std::vector<Query>& qs);
  const nn::Model& model() const { return *model_; }

 private:
  Checkpoint ck_;
  std::unique_ptr<nn::Model> model_;
  TokenCache tokens_;
};

/// Returns the true next field; for harness checks.
class OraclePredictor : public Predictor {
 public:
  explicit OraclePredictor(const io::Dataset& ds) : ds_(ds) {}
  std::vector<std::vector<double>> predict(const std::vector<Query>& qs) override;

 private:
  const io::Dataset& ds_;
};

/// Mean absolute error over every test-partition window, in physical units.
double evaluate_mae(Predictor& p, const SplitPlan& plan, const io::Dataset& ds, Regime regime,
                    double target_time = 20.0);
double evaluate_mae(const Checkpoint& ck, const SplitPlan& plan, const io::Dataset& ds);

struct SeedSummary {
  int n = 0;
  double mean = 0.0;
  std::optional<double> std;  // absent for a single seed
};

/// Mean and population standard deviation across seeds.
SeedSummary summarize(const std::vector<double>& per_seed);

}  // namespace pitt::train
