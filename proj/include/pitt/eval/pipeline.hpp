#pragma once

#include <string>
#include <vector>

#include "pitt/eval/report.hpp"
#include "pitt/train/checkpoint.hpp"

namespace pitt::eval {

/// Throws std::invalid_argument when the checkpoint was trained on another container or
/// its regime does not fit the dataset.
void check_compatible(const train::Checkpoint& ck, const io::Dataset& ds);

/// Test MAE of every checkpoint (one per seed, each on its own split). All checkpoints must
/// share a model kind and benchmark.
MetricsRecord evaluate_checkpoints(const std::vector<train::Checkpoint>& cks, const io::Dataset& ds);

/// Rolls out every test trajectory of each checkpoint's split. per_seed holds the seed's
/// mean per-step MAE at the final time; the curve is the seed average. The record's
/// benchmark gets a "-rollout" suffix and flags.blowup is set when any trajectory blew up.
MetricsRecord rollout_checkpoints(const std::vector<train::Checkpoint>& cks, const io::Dataset& ds);

/// Passthrough / update / sum for the first test window of the checkpoint's split.
DecompositionPanel decomposition_panel(const train::Checkpoint& ck, const io::Dataset& ds);

/// Prediction and truth for the first test sample (steady-state checkpoints).
ErrorMap error_map(const train::Checkpoint& ck, const io::Dataset& ds);

}  // namespace pitt::eval
