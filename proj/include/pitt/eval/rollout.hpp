#pragma once

#include <span>
#include <vector>

#include "pitt/io/dataset.hpp"
#include "pitt/train/trainer.hpp"

namespace pitt::eval {

/// Any predicted magnitude above this counts as a blow-up.
inline constexpr double kBlowupMagnitude = 1e6;

struct RolloutResult {
  std::size_t sample = 0;
  std::vector<double> time;        // time of each predicted frame
  std::vector<double> error;       // MAE at each step
  std::vector<double> cumulative;  // running mean of `error`
  std::vector<std::vector<double>> predicted, truth;  // [steps][S], empty unless requested
  bool blew_up = false;
  int blowup_step = -1;  // step whose prediction was non-finite or too large

  std::size_t steps() const { return error.size(); }
};

/// Number of seed frames and the first predicted frame index.
int rollout_seed_frames(train::Regime regime);

/// Autoregressive rollout of several trajectories in lockstep. 1D: frames 0-9 seed the
/// window and every later frame is predicted; NS: frame 0 seeds and every later frame is
/// predicted. Each query carries the target time of its step.
std::vector<RolloutResult> rollout(train::Predictor& p, const io::Dataset& ds, std::span<const std::size_t> samples,
                                   train::Regime regime, bool keep_fields = false, std::size_t batch = 16);
RolloutResult rollout(train::Predictor& p, const io::Dataset& ds, std::size_t sample, train::Regime regime,
                      bool keep_fields = true);

/// Curves averaged over trajectories. A blow-up makes every later entry infinite.
struct RolloutSummary {
  std::vector<double> time, per_step, cumulative;
  int trajectories = 0;
  int blowups = 0;
  double final_error() const;  // per-step MAE at the last time
};

RolloutSummary summarize_rollouts(const std::vector<RolloutResult>& results);

}  // namespace pitt::eval
