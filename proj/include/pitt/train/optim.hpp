#pragma once

#include <cstdint>
#include <vector>

#include "pitt/nn/params.hpp"

namespace pitt::train {

/// Adam with L2 weight decay folded into the gradient (the classic, non-decoupled form).
class Adam {
 public:
  Adam(nn::ParamStore& params, double lr, double weight_decay, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);

  void step();
  void set_lr(double lr) { lr_ = lr; }
  void set_beta1(double b) { beta1_ = b; }
  double lr() const { return lr_; }
  std::int64_t steps() const { return t_; }

  // Moment buffers in parameter order, for checkpoints.
  std::vector<std::vector<double>>& first_moments() { return m_; }
  std::vector<std::vector<double>>& second_moments() { return v_; }
  void set_steps(std::int64_t t) { t_ = t; }

 private:
  nn::ParamStore& params_;
  double lr_, wd_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

/// One-cycle policy: cosine warm-up from max_lr/div to max_lr over pct of the steps, then
/// cosine decay to max_lr/(div*final_div); beta1 cycles inversely between the two momenta.
struct OneCycle {
  double max_lr = 1e-3;
  std::int64_t total_steps = 1;
  double pct_start = 0.3;
  double div_factor = 25.0;
  double final_div_factor = 1e4;
  double base_momentum = 0.85;
  double max_momentum = 0.95;

  double lr(std::int64_t step) const;
  double momentum(std::int64_t step) const;
};

/// lr * gamma^floor(epoch / step), epochs counted from 0.
double step_lr(double base_lr, int epoch, int step, double gamma);

}  // namespace pitt::train
