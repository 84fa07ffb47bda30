#include "pitt/train/optim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pitt::train {

Adam::Adam(nn::ParamStore& params, double lr, double weight_decay, double beta1, double beta2, double eps)
    : params_(params), lr_(lr), wd_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& [name, p] : params_.items()) {
    m_.emplace_back(p.value().data.size(), 0.0);
    v_.emplace_back(p.value().data.size(), 0.0);
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const double step_size = lr_ / bc1;
  const double sqrt_bc2 = std::sqrt(bc2);
  std::size_t k = 0;
  for (auto [name, p] : params_.items()) {
    auto& w = p.mutable_value().data;
    const auto& g = p.grad();
    auto& m = m_[k];
    auto& v = v_[k];
    ++k;
    if (g.empty()) continue;  // parameter not reached by this loss
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g[i] + wd_ * w[i];
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * gi;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * gi * gi;
      w[i] -= step_size * m[i] / (std::sqrt(v[i]) / sqrt_bc2 + eps_);
    }
  }
}

namespace {

double cos_anneal(double start, double end, double pct) {
  return end + (start - end) / 2.0 * (std::cos(std::numbers::pi * pct) + 1.0);
}

// Position inside the phase containing `step`: (phase index, fraction).
std::pair<int, double> phase_of(std::int64_t step, std::int64_t total, double pct_start) {
  if (total < 1) throw std::invalid_argument("OneCycle: total_steps must be positive");
  if (step < 0 || step >= total) throw std::out_of_range("OneCycle: step outside the schedule");
  const double end0 = pct_start * static_cast<double>(total) - 1.0;
  const double end1 = static_cast<double>(total) - 1.0;
  const double s = static_cast<double>(step);
  if (s <= end0) return {0, end0 > 0.0 ? s / end0 : 1.0};
  const double span = end1 - end0;
  return {1, span > 0.0 ? (s - end0) / span : 1.0};
}

}  // namespace

double OneCycle::lr(std::int64_t step) const {
  const double initial = max_lr / div_factor;
  const double min_lr = initial / final_div_factor;
  auto [phase, pct] = phase_of(step, total_steps, pct_start);
  return phase == 0 ? cos_anneal(initial, max_lr, pct) : cos_anneal(max_lr, min_lr, pct);
}

double OneCycle::momentum(std::int64_t step) const {
  auto [phase, pct] = phase_of(step, total_steps, pct_start);
  return phase == 0 ? cos_anneal(max_momentum, base_momentum, pct) : cos_anneal(base_momentum, max_momentum, pct);
}

double step_lr(double base_lr, int epoch, int step, double gamma) {
  if (step < 1) throw std::invalid_argument("step_lr: step must be positive");
  return base_lr * std::pow(gamma, static_cast<double>(epoch / step));
}

}  // namespace pitt::train
