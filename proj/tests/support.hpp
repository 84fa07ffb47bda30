#pragma once
// Independent oracles and samplers shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "pitt/eqtok/tokenizer.hpp"
#include "pitt/nn/models.hpp"
#include "pitt/nn/ops.hpp"

namespace pitt::testing {

inline nn::Tensor random_tensor(nn::Shape s, Rng& rng, double scale = 1.0) {
  nn::Tensor t(std::move(s));
  for (auto& x : t.data) x = scale * rng.uniform(-1.0, 1.0);
  return t;
}

/// Infinite on a size mismatch.
inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Relative error between the analytic gradient of `p` and central differences of `loss`.
inline double gradient_error(nn::Var p, const std::function<double()>& loss, double eps = 1e-6) {
  std::vector<double> analytic = p.grad();
  auto& vals = p.mutable_value().data;
  if (analytic.empty()) analytic.assign(vals.size(), 0.0);
  double diff = 0.0, na = 0.0, nf = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double save = vals[i];
    vals[i] = save + eps;
    const double lp = loss();
    vals[i] = save - eps;
    const double lm = loss();
    vals[i] = save;
    const double fd = (lp - lm) / (2.0 * eps);
    diff += (fd - analytic[i]) * (fd - analytic[i]);
    na += analytic[i] * analytic[i];
    nf += fd * fd;
  }
  const double denom = std::max({std::sqrt(na), std::sqrt(nf), 1e-10});
  return std::sqrt(diff) / denom;
}

// Naive triple-loop linear attention.
inline nn::Tensor la_oracle(const nn::Tensor& q, const nn::Tensor& k, const nn::Tensor& v) {
  const auto n = q.dim(0), d = q.dim(1), dv = v.dim(1);
  auto normalize = [n](const nn::Tensor& t) {
    nn::Tensor out = t;
    const auto w = t.dim(1);
    for (std::int64_t c = 0; c < w; ++c) {
      double mean = 0.0;
      for (std::int64_t i = 0; i < n; ++i) mean += t.data[i * w + c];
      mean /= n;
      double var = 0.0;
      for (std::int64_t i = 0; i < n; ++i) var += (t.data[i * w + c] - mean) * (t.data[i * w + c] - mean);
      var /= n;
      for (std::int64_t i = 0; i < n; ++i) out.data[i * w + c] = (t.data[i * w + c] - mean) / std::sqrt(var + nn::kNormEps);
    }
    return out;
  };
  const nn::Tensor kt = normalize(k), vt = normalize(v);
  nn::Tensor z({n, dv});
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < dv; ++j) {
      double acc = 0.0;
      for (std::int64_t a = 0; a < d; ++a)
        for (std::int64_t m = 0; m < n; ++m) acc += q.data[i * d + a] * kt.data[m * d + a] * vt.data[m * dv + j];
      z.data[i * dv + j] = acc / n;
    }
  return z;
}

inline std::vector<std::int32_t> random_ids(Rng& rng, int length, int used, int vocab) {
  std::vector<std::int32_t> ids(static_cast<std::size_t>(length), 0);
  for (int i = 0; i < used; ++i) ids[static_cast<std::size_t>(i)] = rng.integer(1, vocab - 1);
  return ids;
}

inline nn::PittConfig toy_pitt(int layers, int pad) {
  nn::PittConfig c;
  c.backbone.in_channels = 3;
  c.backbone.width = 6;
  c.backbone.modes = {4};
  c.backbone.proj_width = 8;
  c.hidden = 6;
  c.heads = 2;
  c.layers = layers;
  c.pad_length = pad;
  return c;
}

inline nn::ModelInput toy_input(Rng& rng, const nn::PittConfig& c, int batch, int points, int used_tokens) {
  nn::ModelInput in;
  in.grid = {points};
  in.coords = nn::grid_coords(in.grid);
  in.fields = random_tensor({batch, points, c.backbone.in_channels}, rng);
  in.counts = nn::Tensor({batch, c.vocab});
  for (int b = 0; b < batch; ++b) {
    const auto row = nn::token_counts(random_ids(rng, c.pad_length, used_tokens, c.vocab), c.vocab);
    std::copy(row.data.begin(), row.data.end(), in.counts.data.begin() + b * c.vocab);
  }
  in.dt = nn::Tensor({batch});
  for (auto& t : in.dt.data) t = rng.uniform(0.0, 0.5);
  return in;
}

// Spec generator for the property tests (does not use the data pipelines).
inline eqtok::EquationSpec random_spec(std::mt19937_64& rng) {
  using namespace eqtok;
  std::uniform_int_distribution<int> pick_family(0, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EquationSpec s;
  s.family = static_cast<Family>(pick_family(rng));
  if (is_1d(s.family)) {
    ForcingParams p = ForcingParams::zero();
    for (int j = 0; j < p.terms; ++j) {
      p.amplitude[j] = -0.25 + 0.5 * unit(rng);
      p.omega[j] = -0.4 + 0.8 * unit(rng);
      p.wavenumber[j] = 1 + static_cast<int>(unit(rng) * 3.0) % 3;
      p.phase[j] = 2.0 * std::numbers::pi * unit(rng) * 0.999999;
    }
    s.forcing = p;
    const double grid[] = {0.01, 0.05, 0.1, 0.2, 0.5, 1.0};
    if (s.family == Family::heat) s.beta = grid[rng() % 6];
    if (s.family == Family::burgers) s.alpha = grid[rng() % 6], s.beta = grid[rng() % 6];
    if (s.family == Family::kdv) s.alpha = 0.01, s.gamma = 2.0 * static_cast<double>(1 + rng() % 6);
    s.target_time = 4.0 * unit(rng);
  } else if (s.family == Family::navier_stokes) {
    s.nu = static_cast<double>(1 + rng() % 9) * std::pow(10.0, -9.0 + static_cast<double>(rng() % 5));
    s.amp = 0.001 * static_cast<double>(1 + rng() % 10);
    s.target_time = 0.25 * static_cast<double>(rng() % 121);
  } else {
    for (auto& e : s.edges) {
      e.kind = (rng() % 2) ? BoundaryKind::neumann : BoundaryKind::dirichlet;
      e.value = -0.5 + unit(rng);
    }
    for (int i = 0; i < 2; ++i) {
      s.plates.push_back({static_cast<int>(5 + rng() % 50), static_cast<int>(5 + rng() % 50),
                          static_cast<int>(10 + rng() % 31), -1.0 + 2.0 * unit(rng)});
    }
    s.target_time = kPoissonSentinelTime;
  }
  return s;
}

}  // namespace pitt::testing
