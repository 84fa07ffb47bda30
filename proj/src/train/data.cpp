#include "pitt/train/data.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "pitt/eqtok/tokenizer.hpp"
#include "pitt/util/random.hpp"

namespace pitt::train {

using eqtok::Family;

namespace {

constexpr int kWindow1D = 10;
constexpr double kFixedFutureInputEnd = 10.0;

int frame_count(const io::Dataset& ds) { return static_cast<int>(ds.sample_shape.at(0)); }

int frame_at(const io::Dataset& ds, double t) {
  for (std::size_t i = 0; i < ds.grid_t.size(); ++i)
    if (std::abs(ds.grid_t[i] - t) < 1e-4) return static_cast<int>(i);
  throw std::invalid_argument("no stored frame at t = " + std::to_string(t));
}

}  // namespace

std::vector<std::size_t> SplitPlan::indices(Part p) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < part.size(); ++i)
    if (part[i] == p) out.push_back(i);
  return out;
}

std::array<std::size_t, 3> SplitPlan::counts() const {
  std::array<std::size_t, 3> c{0, 0, 0};
  for (auto p : part) ++c[static_cast<int>(p)];
  return c;
}

std::vector<std::int64_t> group_keys(const io::Dataset& ds, SplitKey key) {
  if (key == SplitKey::initial_condition_level && ds.family != Family::navier_stokes) {
    throw std::invalid_argument("initial_condition_level split needs shared initial conditions (Navier-Stokes only)");
  }
  if (key == SplitKey::equation_level && ds.family == Family::poisson) {
    throw std::invalid_argument("equation_level split needs equation groups; Poisson samples have none");
  }
  std::vector<std::int64_t> g(ds.count());
  for (std::size_t i = 0; i < ds.count(); ++i) {
    switch (key) {
      case SplitKey::equation_level: g[i] = ds.samples[i].equation_group; break;
      case SplitKey::initial_condition_level: g[i] = ds.samples[i].init_group; break;
      case SplitKey::random: g[i] = static_cast<std::int64_t>(i); break;
    }
  }
  return g;
}

SplitPlan split_dataset(const io::Dataset& ds, SplitKey key, std::uint64_t seed, double train_fraction,
                        double val_fraction) {
  if (ds.count() == 0) throw std::invalid_argument("split_dataset: empty dataset");
  const auto keys = group_keys(ds, key);
  std::vector<std::int64_t> groups(std::set<std::int64_t>(keys.begin(), keys.end()).size());
  {
    std::set<std::int64_t> s(keys.begin(), keys.end());
    std::copy(s.begin(), s.end(), groups.begin());
  }
  Rng rng(seed);
  rng.shuffle(groups);
  const auto G = static_cast<double>(groups.size());
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * G));
  const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * G));
  if (n_train + n_val >= groups.size()) throw std::invalid_argument("split_dataset: too few groups for a test partition");
  std::map<std::int64_t, Part> assign;
  for (std::size_t i = 0; i < groups.size(); ++i)
    assign[groups[i]] = i < n_train ? Part::train : (i < n_train + n_val ? Part::val : Part::test);
  SplitPlan plan;
  plan.key = key;
  plan.seed = seed;
  plan.part.resize(ds.count());
  for (std::size_t i = 0; i < ds.count(); ++i) plan.part[i] = assign.at(keys[i]);
  return plan;
}

bool leakage_free(const io::Dataset& ds, const SplitPlan& plan) {
  const auto keys = group_keys(ds, plan.key);
  std::map<std::int64_t, Part> seen;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    auto [it, fresh] = seen.emplace(keys[i], plan.part[i]);
    if (!fresh && it->second != plan.part[i]) return false;
  }
  return true;
}

std::int64_t Layout::points() const {
  std::int64_t n = 1;
  for (int g : grid) n *= g;
  return n;
}

void check_regime(const io::Dataset& ds, Regime regime) {
  bool ok = false;
  switch (regime) {
    case Regime::next_step_1d: ok = eqtok::is_1d(ds.family); break;
    case Regime::next_step_2d:
    case Regime::fixed_future: ok = ds.family == Family::navier_stokes; break;
    case Regime::steady_state: ok = ds.family == Family::poisson; break;
  }
  if (!ok) {
    throw std::invalid_argument("regime " + to_string(regime) + " does not match a " +
                                std::string(eqtok::family_name(ds.family)) + " container");
  }
}

Layout regime_layout(const io::Dataset& ds, Regime regime) {
  check_regime(ds, regime);
  Layout l;
  const auto& s = ds.sample_shape;
  switch (regime) {
    case Regime::next_step_1d: l.grid = {static_cast<int>(s.at(1))}; l.in_channels = kWindow1D; break;
    case Regime::next_step_2d: l.grid = {static_cast<int>(s.at(1)), static_cast<int>(s.at(2))}; break;
    case Regime::fixed_future:
      l.grid = {static_cast<int>(s.at(1)), static_cast<int>(s.at(2))};
      l.in_channels = frame_at(ds, kFixedFutureInputEnd) + 1;
      break;
    case Regime::steady_state: l.grid = {static_cast<int>(s.at(0)), static_cast<int>(s.at(1))}; break;
  }
  return l;
}

std::size_t windows_per_sample(const io::Dataset& ds, Regime regime, double target_time) {
  check_regime(ds, regime);
  const int F = regime == Regime::steady_state ? 1 : frame_count(ds);
  switch (regime) {
    case Regime::next_step_1d:
      // targets n = 10 .. F-2: 90 windows for the 101-frame trajectories
      if (F < kWindow1D + 2) throw std::invalid_argument("trajectory shorter than a 10-frame window plus target");
      return static_cast<std::size_t>(F - kWindow1D - 1);
    case Regime::next_step_2d:
      if (F < 2) throw std::invalid_argument("trajectory shorter than one next-step pair");
      return static_cast<std::size_t>(F - 1);
    case Regime::fixed_future: {
      const int last_in = frame_at(ds, kFixedFutureInputEnd);
      if (frame_at(ds, target_time) <= last_in) throw std::invalid_argument("fixed-future target inside the input block");
      return 1;
    }
    case Regime::steady_state: return 1;
  }
  return 0;
}

std::vector<Window> make_windows(const io::Dataset& ds, Regime regime, std::span<const std::size_t> samples,
                                 double target_time) {
  const auto per = windows_per_sample(ds, regime, target_time);
  std::vector<Window> out;
  out.reserve(per * samples.size());
  for (auto s : samples) {
    if (s >= ds.count()) throw std::out_of_range("make_windows: sample index");
    switch (regime) {
      case Regime::next_step_1d:
        for (std::size_t k = 0; k < per; ++k) {
          const int n = kWindow1D + static_cast<int>(k);
          out.push_back({s, n - kWindow1D, kWindow1D, n});
        }
        break;
      case Regime::next_step_2d:
        for (std::size_t k = 0; k < per; ++k) out.push_back({s, static_cast<int>(k), 1, static_cast<int>(k) + 1});
        break;
      case Regime::fixed_future: {
        const int last_in = frame_at(ds, kFixedFutureInputEnd);
        out.push_back({s, 0, last_in + 1, frame_at(ds, target_time)});
        break;
      }
      case Regime::steady_state: out.push_back({s, 0, 1, 0}); break;
    }
  }
  return out;
}

double window_target_time(const io::Dataset& ds, Regime regime, const Window& w, double target_time) {
  switch (regime) {
    case Regime::fixed_future: return target_time;
    case Regime::steady_state: return ds.samples.at(w.sample).spec.target_time;
    default: return ds.grid_t.at(static_cast<std::size_t>(w.target));
  }
}

double window_dt(const io::Dataset& ds, Regime regime, const Window& w, double target_time) {
  if (regime == Regime::steady_state) return 1.0;
  const auto last = static_cast<std::size_t>(w.first + w.frames - 1);
  return window_target_time(ds, regime, w, target_time) - ds.grid_t.at(last);
}

Query make_query(const io::Dataset& ds, Regime regime, const Window& w, double target_time) {
  Query q;
  q.sample = w.sample;
  q.target = w.target;
  q.target_time = window_target_time(ds, regime, w, target_time);
  q.dt = window_dt(ds, regime, w, target_time);
  if (regime == Regime::steady_state) {
    const auto in = ds.input_field(w.sample);
    q.fields.assign(in.begin(), in.end());
    return q;
  }
  const auto f = ds.field(w.sample);
  std::size_t S = 1;
  for (std::size_t d = 1; d < ds.sample_shape.size(); ++d) S *= static_cast<std::size_t>(ds.sample_shape[d]);
  const auto C = static_cast<std::size_t>(w.frames);
  q.fields.resize(S * C);
  for (std::size_t c = 0; c < C; ++c) {
    const float* src = f.data() + (static_cast<std::size_t>(w.first) + c) * S;
    for (std::size_t s = 0; s < S; ++s) q.fields[s * C + c] = src[s];
  }
  return q;
}

std::vector<double> window_target(const io::Dataset& ds, const Window& w) {
  const auto f = ds.field(w.sample);
  if (ds.steady()) return {f.begin(), f.end()};
  std::size_t S = 1;
  for (std::size_t d = 1; d < ds.sample_shape.size(); ++d) S *= static_cast<std::size_t>(ds.sample_shape[d]);
  const float* src = f.data() + static_cast<std::size_t>(w.target) * S;
  return {src, src + S};
}

TokenCache::TokenCache(const io::Dataset& ds)
    : ds_(ds), vocab_(static_cast<int>(eqtok::build_vocabulary().size())) {}

std::vector<std::int32_t> TokenCache::ids(std::size_t sample, double target_time) const {
  const auto& meta = ds_.samples.at(sample);
  if (ds_.steady() || meta.spec.target_time == target_time) {
    const auto t = ds_.token_ids(sample);
    return {t.begin(), t.end()};
  }
  auto spec = meta.spec;
  spec.target_time = target_time;
  return eqtok::tokenize_equation(spec, ds_.pad_length).ids;
}

const std::vector<double>& TokenCache::counts(std::size_t sample, double target_time) {
  const auto key = std::make_pair(sample, target_time);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const auto row = nn::token_counts(ids(sample, target_time), vocab_);
  return cache_.emplace(key, row.data).first->second;
}

namespace {

std::pair<double, double> moments(const io::Dataset& ds, std::span<const std::size_t> samples, bool input) {
  double sum = 0.0, sq = 0.0, n = 0.0;
  for (auto i : samples) {
    const auto f = input ? ds.input_field(i) : ds.field(i);
    for (float v : f) {
      sum += v;
      sq += static_cast<double>(v) * v;
    }
    n += static_cast<double>(f.size());
  }
  if (n == 0.0) throw std::invalid_argument("Normalizer::fit: no training samples");
  const double mean = sum / n;
  const double var = std::max(0.0, sq / n - mean * mean);
  const double sd = std::sqrt(var);
  return {mean, sd > 1e-12 ? sd : 1.0};
}

}  // namespace

Normalizer Normalizer::fit(const io::Dataset& ds, std::span<const std::size_t> train_samples) {
  Normalizer n;
  std::tie(n.out_mean, n.out_std) = moments(ds, train_samples, false);
  if (ds.steady()) {
    std::tie(n.in_mean, n.in_std) = moments(ds, train_samples, true);
  } else {
    n.in_mean = n.out_mean;
    n.in_std = n.out_std;
  }
  return n;
}

nlohmann::json Normalizer::to_json() const {
  return {{"in_mean", in_mean}, {"in_std", in_std}, {"out_mean", out_mean}, {"out_std", out_std}};
}

Normalizer Normalizer::from_json(const nlohmann::json& j) {
  Normalizer n;
  n.in_mean = j.at("in_mean").get<double>();
  n.in_std = j.at("in_std").get<double>();
  n.out_mean = j.at("out_mean").get<double>();
  n.out_std = j.at("out_std").get<double>();
  return n;
}

nn::ModelInput make_batch(const std::vector<Query>& qs, const Layout& layout, const Normalizer& norm,
                          TokenCache* tokens) {
  const auto B = static_cast<std::int64_t>(qs.size());
  const auto S = layout.points();
  const auto C = static_cast<std::int64_t>(layout.in_channels);
  nn::ModelInput in;
  in.grid = layout.grid;
  in.coords = nn::grid_coords(layout.grid);
  in.fields = nn::Tensor({B, S, C});
  in.dt = nn::Tensor({B});
  for (std::int64_t b = 0; b < B; ++b) {
    const auto& q = qs[static_cast<std::size_t>(b)];
    if (static_cast<std::int64_t>(q.fields.size()) != S * C) throw std::invalid_argument("make_batch: field size");
    double* dst = in.fields.ptr() + b * S * C;
    for (std::int64_t i = 0; i < S * C; ++i) dst[i] = (q.fields[static_cast<std::size_t>(i)] - norm.in_mean) / norm.in_std;
    in.dt.data[static_cast<std::size_t>(b)] = q.dt;
  }
  if (tokens) {
    const int V = tokens->vocab();
    in.counts = nn::Tensor({B, V});
    for (std::int64_t b = 0; b < B; ++b) {
      const auto& q = qs[static_cast<std::size_t>(b)];
      const auto& row = tokens->counts(q.sample, q.target_time);
      std::copy(row.begin(), row.end(), in.counts.data.begin() + b * V);
    }
  }
  return in;
}

}  // namespace pitt::train
