#include "pitt/eval/rollout.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pitt::eval {

namespace {

struct Live {
  std::size_t index;                        // into the results
  std::vector<std::vector<double>> frames;  // the current input window, oldest first
};

std::size_t points(const io::Dataset& ds) {
  std::size_t S = 1;
  for (std::size_t d = 1; d < ds.sample_shape.size(); ++d) S *= static_cast<std::size_t>(ds.sample_shape[d]);
  return S;
}

}  // namespace

int rollout_seed_frames(train::Regime regime) {
  switch (regime) {
    case train::Regime::next_step_1d: return 10;
    case train::Regime::next_step_2d: return 1;
    default: throw std::invalid_argument("rollout: regime " + train::to_string(regime) + " is not autoregressive");
  }
}

std::vector<RolloutResult> rollout(train::Predictor& p, const io::Dataset& ds, std::span<const std::size_t> samples,
                                   train::Regime regime, bool keep_fields, std::size_t batch) {
  train::check_regime(ds, regime);
  const int k = rollout_seed_frames(regime);
  const int frames = static_cast<int>(ds.sample_shape.at(0));
  if (frames <= k) throw std::invalid_argument("rollout: trajectories too short to roll out");
  if (batch == 0) batch = 1;
  const std::size_t S = points(ds);

  std::vector<RolloutResult> results(samples.size());
  std::vector<Live> live;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] >= ds.count()) throw std::out_of_range("rollout: sample index");
    results[i].sample = samples[i];
    const auto f = ds.field(samples[i]);
    Live l{i, {}};
    for (int c = 0; c < k; ++c) l.frames.emplace_back(f.begin() + c * S, f.begin() + (c + 1) * S);
    live.push_back(std::move(l));
  }

  for (int target = k; target < frames && !live.empty(); ++target) {
    const double t = ds.grid_t.at(static_cast<std::size_t>(target));
    const double dt = t - ds.grid_t.at(static_cast<std::size_t>(target - 1));
    std::vector<Live> next;
    for (std::size_t b0 = 0; b0 < live.size(); b0 += batch) {
      const std::size_t b1 = std::min(live.size(), b0 + batch);
      std::vector<train::Query> qs;
      for (std::size_t b = b0; b < b1; ++b) {
        train::Query q;
        q.sample = results[live[b].index].sample;
        q.target = target;
        q.target_time = t;
        q.dt = dt;
        q.fields.resize(S * static_cast<std::size_t>(k));
        for (int c = 0; c < k; ++c)
          for (std::size_t s = 0; s < S; ++s)
            q.fields[s * static_cast<std::size_t>(k) + static_cast<std::size_t>(c)] = live[b].frames[static_cast<std::size_t>(c)][s];
        qs.push_back(std::move(q));
      }
      auto pred = p.predict(qs);
      for (std::size_t b = b0; b < b1; ++b) {
        Live& l = live[b];
        RolloutResult& r = results[l.index];
        auto& u = pred[b - b0];
        if (u.size() != S) throw std::runtime_error("rollout: predictor returned a field of the wrong size");
        bool ok = true;
        for (double v : u) ok = ok && std::isfinite(v) && std::abs(v) <= kBlowupMagnitude;
        if (!ok) {
          r.blew_up = true;
          r.blowup_step = static_cast<int>(r.error.size());
          continue;
        }
        const auto f = ds.field(r.sample);
        const float* truth = f.data() + static_cast<std::size_t>(target) * S;
        double err = 0.0;
        for (std::size_t s = 0; s < S; ++s) err += std::abs(u[s] - static_cast<double>(truth[s]));
        err /= static_cast<double>(S);
        const double prev = r.cumulative.empty() ? 0.0 : r.cumulative.back() * static_cast<double>(r.error.size());
        r.time.push_back(t);
        r.error.push_back(err);
        r.cumulative.push_back((prev + err) / static_cast<double>(r.error.size()));
        if (keep_fields) {
          r.truth.emplace_back(truth, truth + S);
          r.predicted.push_back(u);
        }
        l.frames.erase(l.frames.begin());
        l.frames.push_back(std::move(u));
        next.push_back(std::move(l));
      }
    }
    live = std::move(next);
  }
  return results;
}

RolloutResult rollout(train::Predictor& p, const io::Dataset& ds, std::size_t sample, train::Regime regime,
                      bool keep_fields) {
  const std::size_t one[] = {sample};
  return std::move(rollout(p, ds, one, regime, keep_fields).front());
}

double RolloutSummary::final_error() const {
  return per_step.empty() ? std::numeric_limits<double>::quiet_NaN() : per_step.back();
}

RolloutSummary summarize_rollouts(const std::vector<RolloutResult>& results) {
  RolloutSummary out;
  if (results.empty()) return out;
  // the longest curve defines the time axis
  const RolloutResult* ref = &results.front();
  for (const auto& r : results) {
    if (r.steps() > ref->steps()) ref = &r;
    out.blowups += r.blew_up ? 1 : 0;
  }
  const std::size_t steps = ref->steps();
  out.trajectories = static_cast<int>(results.size());
  out.time = ref->time;
  out.per_step.assign(steps, 0.0);
  out.cumulative.assign(steps, 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& r : results)
    for (std::size_t j = 0; j < steps; ++j) {
      const bool have = j < r.steps();
      out.per_step[j] += have ? r.error[j] : inf;
      out.cumulative[j] += have ? r.cumulative[j] : inf;
    }
  for (std::size_t j = 0; j < steps; ++j) {
    out.per_step[j] /= static_cast<double>(results.size());
    out.cumulative[j] /= static_cast<double>(results.size());
  }
  return out;
}

}  // namespace pitt::eval
