#include "pitt/eval/pipeline.hpp"

#include <stdexcept>

#include "pitt/train/manifest.hpp"
#include "pitt/train/trainer.hpp"

namespace pitt::eval {

namespace {

void check_same_run(const std::vector<train::Checkpoint>& cks) {
  if (cks.empty()) throw std::invalid_argument("no checkpoints given");
  for (const auto& c : cks)
    if (c.kind != cks[0].kind || train::benchmark_name(c.config) != train::benchmark_name(cks[0].config))
      throw std::invalid_argument("checkpoints mix models or benchmarks (" + c.kind + " " +
                                  train::benchmark_name(c.config) + " vs " + cks[0].kind + " " +
                                  train::benchmark_name(cks[0].config) + ")");
}

train::Query first_test_query(const train::Checkpoint& ck, const io::Dataset& ds) {
  const auto plan = train::plan_for(ck.config, ds);
  const auto test = plan.indices(train::Part::test);
  if (test.empty()) throw std::invalid_argument("checkpoint split has an empty test partition");
  const auto ws = train::make_windows(ds, ck.config.regime, std::span(test.data(), 1), ck.config.target_time);
  return train::make_query(ds, ck.config.regime, ws.front(), ck.config.target_time);
}

}  // namespace

void check_compatible(const train::Checkpoint& ck, const io::Dataset& ds) {
  train::check_regime(ds, ck.config.regime);
  if (ck.dataset_hash != ds.content_hash())
    throw std::invalid_argument("checkpoint was trained on a different dataset (hash " + ck.dataset_hash + ")");
}

MetricsRecord evaluate_checkpoints(const std::vector<train::Checkpoint>& cks, const io::Dataset& ds) {
  check_same_run(cks);
  std::vector<double> per_seed;
  for (const auto& ck : cks) {
    check_compatible(ck, ds);
    per_seed.push_back(train::evaluate_mae(ck, train::plan_for(ck.config, ds), ds));
  }
  return make_record(train::benchmark_name(cks[0].config), cks[0].kind, per_seed);
}

MetricsRecord rollout_checkpoints(const std::vector<train::Checkpoint>& cks, const io::Dataset& ds) {
  check_same_run(cks);
  std::vector<double> per_seed;
  RolloutCurve mean;
  bool blowup = false;
  for (const auto& ck : cks) {
    check_compatible(ck, ds);
    train::ModelPredictor p(ck, ds);
    const auto test = train::plan_for(ck.config, ds).indices(train::Part::test);
    const auto s = summarize_rollouts(rollout(p, ds, test, ck.config.regime));
    blowup = blowup || s.blowups > 0;
    per_seed.push_back(s.final_error());
    if (mean.time.empty()) {
      mean.time = s.time;
      mean.per_step.assign(s.per_step.size(), 0.0);
      mean.cumulative.assign(s.cumulative.size(), 0.0);
    }
    if (s.per_step.size() != mean.per_step.size()) throw std::runtime_error("rollout horizons differ between seeds");
    for (std::size_t j = 0; j < mean.per_step.size(); ++j) {
      mean.per_step[j] += s.per_step[j] / static_cast<double>(cks.size());
      mean.cumulative[j] += s.cumulative[j] / static_cast<double>(cks.size());
    }
  }
  auto rec = make_record(train::benchmark_name(cks[0].config) + "-rollout", cks[0].kind, per_seed);
  rec.rollout_curve = mean;
  rec.flags["blowup"] = blowup;
  return rec;
}

DecompositionPanel decomposition_panel(const train::Checkpoint& ck, const io::Dataset& ds) {
  check_compatible(ck, ds);
  train::ModelPredictor p(ck, ds);
  const auto q = first_test_query(ck, ds);
  const auto d = p.decompose({q});
  train::Window w{q.sample, 0, 1, q.target};
  DecompositionPanel out;
  out.name = train::benchmark_name(ck.config) + " " + ck.kind + " sample " + std::to_string(q.sample);
  out.grid = ck.layout.grid;
  out.truth = train::window_target(ds, w);
  out.passthrough = d.passthrough.front();
  out.update = d.update.front();
  out.output = d.output.front();
  return out;
}

ErrorMap error_map(const train::Checkpoint& ck, const io::Dataset& ds) {
  check_compatible(ck, ds);
  train::ModelPredictor p(ck, ds);
  const auto q = first_test_query(ck, ds);
  ErrorMap e;
  e.name = train::benchmark_name(ck.config) + " " + ck.kind + " sample " + std::to_string(q.sample);
  e.grid = ck.layout.grid;
  e.prediction = p.predict({q}).front();
  e.truth = train::window_target(ds, {q.sample, 0, 1, q.target});
  return e;
}

}  // namespace pitt::eval
