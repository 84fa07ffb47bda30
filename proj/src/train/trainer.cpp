#include "pitt/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "pitt/eqtok/vocabulary.hpp"
#include "pitt/nn/ops.hpp"
#include "pitt/train/optim.hpp"

namespace pitt::train {

namespace {

constexpr std::int64_t kEvalBatch = 16;

std::string fmt_loss(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

nn::Tensor standardized_targets(const io::Dataset& ds, const std::vector<Window>& ws, const Normalizer& norm,
                                std::int64_t S) {
  nn::Tensor t({static_cast<std::int64_t>(ws.size()), S, 1});
  for (std::size_t b = 0; b < ws.size(); ++b) {
    const auto y = window_target(ds, ws[b]);
    for (std::int64_t s = 0; s < S; ++s)
      t.data[b * static_cast<std::size_t>(S) + static_cast<std::size_t>(s)] = (y[static_cast<std::size_t>(s)] - norm.out_mean) / norm.out_std;
  }
  return t;
}

// Picks k windows per sample (all when k is 0 or too large), in sample order.
std::vector<Window> subsample(const std::vector<Window>& all, std::size_t per, int k, Rng& rng) {
  if (k <= 0 || static_cast<std::size_t>(k) >= per) return all;
  std::vector<Window> out;
  std::vector<std::size_t> idx(per);
  for (std::size_t start = 0; start < all.size(); start += per) {
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    std::vector<std::size_t> pick(idx.begin(), idx.begin() + k);
    std::sort(pick.begin(), pick.end());
    for (auto i : pick) out.push_back(all[start + i]);
  }
  return out;
}

}  // namespace

TrainDiverged::TrainDiverged(int e, double last)
    : std::runtime_error("training diverged in epoch " + std::to_string(e) + " (last finite loss " + fmt_loss(last) + ")"),
      epoch(e),
      last_finite_loss(last) {}

std::unique_ptr<nn::Model> build_model(const TrainConfig& cfg, const Layout& layout, int vocab, int pad_length) {
  nn::FnoConfig f;
  f.in_channels = layout.in_channels;
  f.out_channels = 1;
  f.width = cfg.model == "pitt" && cfg.width > 0 ? cfg.width : cfg.hidden;
  f.modes = cfg.modes;
  f.blocks = cfg.blocks;
  f.proj_width = cfg.proj_width;
  f.dropout = cfg.dropout;
  f.grid = layout.grid;
  if (cfg.model == "fno") return std::make_unique<nn::Fno>(f, cfg.seed);
  nn::PittConfig p;
  p.backbone = f;
  p.hidden = cfg.hidden;
  p.layers = cfg.layers;
  p.heads = cfg.heads;
  p.vocab = vocab;
  p.pad_length = pad_length;
  p.dropout = cfg.dropout;
  return std::make_unique<nn::Pitt>(p, cfg.seed);
}

SplitPlan plan_for(const TrainConfig& cfg, const io::Dataset& ds) {
  return split_dataset(ds, cfg.split, cfg.seed, cfg.train_fraction, cfg.val_fraction);
}

Checkpoint train_model(const TrainConfig& cfg, const SplitPlan& plan, const io::Dataset& ds,
                       const EpochCallback& on_epoch) {
  cfg.validate();
  if (cfg.family != ds.family) throw std::invalid_argument("train_model: config family does not match the dataset");
  if (plan.part.size() != ds.count()) throw std::invalid_argument("train_model: split plan does not cover the dataset");
  const Layout layout = regime_layout(ds, cfg.regime);
  const auto train_idx = plan.indices(Part::train);
  const auto val_idx = plan.indices(Part::val);
  if (train_idx.empty()) throw std::invalid_argument("train_model: empty training partition");

  const bool pitt = cfg.model == "pitt";
  const int vocab = static_cast<int>(eqtok::build_vocabulary().size());
  auto model = build_model(cfg, layout, vocab, ds.pad_length);
  TokenCache tokens(ds);

  Checkpoint ck;
  ck.config = cfg;
  ck.kind = model->kind();
  ck.model_config = model->config_json();
  ck.layout = layout;
  ck.norm = Normalizer::fit(ds, train_idx);
  ck.dataset_hash = ds.content_hash();

  const auto per = windows_per_sample(ds, cfg.regime, cfg.target_time);
  const auto train_all = make_windows(ds, cfg.regime, train_idx, cfg.target_time);
  Rng val_rng(cfg.seed + 2);
  const auto val_windows =
      subsample(make_windows(ds, cfg.regime, val_idx, cfg.target_time), per, cfg.val_windows_per_sample, val_rng);
  const std::size_t per_epoch =
      cfg.windows_per_sample > 0 ? std::min<std::size_t>(per, static_cast<std::size_t>(cfg.windows_per_sample)) * train_idx.size()
                                 : train_all.size();
  const auto bs = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t batches = (per_epoch + bs - 1) / bs;

  Adam opt(model->params(), cfg.learning_rate, cfg.weight_decay);
  OneCycle cycle{cfg.learning_rate, static_cast<std::int64_t>(batches) * cfg.epochs};
  Rng rng(cfg.seed + 1);
  const std::int64_t S = layout.points();

  auto run_batch = [&](const std::vector<Window>& ws, bool training) {
    std::vector<Query> qs;
    qs.reserve(ws.size());
    for (const auto& w : ws) qs.push_back(make_query(ds, cfg.regime, w, cfg.target_time));
    const auto in = make_batch(qs, layout, ck.norm, pitt ? &tokens : nullptr);
    const auto target = standardized_targets(ds, ws, ck.norm, S);
    return nn::mse_loss(model->forward(in, training, rng).output, target);
  };

  auto validate = [&](const std::vector<Window>& ws) {
    nn::NoGradGuard ng;
    double sum = 0.0;
    for (std::size_t i = 0; i < ws.size(); i += kEvalBatch) {
      const std::vector<Window> chunk(ws.begin() + static_cast<std::ptrdiff_t>(i),
                                      ws.begin() + static_cast<std::ptrdiff_t>(std::min(ws.size(), i + kEvalBatch)));
      sum += run_batch(chunk, false).value().data[0] * static_cast<double>(chunk.size());
    }
    return sum / static_cast<double>(ws.size());
  };

  const auto t0 = std::chrono::steady_clock::now();
  double last_finite = std::numeric_limits<double>::quiet_NaN();
  EarlyStopping stopper;
  std::int64_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto ws = subsample(train_all, per, cfg.windows_per_sample, rng);
    rng.shuffle(ws);
    const double epoch_lr = pitt ? cycle.lr(step) : step_lr(cfg.learning_rate, epoch, cfg.scheduler_step, cfg.scheduler_gamma);
    double sum = 0.0;
    for (std::size_t i = 0; i < ws.size(); i += bs) {
      const std::vector<Window> chunk(ws.begin() + static_cast<std::ptrdiff_t>(i),
                                      ws.begin() + static_cast<std::ptrdiff_t>(std::min(ws.size(), i + bs)));
      model->params().zero_grad();
      const auto loss = run_batch(chunk, true);
      const double l = loss.value().data[0];
      if (!std::isfinite(l)) throw TrainDiverged(epoch + 1, last_finite);
      last_finite = l;
      nn::backward(loss);
      if (pitt) {
        opt.set_lr(cycle.lr(step));
        opt.set_beta1(cycle.momentum(step));
      } else {
        opt.set_lr(epoch_lr);
      }
      opt.step();
      ++step;
      sum += l * static_cast<double>(chunk.size());
    }
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.train_loss = sum / static_cast<double>(ws.size());
    rec.val_loss = val_windows.empty() ? rec.train_loss : validate(val_windows);
    if (!std::isfinite(rec.val_loss)) throw TrainDiverged(epoch + 1, last_finite);
    rec.lr = epoch_lr;
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ck.log.push_back(rec);
    if (stopper.update(rec.epoch, rec.val_loss)) {
      ck.best_val = stopper.best;
      ck.epoch = stopper.best_epoch;
      ck.capture(*model);
    }
    if (on_epoch) on_epoch(rec);
  }
  ck.rng_state = rng.state();
  return ck;
}

ModelPredictor::ModelPredictor(const Checkpoint& ck, const io::Dataset& ds)
    : ck_(ck), model_(ck.model()), tokens_(ds) {
  check_regime(ds, ck.config.regime);
  if (regime_layout(ds, ck.config.regime).grid != ck.layout.grid) {
    throw std::invalid_argument("checkpoint grid does not match the dataset");
  }
}

Decomposition ModelPredictor::decompose(const std::vector<Query>& qs) {
  nn::NoGradGuard ng;
  Decomposition d;
  const bool pitt = ck_.kind == "pitt";
  const auto S = static_cast<std::size_t>(ck_.layout.points());
  const double mu = ck_.norm.out_mean, sd = ck_.norm.out_std;
  for (std::size_t i = 0; i < qs.size(); i += kEvalBatch) {
    const std::vector<Query> chunk(qs.begin() + static_cast<std::ptrdiff_t>(i),
                                   qs.begin() + static_cast<std::ptrdiff_t>(std::min(qs.size(), i + kEvalBatch)));
    Rng unused(0);
    const auto in = make_batch(chunk, ck_.layout, ck_.norm, pitt ? &tokens_ : nullptr);
    const auto p = model_->forward(in, false, unused);
    for (std::size_t b = 0; b < chunk.size(); ++b) {
      std::vector<double> o(S), pt(S), up(S, 0.0);
      for (std::size_t s = 0; s < S; ++s) {
        o[s] = p.output.value().data[b * S + s] * sd + mu;
        pt[s] = p.passthrough.value().data[b * S + s] * sd + mu;
        if (p.update.defined()) up[s] = p.update.value().data[b * S + s] * sd;
      }
      d.output.push_back(std::move(o));
      d.passthrough.push_back(std::move(pt));
      d.update.push_back(std::move(up));
    }
  }
  return d;
}

std::vector<std::vector<double>> ModelPredictor::predict(const std::vector<Query>& qs) { return decompose(qs).output; }

std::vector<std::vector<double>> OraclePredictor::predict(const std::vector<Query>& qs) {
  std::vector<std::vector<double>> out;
  for (const auto& q : qs) {
    Window w;
    w.sample = q.sample;
    w.target = q.target;
    out.push_back(window_target(ds_, w));
  }
  return out;
}

double evaluate_mae(Predictor& p, const SplitPlan& plan, const io::Dataset& ds, Regime regime, double target_time) {
  const auto test = plan.indices(Part::test);
  if (test.empty()) throw std::invalid_argument("evaluate_mae: empty test partition");
  const auto ws = make_windows(ds, regime, test, target_time);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < ws.size(); i += kEvalBatch) {
    std::vector<Query> qs;
    for (std::size_t k = i; k < std::min(ws.size(), i + kEvalBatch); ++k)
      qs.push_back(make_query(ds, regime, ws[k], target_time));
    const auto pred = p.predict(qs);
    for (std::size_t b = 0; b < qs.size(); ++b) {
      const auto y = window_target(ds, ws[i + b]);
      for (std::size_t s = 0; s < y.size(); ++s) sum += std::abs(pred[b][s] - y[s]);
      n += y.size();
    }
  }
  return sum / static_cast<double>(n);
}

double evaluate_mae(const Checkpoint& ck, const SplitPlan& plan, const io::Dataset& ds) {
  ModelPredictor p(ck, ds);
  return evaluate_mae(p, plan, ds, ck.config.regime, ck.config.target_time);
}

SeedSummary summarize(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("summarize: no seeds");
  SeedSummary s;
  s.n = static_cast<int>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / s.n;
  if (s.n > 1) {
    double var = 0.0;
    for (double x : v) var += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(var / s.n);
  }
  return s;
}

}  // namespace pitt::train
