// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 when any fails.
// Trained checkpoints are cached under --cache, keyed by config, dataset content and
// the bytes of the core library, so reruns only retrain after a code or preset change.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "pitt/eval/pipeline.hpp"
#include "pitt/eval/probe.hpp"
#include "pitt/eval/report.hpp"
#include "pitt/eval/rollout.hpp"
#include "pitt/io/hash.hpp"
#include "pitt/pde/datasets.hpp"
#include "pitt/pde/grf.hpp"
#include "pitt/pde/navier_stokes.hpp"
#include "pitt/pde/pde1d.hpp"
#include "pitt/pde/poisson.hpp"
#include "pitt/pde/presets.hpp"
#include "pitt/train/trainer.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace pitt;
using pitt::testing::gradient_error;
using pitt::testing::la_oracle;
using pitt::testing::max_abs_diff;
using pitt::testing::random_ids;
using pitt::testing::random_tensor;
using pitt::testing::toy_input;
using pitt::testing::toy_pitt;

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
  // Records a sub-check; the criterion passes only if every one does.
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back((ok ? "" : "!! ") + what);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double mean_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

void progress(const std::string& line) { std::cerr << "  .. " << line << std::endl; }

// ---------------------------------------------------------------------------------------------

Outcome tokenizer_suite() {
  using namespace eqtok;
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto& vocab = build_vocabulary();
  std::mt19937_64 rng(2024);
  const int total = 1000;
  int round_trips = 0, bad_length = 0, bad_range = 0;
  std::set<Family> seen;
  for (int i = 0; i < total; ++i) {
    const auto spec = pitt::testing::random_spec(rng);
    seen.insert(spec.family);
    const int pad = is_1d(spec.family) ? 500 : 100;
    const auto seq = tokenize_equation(spec);
    if (static_cast<int>(seq.ids.size()) != pad || static_cast<int>(seq.normalized.size()) != pad) ++bad_length;
    for (double v : seq.normalized) bad_range += !(v >= -1.0 && v <= 1.0);
    const auto back = retokenize(detokenize(seq), pad);
    round_trips += back.ids == seq.ids && back.true_length == seq.true_length;
  }
  const auto V = vocab.size();
  const double lo = normalize_id(0, V), hi = normalize_id(static_cast<int>(V) - 1, V);
  const double secs = seconds_since(t0);
  o.check(round_trips == total, fmt("round trips %d/%d", round_trips, total));
  o.check(seen.size() == 5, fmt("families sampled %zu/5", seen.size()));
  o.check(bad_length == 0, fmt("sequences not 500/100 long: %d", bad_length));
  o.check(bad_range == 0 && lo == -1.0 && hi == 1.0, fmt("endpoints %g / %g, out of range %d", lo, hi, bad_range));
  o.check(secs < 60.0, fmt("runtime %.1f s < 60 s", secs));
  return o;
}

// ---------------------------------------------------------------------------------------------

pde::EquationSpec spec_1d(eqtok::Family f, double alpha, double beta, double gamma, eqtok::ForcingParams p) {
  pde::EquationSpec s;
  s.family = f;
  s.alpha = alpha;
  s.beta = beta;
  s.gamma = gamma;
  s.forcing = std::move(p);
  s.target_time = 4.0;
  return s;
}

Outcome solver_oracles() {
  using eqtok::Family;
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  {
    const double beta = 0.1, k = 2.0 * kPi * 2.0 / 16.0;
    pde::Solver1DOptions opts;
    opts.initial = [k](double x) { return std::sin(k * x); };
    const auto tr = pde::solve_1d(spec_1d(Family::heat, 0.0, beta, 0.0, eqtok::ForcingParams::zero()), opts);
    double err = 0.0;
    for (int i = 0; i < tr.nx; ++i)
      err = std::max(err, std::abs(tr.at(tr.nt, i) - std::exp(-beta * k * k * 4.0) * std::sin(k * tr.x[i])));
    o.check(err < 1e-4, fmt("heat single-mode decay at t=4: %.2e < 1e-4", err));
  }
  {
    const double gamma = 2.0, k = 2.0 * kPi / 16.0;
    pde::Solver1DOptions opts;
    opts.initial = [k](double x) { return std::sin(k * x); };
    const auto tr = pde::solve_1d(spec_1d(Family::kdv, 0.0, 0.0, gamma, eqtok::ForcingParams::zero()), opts);
    double err = 0.0;
    for (int i = 0; i < tr.nx; ++i)
      err = std::max(err, std::abs(tr.at(tr.nt, i) - std::sin(k * tr.x[i] + gamma * k * k * k * 4.0)));
    o.check(err < 1e-3, fmt("linear dispersion at t=4: %.2e < 1e-3", err));
  }
  {
    // Every forcing mode integrates to zero over the periodic domain.
    Rng rng(9);
    double drift = 0.0;
    for (auto [f, a, b, g] : {std::tuple{Family::heat, 0.0, 0.5, 0.0}, std::tuple{Family::burgers, 1.0, 0.05, 0.0},
                              std::tuple{Family::kdv, 0.01, 0.0, 8.0}}) {
      const auto tr = pde::solve_1d(spec_1d(f, a, b, g, pde::sample_forcing(rng)));
      for (int n = 0; n < tr.nt; ++n) drift = std::max(drift, std::abs(mean_of(tr.frame(n + 1)) - mean_of(tr.frame(n))));
    }
    o.check(drift < 1e-6, fmt("mean drift per step: %.2e < 1e-6", drift));
  }
  {
    const int n = 256;
    const double nu = 1e-3;
    std::vector<double> w0(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w0[static_cast<std::size_t>(i) * n + j] = std::sin(2.0 * kPi * j / n);
    const pde::NSOptions opts;
    const auto tr = pde::solve_ns(nu, 0.0, w0, opts);
    const int s = opts.save_n, last = opts.frames;
    const double decay = std::exp(-4.0 * kPi * kPi * nu * opts.t_final);
    double err = 0.0;
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j)
        err = std::max(err, std::abs(tr.w[(static_cast<std::size_t>(last) * s + i) * s + j] - decay * std::sin(2.0 * kPi * j / s)));
    o.check(err < 1e-4, fmt("NS single-mode decay at t=%g: %.2e < 1e-4", opts.t_final, err));
  }
  {
    Rng rng(5);
    double div = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      const auto vel = pde::velocity_from_vorticity(pde::sample_grf_vorticity(rng, 256), 256);
      for (double d : pde::spectral_divergence(vel, 256)) div = std::max(div, std::abs(d));
    }
    o.check(div < 1e-10, fmt("NS velocity divergence: %.2e < 1e-10", div));
  }
  {
    Rng rng(77);
    const double tol = 1e-8;
    double worst = 0.0;
    int dirichlet_bad = 0, plate_bad = 0, problems = 0;
    for (int combo = 0; combo < 32; ++combo, ++problems) {
      const auto p = pde::sample_poisson_problem(rng, combo % 16);
      const auto sol = pde::solve_poisson(p, tol);
      worst = std::max(worst, pde::poisson_residual(p, sol.u, sol.role) / tol);
      auto at = [&](int i, int j) { return sol.u[static_cast<std::size_t>(i) * p.nx + j]; };
      // Edge nodes away from the corners belong to their edge alone.
      for (int e = 0; e < 4; ++e) {
        if (p.edges[e].kind != eqtok::BoundaryKind::dirichlet) continue;
        const double v = p.edges[e].value;
        if (e < 2)
          for (int i = 1; i < p.ny - 1; ++i) dirichlet_bad += at(i, e == 0 ? 0 : p.nx - 1) != v;
        else
          for (int j = 1; j < p.nx - 1; ++j) dirichlet_bad += at(e == 2 ? 0 : p.ny - 1, j) != v;
      }
      for (const auto& pl : p.plates)
        for (int j = pl.x; j < pl.x + pl.width; ++j) plate_bad += at(pl.y, j) != pl.charge;
    }
    o.check(worst <= 1.0, fmt("Poisson residual / tol over %d problems: max %.3f <= 1", problems, worst));
    o.check(dirichlet_bad == 0 && plate_bad == 0,
            fmt("Dirichlet nodes off their data: %d, plate nodes off: %d", dirichlet_bad, plate_bad));
  }
  {
    pde::PoissonProblem p;
    for (auto& e : p.edges) e = {eqtok::BoundaryKind::dirichlet, 0.0};
    const double V = 1.0;
    p.plates = {{20, 25, 60, -V}, {20, 35, 60, V}};
    const auto sol = pde::solve_poisson(p);
    const auto mag = pde::field_magnitude(sol.u, p.nx, p.ny, p.h());
    const double ideal = 2.0 * V / (10.0 * p.h());
    double worst = 0.0;
    for (int i = 27; i <= 33; ++i)
      for (int j = 40; j <= 60; ++j) worst = std::max(worst, std::abs(mag[i * p.nx + j] - ideal) / ideal);
    o.check(worst < 0.05, fmt("parallel-plate mid-gap field: max deviation %.2f%% < 5%%", 100.0 * worst));
  }
  const double secs = seconds_since(t0);
  o.check(secs < 600.0, fmt("runtime %.1f s < 600 s", secs));
  return o;
}

// ---------------------------------------------------------------------------------------------

Outcome model_invariants() {
  using namespace nn;
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  {
    Rng rng(1);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
      const int n = rng.integer(1, 5), d = rng.integer(1, 4), dv = rng.integer(1, 4);
      const auto q = random_tensor({n, d}, rng), k = random_tensor({n, d}, rng), v = random_tensor({n, dv}, rng);
      worst = std::max(worst, max_abs_diff(linear_attention(q, k, v).data, la_oracle(q, k, v).data));
    }
    o.check(worst < 1e-12, fmt("linear attention vs triple loop, 500 cases: %.2e < 1e-12", worst));
  }
  {
    Rng rng(2);
    bool exact = true;
    for (int trial = 0; trial < 50; ++trial) {
      const int n = rng.integer(1, 5), d = rng.integer(1, 4);
      const auto q = random_tensor({n, d}, rng), k = random_tensor({n, d}, rng), v = random_tensor({n, d}, rng);
      const auto base = linear_attention(q, k, v);
      for (double c : {2.0, 0.5, -4.0, 0.0}) {
        Tensor qc = q;
        for (auto& x : qc.data) x *= c;
        const auto out = linear_attention(qc, k, v);
        for (std::size_t i = 0; i < out.data.size(); ++i) exact = exact && out.data[i] == c * base.data[i];
      }
    }
    o.check(exact, "Q-linearity exact");
  }
  {
    Rng rng(8);
    bool exact = true;
    for (int L : {1, 8, 20}) {
      Pitt model(toy_pitt(L, 25), 100 + L);
      model.zero_update_mlps();
      const Tensor v0 = random_tensor({2, 7, 6}, rng, 3.0);
      Tensor counts({2, 50});
      for (int b = 0; b < 2; ++b) {
        const auto row = token_counts(random_ids(rng, 25, 9, 50), 50);
        std::copy(row.data.begin(), row.data.end(), counts.data.begin() + b * 50);
      }
      for (bool training : {false, true}) {
        Rng r(1);
        NoGradGuard g;
        const auto out = model.numerical_update(constant(v0), counts, Tensor({2}, {0.25, 3.0}), training, r);
        exact = exact && out.value().data == v0.data;
      }
    }
    o.check(exact, "zeroed-update residual identity exact for L = 1, 8, 20");
  }
  {
    Rng rng(9);
    const auto c = toy_pitt(3, 30);
    const Pitt model(c, 13);
    bool exact = true;
    for (int trial = 0; trial < 10; ++trial) {
      const auto in = toy_input(rng, c, 3, 16, 10);
      Rng r(0);
      NoGradGuard g;
      const auto p = model.forward(in, false, r);
      const auto &out = p.output.value().data, &a = p.passthrough.value().data, &u = p.update.value().data;
      for (std::size_t i = 0; i < out.size(); ++i) exact = exact && out[i] == a[i] + u[i];
    }
    o.check(exact, "passthrough + update == forward output, bit for bit");
  }
  {
    Rng rng(10);
    auto c = toy_pitt(2, 20);
    c.dropout = 0.2;
    c.backbone.dropout = 0.2;
    Pitt model(c, 14);
    const auto in = toy_input(rng, c, 2, 16, 8);
    const Tensor target = random_tensor({2, 16, 1}, rng);
    double worst = 0.0;
    std::string worst_name;
    int groups = 0;
    for (bool training : {false, true}) {
      model.params().zero_grad();
      Rng r(42);
      backward(mse_loss(model.forward(in, training, r).output, target));
      auto loss = [&] {
        Rng rr(42);
        NoGradGuard g;
        return mse_loss(model.forward(in, training, rr).output, target).value().data[0];
      };
      for (auto [name, p] : model.params().items()) {
        const double e = gradient_error(p, loss);
        ++groups;
        if (!(e <= worst)) worst = e, worst_name = name;
      }
    }
    o.check(worst < 1e-4, fmt("gradients vs central differences, %d groups on 16 points: max %.2e (%s) < 1e-4",
                              groups, worst, worst_name.c_str()));
  }
  const double secs = seconds_since(t0);
  o.check(secs < 300.0, fmt("runtime %.1f s < 300 s", secs));
  return o;
}

// ---------------------------------------------------------------------------------------------

class Trainer {
 public:
  Trainer(fs::path cache, bool fresh) : cache_(std::move(cache)), fresh_(fresh) {
    fs::create_directories(cache_);
    std::ifstream lib(PITT_LIBRARY_FILE, std::ios::binary);
    std::stringstream ss;
    ss << lib.rdbuf();
    library_ = io::sha256_hex(ss.str());
  }

  train::Checkpoint get(const train::TrainConfig& cfg, const io::Dataset& ds, const std::string& ds_hash) {
    io::Sha256 h;
    h.update(train::format_config(cfg));
    h.update(ds_hash);
    h.update(library_);
    const auto key = h.finish().substr(0, 16);
    const auto path = cache_ / (cfg.preset + "-seed" + std::to_string(cfg.seed) + "-" + key + ".ckpt");
    if (!fresh_ && fs::exists(path)) {
      progress("cached " + path.filename().string());
      return train::Checkpoint::load(path);
    }
    progress("training " + cfg.preset + " seed " + std::to_string(cfg.seed));
    const auto t0 = std::chrono::steady_clock::now();
    auto ck = train::train_model(cfg, train::plan_for(cfg, ds), ds, [&](const train::EpochRecord& r) {
      if (r.epoch % 5 == 0 || r.epoch == cfg.epochs)
        progress(fmt("  epoch %d train %.4g val %.4g (%.0f s)", r.epoch, r.train_loss, r.val_loss, r.wall_seconds));
    });
    progress(fmt("  done in %.0f s, best epoch %d", seconds_since(t0), ck.epoch));
    ck.save(path, true);
    return ck;
  }

  const fs::path& cache() const { return cache_; }

 private:
  fs::path cache_;
  bool fresh_;
  std::string library_;
};

struct Bench {
  io::Dataset ds;
  std::string hash;
  std::vector<train::Checkpoint> pitt, fno;
};

Bench train_bench(Trainer& tr, eqtok::Family family, const std::string& pitt_preset, const std::string& fno_preset,
                  int seeds) {
  Bench b;
  const auto t0 = std::chrono::steady_clock::now();
  b.ds = pde::generate_preset(family, "desk", 0);
  b.hash = b.ds.content_hash();
  progress(fmt("%s desk: %zu samples in %.0f s, hash %.12s", std::string(eqtok::family_name(family)).c_str(),
               b.ds.count(), seconds_since(t0), b.hash.c_str()));
  for (int s = 0; s < seeds; ++s) {
    for (auto [name, out] : {std::pair{pitt_preset, &b.pitt}, std::pair{fno_preset, &b.fno}}) {
      auto cfg = train::preset(name);
      cfg.seed = static_cast<std::uint64_t>(s);
      out->push_back(tr.get(cfg, b.ds, b.hash));
    }
  }
  return b;
}

void compare_seeds(Outcome& o, const std::string& label, const eval::MetricsRecord& p, const eval::MetricsRecord& f,
                   bool every) {
  int wins = 0;
  std::string detail;
  for (std::size_t s = 0; s < p.per_seed.size(); ++s) {
    wins += p.per_seed[s] < f.per_seed[s];
    detail += fmt("%sseed %zu %.4g vs %.4g", s ? ", " : "", s, p.per_seed[s], f.per_seed[s]);
  }
  const int n = static_cast<int>(p.per_seed.size());
  const bool ok = every ? wins == n : 2 * wins > n;
  o.check(ok, fmt("%s: PITT below FNO on %d/%d seeds (%s) [%s]", label.c_str(), wins, n, every ? "all" : "majority",
                  detail.c_str()));
}

constexpr int kSeeds = 3;

struct Shared {
  std::optional<Bench> heat, poisson;
  eval::MetricsDocument metrics;
  eval::Report report;
};

Outcome directional_training(Trainer& tr, Shared& sh) {
  Outcome o;
  if (!sh.heat) sh.heat = train_bench(tr, eqtok::Family::heat, "pitt-heat-desk", "fno-heat-desk", kSeeds);
  const auto& heat = *sh.heat;
  const auto& hc = heat.pitt.front().config;
  o.check(heat.ds.count() >= 600 && hc.epochs >= 50,
          fmt("heat desk: %zu trajectories, %d epochs, %d seeds", heat.ds.count(), hc.epochs, kSeeds));
  const auto hp = eval::evaluate_checkpoints(heat.pitt, heat.ds), hf = eval::evaluate_checkpoints(heat.fno, heat.ds);
  compare_seeds(o, "heat test MAE", hp, hf, true);
  o.check(true, fmt("heat mean MAE: PITT %s, FNO %s, ratio %.2f", eval::format_mae(hp).c_str(),
                    eval::format_mae(hf).c_str(), hf.mae_mean / hp.mae_mean));

  if (!sh.poisson) sh.poisson = train_bench(tr, eqtok::Family::poisson, "pitt-poisson-desk", "fno-poisson-desk", kSeeds);
  const auto& pois = *sh.poisson;
  o.check(pois.ds.count() >= 1000, fmt("poisson desk: %zu samples, %d epochs, %d seeds", pois.ds.count(),
                                       pois.pitt.front().config.epochs, kSeeds));
  const auto pp = eval::evaluate_checkpoints(pois.pitt, pois.ds), pf = eval::evaluate_checkpoints(pois.fno, pois.ds);
  compare_seeds(o, "poisson test MAE", pp, pf, true);
  o.check(true, fmt("poisson mean MAE: PITT %s, FNO %s, ratio %.2f", eval::format_mae(pp).c_str(),
                    eval::format_mae(pf).c_str(), pf.mae_mean / pp.mae_mean));
  for (const auto& r : {hp, hf, pp, pf}) sh.metrics.records.push_back(r);
  sh.report.error_maps.push_back(eval::error_map(pois.pitt.front(), pois.ds));
  sh.report.decompositions.push_back(eval::decomposition_panel(heat.pitt.front(), heat.ds));
  return o;
}

Outcome rollout_criterion(Trainer& tr, Shared& sh) {
  Outcome o;
  if (!sh.heat) sh.heat = train_bench(tr, eqtok::Family::heat, "pitt-heat-desk", "fno-heat-desk", kSeeds);
  const auto& heat = *sh.heat;
  {
    const auto plan = train::plan_for(heat.pitt.front().config, heat.ds);
    const auto test = plan.indices(train::Part::test);
    train::OraclePredictor oracle(heat.ds);
    double worst = 0.0;
    std::size_t steps = 0;
    for (const auto& r : eval::rollout(oracle, heat.ds, test, train::Regime::next_step_1d)) {
      for (double e : r.error) worst = std::max(worst, std::isfinite(e) ? std::abs(e) : INFINITY);
      steps += r.steps();
    }
    o.check(worst == 0.0, fmt("oracle rollout over %zu trajectories, %zu steps: max error %g", test.size(), steps, worst));
  }
  const auto rp = eval::rollout_checkpoints(heat.pitt, heat.ds), rf = eval::rollout_checkpoints(heat.fno, heat.ds);
  const double t_end = rp.rollout_curve ? rp.rollout_curve->time.back() : NAN;
  compare_seeds(o, fmt("heat rollout error at t=%g", t_end), rp, rf, false);
  if (rp.rollout_curve && rf.rollout_curve)
    o.notes.push_back(fmt("(info) seed-mean curve at t=%g: per-step %.4g vs %.4g, cumulative mean %.4g vs %.4g", t_end,
                          rp.rollout_curve->per_step.back(), rf.rollout_curve->per_step.back(),
                          rp.rollout_curve->cumulative.back(), rf.rollout_curve->cumulative.back()));
  for (const auto& r : {rp, rf}) {
    if (r.flags.count("blowup") && r.flags.at("blowup")) o.notes.push_back(r.model + " rollout blew up on some trajectory");
  }
  sh.metrics.records.push_back(rp);
  sh.metrics.records.push_back(rf);
  return o;
}

Outcome probe_criterion(Trainer& tr, Shared& sh) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto ds = pde::generate_preset(eqtok::Family::navier_stokes, "desk", 0);
  progress(fmt("navier_stokes desk: %zu trajectories in %.0f s", ds.count(), seconds_since(t0)));
  auto cfg = train::preset("pitt-ns-next-desk");
  cfg.seed = 0;
  const auto ck = tr.get(cfg, ds, ds.content_hash());
  const auto model = ck.model();
  const auto& pitt = dynamic_cast<const nn::Pitt&>(*model);

  eqtok::EquationSpec base;
  base.family = eqtok::Family::navier_stokes;
  base.nu = 1e-8;
  base.amp = 0.002;
  base.target_time = 0.25;
  auto nu_edit = base, a_edit = base;
  nu_edit.nu = 1e-6;
  a_edit.amp = 0.007;

  const auto same = eval::probe_attention(pitt, base, base);
  o.check(same.max() == 0.0, fmt("identical specs: max |diff| = %g", same.max()));
  const auto mn = eval::probe_attention(pitt, base, nu_edit), ma = eval::probe_attention(pitt, base, a_edit);
  const auto sn = eval::support(mn), sa = eval::support(ma);
  const auto count = [](const std::vector<bool>& s) { return std::count(s.begin(), s.end(), true); };
  o.check(count(sn) > 0 && count(sa) > 0,
          fmt("nonzero maps: nu edit max %.3g (%ld entries >= 10%% of max), A edit max %.3g (%ld entries)", mn.max(),
              count(sn), ma.max(), count(sa)));
  o.check(sn != sa, fmt("supports differ: Jaccard overlap %.3f", eval::support_overlap(sn, sa)));
  sh.report.attention.push_back({"nu edit", mn});
  sh.report.attention.push_back({"A edit", ma});

  // Target-time edits: reported, not gated.
  auto timed = base;
  timed.target_time = 10.25;
  std::vector<std::vector<bool>> ts;
  for (double t : {12.75, 20.25, 27.75}) {
    auto m = timed;
    m.target_time = t;
    const auto map = eval::probe_attention(pitt, timed, m);
    ts.push_back(eval::support(map));
    if (t == 27.75) sh.report.attention.push_back({"time edit", map});
  }
  double min_overlap = 1.0;
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = i + 1; j < ts.size(); ++j) min_overlap = std::min(min_overlap, eval::support_overlap(ts[i], ts[j]));
  o.notes.push_back(fmt("(info) target-time edits 10.25 -> 12.75 / 20.25 / 27.75: min pairwise support overlap %.3f",
                        min_overlap));
  return o;
}

// ---------------------------------------------------------------------------------------------

std::string pipeline_once() {
  pde::Dataset1DOptions g;
  g.family = eqtok::Family::heat;
  g.count_per_combo = 4;
  g.seed = 31;
  const auto ds = pde::make_dataset_1d(g);
  std::vector<train::Checkpoint> pitt, fno;
  for (std::uint64_t s : {0, 1}) {
    for (auto [name, out] : {std::pair{"pitt-heat-desk", &pitt}, std::pair{"fno-heat-desk", &fno}}) {
      auto cfg = train::preset(name);
      cfg.seed = s;
      cfg.epochs = 2;
      out->push_back(train::train_model(cfg, train::plan_for(cfg, ds), ds));
    }
  }
  eval::MetricsDocument doc;
  doc.records.push_back(eval::evaluate_checkpoints(pitt, ds));
  doc.records.push_back(eval::evaluate_checkpoints(fno, ds));
  doc.records.push_back(eval::rollout_checkpoints(pitt, ds));
  doc.records.push_back(eval::rollout_checkpoints(fno, ds));
  return doc.dump();
}

Outcome determinism(const fs::path& scratch) {
  Outcome o;
  const auto a = pipeline_once(), b = pipeline_once();
  o.check(a == b, fmt("in-process runs: %zu vs %zu bytes, sha256 %.12s vs %.12s", a.size(), b.size(),
                      io::sha256_hex(a).c_str(), io::sha256_hex(b).c_str()));
  // Through the file format as well.
  fs::create_directories(scratch);
  const auto pa = scratch / "run_a.json", pb = scratch / "run_b.json";
  eval::MetricsDocument::from_json(nlohmann::json::parse(a)).save(pa);
  eval::MetricsDocument::from_json(nlohmann::json::parse(b)).save(pb);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const auto fa = slurp(pa), fb = slurp(pb);
  o.check(fa == fb && fa == a, "saved documents byte-identical to each other and to the dump");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string cache = PITT_ACCEPTANCE_CACHE;
  std::vector<std::string> only;
  bool fresh = false;
  app.add_option("--cache", cache, "Checkpoint cache and report directory");
  app.add_option("--only", only, "Run only these criteria")
      ->check(CLI::IsMember({"tokenizer", "solvers", "invariants", "training", "rollout", "probe", "determinism"}));
  app.add_flag("--fresh", fresh, "Retrain even when a cached checkpoint exists");
  CLI11_PARSE(app, argc, argv);

  Trainer trainer(cache, fresh);
  Shared shared;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"tokenizer", tokenizer_suite},
      {"solvers", solver_oracles},
      {"invariants", model_invariants},
      {"training", [&] { return directional_training(trainer, shared); }},
      {"rollout", [&] { return rollout_criterion(trainer, shared); }},
      {"probe", [&] { return probe_criterion(trainer, shared); }},
      {"determinism", [&] { return determinism(fs::path(cache) / "determinism"); }},
  };

  int failed = 0, ran = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << fmt(" (%.1f s)", seconds_since(t0)) << "\n";
    for (const auto& n : o.notes) std::cout << "     " << n << "\n";
    std::cout.flush();
  }

  if (!shared.metrics.records.empty() || !shared.report.attention.empty()) {
    shared.report.metrics = shared.metrics;
    try {
      const auto dir = fs::path(cache) / "report";
      eval::emit_report(shared.report, dir);
      if (!shared.metrics.records.empty()) std::cout << "\n" << eval::mae_table(shared.metrics.records);
      std::cout << "report written to " << dir.string() << "\n";
    } catch (const std::exception& e) {
      std::cout << "report not written: " << e.what() << "\n";
    }
  }
  std::cout << (ran - failed) << "/" << ran << " criteria passed\n";
  return failed ? 1 : 0;
}
