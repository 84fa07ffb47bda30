// Command-line front end: data generation, training, evaluation and reporting.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "pitt/eqtok/tokenizer.hpp"
#include "pitt/eval/image.hpp"
#include "pitt/eval/pipeline.hpp"
#include "pitt/eval/probe.hpp"
#include "pitt/eval/report.hpp"
#include "pitt/io/spec_json.hpp"
#include "pitt/pde/presets.hpp"
#include "pitt/train/manifest.hpp"
#include "pitt/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace pitt;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path output_root() {
  const char* env = std::getenv("PITT_OUTPUT_ROOT");
  return env && *env ? fs::path(env) : fs::path("pitt_out");
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<train::Checkpoint> load_checkpoints(const std::vector<std::string>& paths) {
  std::vector<train::Checkpoint> out;
  for (const auto& p : paths) out.push_back(train::Checkpoint::load(p));
  return out;
}

// Checkpoints grouped by (benchmark, model) in first-seen order.
std::vector<std::vector<train::Checkpoint>> group_runs(std::vector<train::Checkpoint> cks) {
  std::vector<std::vector<train::Checkpoint>> groups;
  for (auto& c : cks) {
    bool placed = false;
    for (auto& g : groups)
      if (g[0].kind == c.kind && train::benchmark_name(g[0].config) == train::benchmark_name(c.config)) {
        g.push_back(std::move(c));
        placed = true;
        break;
      }
    if (!placed) groups.push_back({std::move(c)});
  }
  return groups;
}

// ---- generate

struct GenerateArgs {
  std::string family, preset = "desk", out;
  std::uint64_t seed = 0;
  bool overwrite = false;
};

int cmd_generate(const GenerateArgs& a) {
  const auto fam = eqtok::parse_family(a.family);
  const auto count = pde::preset_count(fam, a.preset);  // validates the preset
  fs::path out = a.out.empty() ? output_root() / "data" /
                                     (a.family + "-" + a.preset + "-s" + std::to_string(a.seed) + ".pitt")
                               : fs::path(a.out);
  if (fs::exists(out) && !a.overwrite)
    throw std::runtime_error(out.string() + " exists; pass --overwrite to replace it");
  std::cerr << "generating " << count << " " << a.family << " samples (" << a.preset << ", seed " << a.seed
            << ")\n";
  const auto ds = pde::generate_preset(fam, a.preset, a.seed, [](const std::string& msg) { std::cerr << "  " << msg << "\n"; });
  ensure_parent(out);
  const auto hash = ds.save(out, a.overwrite);
  std::cout << "samples " << ds.count() << "\n"
            << "hash " << hash << "\n"
            << "wrote " << out.string() << "\n";
  return 0;
}

// ---- tokenize

struct TokenizeArgs {
  std::string input;
  std::size_t sample = 0;
  int pad = 0;
};

int cmd_tokenize(const TokenizeArgs& a) {
  eqtok::TokenSequence seq;
  if (fs::path(a.input).extension() == ".json") {
    std::ifstream f(a.input);
    if (!f) throw std::runtime_error("cannot read " + a.input);
    const auto spec = io::spec_from_json(nlohmann::json::parse(f));
    seq = eqtok::tokenize_equation(spec, a.pad > 0 ? a.pad : eqtok::default_pad_length(spec.family));
  } else {
    const auto ds = io::Dataset::load(a.input);
    if (a.sample >= ds.count()) throw std::runtime_error("sample " + std::to_string(a.sample) + " out of range");
    const auto ids = ds.token_ids(a.sample);
    seq.ids.assign(ids.begin(), ids.end());
    seq.true_length = ds.token_length.at(a.sample);
  }
  std::cout << "length " << seq.ids.size() << " (" << seq.true_length << " before padding)\n";
  std::cout << "text " << eqtok::detokenize(seq) << "\n";
  std::cout << "ids";
  for (int i = 0; i < seq.true_length; ++i) std::cout << " " << seq.ids[static_cast<std::size_t>(i)];
  std::cout << "\n";
  return 0;
}

// ---- train

struct TrainArgs {
  std::string config, dataset, preset, out, seeds;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool overwrite = false;
};

train::Manifest resolve_manifest(const TrainArgs& a) {
  train::Manifest m;
  if (!a.config.empty() && !a.preset.empty()) throw UsageError("give either --config or --preset, not both");
  if (!a.config.empty()) {
    m = train::load_manifest(a.config);
  } else {
    if (a.preset.empty()) throw UsageError("train needs --config or --preset");
    m.config = train::preset(a.preset);
  }
  if (!a.dataset.empty()) m.dataset = a.dataset;
  if (!a.out.empty()) m.out = a.out;
  if (a.seed_set) m.config.seed = a.seed;
  if (!a.seeds.empty()) m.seeds = train::parse_seeds(a.seeds, m.config.seed);
  else if (a.seed_set && a.config.empty()) m.seeds = {a.seed};
  if (m.out.empty()) m.out = (output_root() / "runs" / train::benchmark_name(m.config) / m.config.model).string();
  m.validate();
  return m;
}

int cmd_train(const TrainArgs& a) {
  const auto m = resolve_manifest(a);
  const auto ds = io::Dataset::load(m.dataset);
  fs::create_directories(m.out);
  for (auto s : m.seeds) {
    const auto p = fs::path(m.out) / (m.config.model + "-seed" + std::to_string(s) + ".ckpt");
    if (fs::exists(p) && !a.overwrite) throw std::runtime_error(p.string() + " exists; pass --overwrite to replace it");
  }
  std::ofstream(fs::path(m.out) / "config.txt") << train::format_config(m.config);

  struct Row {
    std::uint64_t seed;
    int epoch = 0;
    double val = 0.0, mae = 0.0;
    bool diverged = false;
  };
  std::vector<Row> rows;
  for (auto s : m.seeds) {
    auto cfg = m.config;
    cfg.seed = s;
    std::cerr << cfg.model << " " << train::benchmark_name(cfg) << " seed " << s << "\n";
    const auto plan = train::plan_for(cfg, ds);
    try {
      const auto ck = train::train_model(cfg, plan, ds, [](const train::EpochRecord& r) {
        std::cerr << "  epoch " << r.epoch << "  train " << fmt(r.train_loss) << "  val " << fmt(r.val_loss)
                  << "  lr " << fmt(r.lr) << "  " << fmt(r.wall_seconds) << "s\n";
      });
      const auto p = fs::path(m.out) / (cfg.model + "-seed" + std::to_string(s) + ".ckpt");
      ck.save(p, true);
      rows.push_back({s, ck.epoch, ck.best_val, train::evaluate_mae(ck, plan, ds), false});
    } catch (const train::TrainDiverged& e) {
      std::cerr << "  " << e.what() << "\n";
      rows.push_back({s, e.epoch, e.last_finite_loss, 0.0, true});
    }
  }

  std::cout << "seed  best_epoch  val_loss    test_mae\n";
  std::vector<double> maes;
  bool diverged = false;
  for (const auto& r : rows) {
    char line[128];
    if (r.diverged)
      std::snprintf(line, sizeof line, "%-4llu  diverged at epoch %d\n", static_cast<unsigned long long>(r.seed), r.epoch);
    else
      std::snprintf(line, sizeof line, "%-4llu  %-10d  %-10.4g  %.4g\n", static_cast<unsigned long long>(r.seed), r.epoch,
                    r.val, r.mae);
    std::cout << line;
    if (r.diverged) diverged = true;
    else maes.push_back(r.mae);
  }
  if (!maes.empty()) {
    auto rec = eval::make_record(train::benchmark_name(m.config), m.config.model, maes);
    rec.flags["diverged"] = diverged;
    std::cout << "test MAE " << eval::format_mae(rec) << " over " << rec.n << " seed(s)\n";
    eval::MetricsDocument doc;
    doc.records.push_back(rec);
    doc.save(fs::path(m.out) / "metrics.json");
  }
  std::cout << "checkpoints in " << m.out << "\n";
  return diverged ? 1 : 0;
}

// ---- evaluate / rollout

struct EvalArgs {
  std::vector<std::string> checkpoints;
  std::string dataset, out;
};

fs::path eval_out(const EvalArgs& a, const std::string& leaf) {
  return a.out.empty() ? output_root() / leaf : fs::path(a.out);
}

int cmd_evaluate(const EvalArgs& a) {
  const auto ds = io::Dataset::load(a.dataset);
  eval::Report rep;
  for (auto& g : group_runs(load_checkpoints(a.checkpoints))) {
    rep.metrics.records.push_back(eval::evaluate_checkpoints(g, ds));
    if (g[0].kind == "pitt" && g[0].config.regime != train::Regime::steady_state)
      rep.decompositions.push_back(eval::decomposition_panel(g[0], ds));
    if (g[0].config.regime == train::Regime::steady_state) rep.error_maps.push_back(eval::error_map(g[0], ds));
  }
  std::cout << eval::mae_table(rep.metrics.records);
  for (const auto& f : eval::emit_report(rep, eval_out(a, "eval"))) std::cout << "wrote " << f.string() << "\n";
  return 0;
}

int cmd_rollout(const EvalArgs& a) {
  const auto ds = io::Dataset::load(a.dataset);
  eval::Report rep;
  for (auto& g : group_runs(load_checkpoints(a.checkpoints))) {
    const auto rec = eval::rollout_checkpoints(g, ds);
    std::cout << rec.benchmark << " " << rec.model << ": error at t = " << fmt(rec.rollout_curve->time.back())
              << " is " << eval::format_mae(rec) << (rec.flags.at("blowup") ? " (blow-ups)" : "") << "\n";
    rep.metrics.records.push_back(rec);
  }
  for (const auto& f : eval::emit_report(rep, eval_out(a, "rollout"))) std::cout << "wrote " << f.string() << "\n";
  return 0;
}

// ---- probe

struct ProbeArgs {
  std::string checkpoint, base, modified, dataset, out, name = "probe";
  std::size_t sample = 0;
  std::vector<std::string> set;
  int head = 0;
};

eqtok::EquationSpec read_spec(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  return io::spec_from_json(nlohmann::json::parse(f));
}

int cmd_probe(const ProbeArgs& a) {
  const auto ck = train::Checkpoint::load(a.checkpoint);
  const auto model = ck.model();
  const auto* pitt = dynamic_cast<const nn::Pitt*>(model.get());
  if (!pitt) throw std::runtime_error("probe needs a pitt checkpoint, got " + ck.kind);
  eqtok::EquationSpec base;
  if (!a.base.empty()) base = read_spec(a.base);
  else if (!a.dataset.empty()) base = io::Dataset::load(a.dataset).samples.at(a.sample).spec;
  else throw UsageError("probe needs --base or --dataset");
  eqtok::EquationSpec mod = a.modified.empty() ? base : read_spec(a.modified);
  if (!a.set.empty()) {
    auto j = io::spec_to_json(mod);
    for (const auto& kv : a.set) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
      const auto key = kv.substr(0, eq);
      if (!j.contains(key)) throw UsageError("--set: spec has no field '" + key + "'");
      j[key] = nlohmann::json::parse(kv.substr(eq + 1));
    }
    mod = io::spec_from_json(j);
  }
  const auto m = eval::probe_attention(*pitt, base, mod, a.head);
  std::size_t n = 0;
  for (bool b : eval::support(m)) n += b;
  std::cout << "max |dW| " << fmt(m.max()) << ", " << n << " of " << m.diff.size()
            << " entries within 10% of the maximum\n";
  eval::Report rep;
  rep.attention.push_back({a.name, m});
  for (const auto& f : eval::emit_report(rep, a.out.empty() ? output_root() / "probe" : fs::path(a.out)))
    std::cout << "wrote " << f.string() << "\n";
  return 0;
}

// ---- verify / report

int cmd_verify(const std::string& path) {
  const auto ds = io::Dataset::load(path);
  const auto problems = ds.verify();
  for (const auto& p : problems) std::cout << "FAIL " << p << "\n";
  if (!problems.empty()) return 1;
  std::cout << "ok: " << ds.count() << " " << eqtok::family_name(ds.family) << " samples, tokens padded to "
            << ds.pad_length << ", vocabulary " << ds.vocab_hash << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& docs, const std::string& out) {
  eval::Report rep;
  for (const auto& d : docs)
    for (auto& r : eval::MetricsDocument::load(d).records) rep.metrics.records.push_back(std::move(r));
  std::cout << eval::mae_table(rep.metrics.records);
  for (const auto& f : eval::emit_report(rep, out.empty() ? output_root() / "report" : fs::path(out)))
    std::cout << "wrote " << f.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PDE surrogate toolkit: generate data, train PITT / FNO models, evaluate and report"};
  app.require_subcommand(1);
  int status = 0;

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Generate a dataset container");
  gen->add_option("family", ga.family, "heat | burgers | kdv | navier_stokes | poisson")->required();
  gen->add_option("--preset", ga.preset, "paper | desk (navier_stokes also paper-ff | desk-ff)")->capture_default_str();
  gen->add_option("--seed", ga.seed, "Base seed")->capture_default_str();
  gen->add_option("--out", ga.out, "Output file (default under the output root)");
  gen->add_flag("--overwrite", ga.overwrite, "Replace an existing file");
  gen->callback([&] { status = cmd_generate(ga); });

  TokenizeArgs ta;
  auto* tok = app.add_subcommand("tokenize", "Show the token sequence of a spec JSON file or a stored sample");
  tok->add_option("input", ta.input, "spec .json file or dataset container")->required();
  tok->add_option("--sample", ta.sample, "Sample index in a container");
  tok->add_option("--pad", ta.pad, "Padded length (default by family)");
  tok->callback([&] { status = cmd_tokenize(ta); });

  TrainArgs tr;
  auto* trn = app.add_subcommand("train", "Train one model per seed");
  trn->add_option("dataset", tr.dataset, "Dataset container (overrides the manifest)");
  trn->add_option("--config", tr.config, "Manifest: dataset, seeds, out and config keys");
  trn->add_option("--preset", tr.preset, "Training preset, e.g. pitt-heat-desk");
  auto* seed_opt = trn->add_option("--seed", tr.seed, "Seed (first seed when --seeds is a count)");
  trn->add_option("--seeds", tr.seeds, "Seed count or comma list (default 5)");
  trn->add_option("--out", tr.out, "Checkpoint directory");
  trn->add_flag("--overwrite", tr.overwrite, "Replace existing checkpoints");
  trn->callback([&] {
    tr.seed_set = seed_opt->count() > 0;
    status = cmd_train(tr);
  });

  EvalArgs ea, ra;
  auto* ev = app.add_subcommand("evaluate", "Test MAE table for checkpoints");
  ev->add_option("checkpoints", ea.checkpoints, "Checkpoint files")->required();
  ev->add_option("--dataset", ea.dataset, "Dataset the checkpoints were trained on")->required();
  ev->add_option("--out", ea.out, "Report directory");
  ev->callback([&] { status = cmd_evaluate(ea); });

  auto* ro = app.add_subcommand("rollout", "Autoregressive rollout over the test trajectories");
  ro->add_option("checkpoints", ra.checkpoints, "Checkpoint files")->required();
  ro->add_option("--dataset", ra.dataset, "Dataset the checkpoints were trained on")->required();
  ro->add_option("--out", ra.out, "Report directory");
  ro->callback([&] { status = cmd_rollout(ra); });

  ProbeArgs pa;
  auto* pr = app.add_subcommand("probe", "Attention-weight difference between two equations");
  pr->add_option("checkpoint", pa.checkpoint, "PITT checkpoint")->required();
  pr->add_option("--base", pa.base, "Base spec .json");
  pr->add_option("--dataset", pa.dataset, "Take the base spec from a container instead");
  pr->add_option("--sample", pa.sample, "Sample index for --dataset");
  pr->add_option("--modified", pa.modified, "Modified spec .json (default: the base)");
  pr->add_option("--set", pa.set, "Edit a field of the modified spec, e.g. nu=1e-9 (repeatable)");
  pr->add_option("--head", pa.head, "Attention head");
  pr->add_option("--name", pa.name, "Label for the output image");
  pr->add_option("--out", pa.out, "Report directory");
  pr->callback([&] { status = cmd_probe(pa); });

  std::string verify_path;
  auto* ver = app.add_subcommand("verify", "Recheck a container's invariants");
  ver->add_option("dataset", verify_path, "Dataset container")->required();
  ver->callback([&] { status = cmd_verify(verify_path); });

  std::vector<std::string> docs;
  std::string report_out;
  auto* rpt = app.add_subcommand("report", "Merge metrics documents into one report");
  rpt->add_option("metrics", docs, "metrics.json files")->required();
  rpt->add_option("--out", report_out, "Report directory");
  rpt->callback([&] { status = cmd_report(docs, report_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return status;
}
