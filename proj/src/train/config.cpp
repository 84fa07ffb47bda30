#include "pitt/train/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pitt::train {

using eqtok::Family;

namespace {

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': not a number: '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw std::invalid_argument("config key '" + key + "': not an integer: '" + v + "'");
  }
  return out;
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(static_cast<int>(to_int(key, trim(part))));
  return out;
}

struct TrainRow {
  int batch;
  double lr, wd, dropout;
  int step;
  double gamma;
};

struct ModelRow {
  int hidden, layers, heads;
  std::vector<int> modes;
};

TrainConfig row(const std::string& name, Family fam, Regime regime, const std::string& model, int epochs,
                const TrainRow& t, const ModelRow& m) {
  TrainConfig c;
  c.preset = name;
  c.family = fam;
  c.regime = regime;
  c.model = model;
  c.batch_size = t.batch;
  c.learning_rate = t.lr;
  c.weight_decay = t.wd;
  c.dropout = t.dropout;
  c.schedule = model == "pitt" ? Schedule::one_cycle : Schedule::step;
  c.scheduler_step = t.step;
  c.scheduler_gamma = t.gamma;
  c.epochs = epochs;
  c.hidden = m.hidden;
  c.layers = m.layers;
  c.heads = m.heads;
  c.modes = m.modes;
  switch (regime) {
    case Regime::next_step_1d:
    case Regime::next_step_2d:
      c.split = SplitKey::equation_level;
      break;
    case Regime::fixed_future:
      c.split = SplitKey::initial_condition_level;
      break;
    case Regime::steady_state:
      c.split = SplitKey::random;
      break;
  }
  return c;
}

std::map<std::string, TrainConfig> build_presets() {
  std::map<std::string, TrainConfig> p;
  auto add = [&](TrainConfig c) { p.emplace(c.preset, std::move(c)); };

  // 1D next-step, 200 epochs.
  const std::pair<const char*, Family> fams[] = {{"heat", Family::heat}, {"burgers", Family::burgers}, {"kdv", Family::kdv}};
  for (auto [n, f] : fams) {
    const bool kdv = f == Family::kdv;
    add(row(std::string("pitt-") + n, f, Regime::next_step_1d, "pitt", 200,
            kdv ? TrainRow{256, 1e-3, 1e-2, 0.5, 0, 1.0} : TrainRow{128, 1e-3, 1e-5, 0.05, 0, 1.0}, {64, 1, 1, {4}}));
    add(row(std::string("fno-") + n, f, Regime::next_step_1d, "fno", 200,
            TrainRow{kdv ? 4 : 32, 1e-3, 1e-8, 0.1, 50, 0.5}, {256, 0, 0, {8}}));
  }

  // Navier-Stokes next-step, 100 epochs.
  add(row("pitt-ns-next", Family::navier_stokes, Regime::next_step_2d, "pitt", 100, {8, 1e-4, 0.0, 0.0, 0, 1.0},
          {32, 8, 4, {8, 8}}));
  add(row("fno-ns-next", Family::navier_stokes, Regime::next_step_2d, "fno", 100, {8, 1e-4, 1e-5, 0.0, 10, 0.5},
          {64, 0, 0, {8, 8}}));

  // Navier-Stokes fixed-future, 200 epochs.
  for (int T : {20, 30}) {
    const std::string s = std::to_string(T);
    auto a = row("pitt-ns-ff" + s, Family::navier_stokes, Regime::fixed_future, "pitt", 200,
                 {16, 1e-2, 1e-5, 0.0, 0, 1.0}, {16, 20, 4, {4, 4}});
    auto b = row("fno-ns-ff" + s, Family::navier_stokes, Regime::fixed_future, "fno", 200,
                 {8, 1e-3, 1e-5, 0.0, 40, 0.5}, {32, 0, 0, {6, 6}});
    a.target_time = b.target_time = T;
    add(a);
    add(b);
  }

  // Poisson steady state, 1000 epochs.
  add(row("pitt-poisson", Family::poisson, Regime::steady_state, "pitt", 1000, {128, 1e-3, 0.0, 0.05, 0, 1.0},
          {64, 8, 8, {8, 8}}));
  add(row("fno-poisson", Family::poisson, Regime::steady_state, "fno", 1000, {128, 1e-3, 1e-7, 0.1, 200, 0.5},
          {128, 0, 0, {8, 8}}));

  // Desk scale: same optimizer settings, narrower networks, fewer epochs, windows subsampled.
  auto desk = [&](const std::string& base, auto&& tweak) {
    TrainConfig c = p.at(base);
    c.preset = base + "-desk";
    tweak(c);
    add(c);
  };
  for (const char* n : {"heat", "burgers", "kdv"}) {
    desk(std::string("pitt-") + n, [](TrainConfig& c) {
      c.batch_size = 32;
      c.hidden = 32;
      c.proj_width = 64;
      c.epochs = 50;
      c.windows_per_sample = 8;
      c.val_windows_per_sample = 8;
    });
    desk(std::string("fno-") + n, [](TrainConfig& c) {
      c.batch_size = 32;
      c.hidden = 64;
      c.proj_width = 64;
      c.epochs = 50;
      c.scheduler_step = 13;
      c.windows_per_sample = 8;
      c.val_windows_per_sample = 8;
    });
  }
  desk("pitt-ns-next", [](TrainConfig& c) {
    c.hidden = 16;
    c.layers = 2;
    c.modes = {8, 8};
    c.proj_width = 32;
    c.epochs = 10;
    c.learning_rate = 1e-3;
    c.windows_per_sample = 12;
    c.val_windows_per_sample = 12;
  });
  desk("fno-ns-next", [](TrainConfig& c) {
    c.hidden = 16;
    c.proj_width = 32;
    c.epochs = 10;
    c.learning_rate = 1e-3;
    c.scheduler_step = 3;
    c.windows_per_sample = 12;
    c.val_windows_per_sample = 12;
  });
  for (const char* T : {"20", "30"}) {
    desk(std::string("pitt-ns-ff") + T, [](TrainConfig& c) {
      c.hidden = 16;
      c.layers = 4;
      c.proj_width = 32;
      c.epochs = 40;
    });
    desk(std::string("fno-ns-ff") + T, [](TrainConfig& c) {
      c.hidden = 16;
      c.proj_width = 32;
      c.epochs = 40;
      c.scheduler_step = 8;
    });
  }
  desk("pitt-poisson", [](TrainConfig& c) {
    c.batch_size = 16;
    c.hidden = 16;
    c.layers = 2;
    c.heads = 2;
    c.proj_width = 32;
    c.blocks = 4;
    c.epochs = 15;
  });
  desk("fno-poisson", [](TrainConfig& c) {
    c.batch_size = 16;
    c.hidden = 32;
    c.proj_width = 32;
    c.blocks = 4;
    c.epochs = 15;
    c.scheduler_step = 3;
  });
  return p;
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::next_step_1d: return "next_step_1d";
    case Regime::next_step_2d: return "next_step_2d";
    case Regime::fixed_future: return "fixed_future";
    case Regime::steady_state: return "steady_state";
  }
  return "?";
}

std::string to_string(SplitKey k) {
  switch (k) {
    case SplitKey::equation_level: return "equation_level";
    case SplitKey::random: return "random";
    case SplitKey::initial_condition_level: return "initial_condition_level";
  }
  return "?";
}

std::string to_string(Schedule s) { return s == Schedule::one_cycle ? "one_cycle" : "step"; }

Regime parse_regime(const std::string& s) {
  for (auto r : {Regime::next_step_1d, Regime::next_step_2d, Regime::fixed_future, Regime::steady_state})
    if (to_string(r) == s) return r;
  throw std::invalid_argument("unknown regime '" + s + "'");
}

SplitKey parse_split_key(const std::string& s) {
  for (auto k : {SplitKey::equation_level, SplitKey::random, SplitKey::initial_condition_level})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown split key '" + s + "'");
}

Schedule parse_schedule(const std::string& s) {
  if (s == "one_cycle") return Schedule::one_cycle;
  if (s == "step") return Schedule::step;
  throw std::invalid_argument("unknown schedule '" + s + "'");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("invalid training config: " + m); };
  if (model != "pitt" && model != "fno") fail("model must be pitt or fno");
  const bool one_d = eqtok::is_1d(family);
  if ((regime == Regime::next_step_1d) != one_d) fail("regime " + to_string(regime) + " does not fit the family");
  if ((regime == Regime::steady_state) != (family == Family::poisson)) fail("steady_state is the Poisson regime");
  if (batch_size < 1 || epochs < 1) fail("batch_size and epochs must be positive");
  if (!(learning_rate > 0.0) || weight_decay < 0.0) fail("learning_rate must be positive, weight_decay nonnegative");
  if (dropout < 0.0 || dropout >= 1.0) fail("dropout must be in [0, 1)");
  if (schedule == Schedule::step && (scheduler_step < 1 || !(scheduler_gamma > 0.0))) fail("step schedule needs step >= 1, gamma > 0");
  if (hidden < 1 || proj_width < 1 || blocks < 1 || width < 0) fail("widths must be positive");
  if (model == "pitt" && (layers < 1 || heads < 1 || hidden % heads != 0)) fail("pitt needs layers >= 1 and heads dividing hidden");
  const std::size_t rank = one_d ? 1 : 2;
  if (modes.size() != rank) fail("modes must have one entry per spatial axis");
  for (int m : modes)
    if (m < 1) fail("modes must be positive");
  if (regime == Regime::fixed_future && !(target_time > 10.0)) fail("fixed-future target time must exceed 10");
  if (!(train_fraction > 0.0) || val_fraction < 0.0 || train_fraction + val_fraction >= 1.0) fail("split fractions");
  if (windows_per_sample < 0 || val_windows_per_sample < 0) fail("window counts must be nonnegative");
}

std::vector<std::pair<std::string, std::string>> TrainConfig::items() const {
  std::string m;
  for (std::size_t i = 0; i < modes.size(); ++i) m += (i ? "," : "") + std::to_string(modes[i]);
  return {{"preset", preset},
          {"family", std::string(eqtok::family_name(family))},
          {"regime", to_string(regime)},
          {"model", model},
          {"batch_size", std::to_string(batch_size)},
          {"learning_rate", fmt(learning_rate)},
          {"weight_decay", fmt(weight_decay)},
          {"dropout", fmt(dropout)},
          {"schedule", to_string(schedule)},
          {"scheduler_step", std::to_string(scheduler_step)},
          {"scheduler_gamma", fmt(scheduler_gamma)},
          {"epochs", std::to_string(epochs)},
          {"hidden", std::to_string(hidden)},
          {"layers", std::to_string(layers)},
          {"heads", std::to_string(heads)},
          {"modes", m},
          {"width", std::to_string(width)},
          {"proj_width", std::to_string(proj_width)},
          {"blocks", std::to_string(blocks)},
          {"target_time", fmt(target_time)},
          {"split", to_string(split)},
          {"train_fraction", fmt(train_fraction)},
          {"val_fraction", fmt(val_fraction)},
          {"windows_per_sample", std::to_string(windows_per_sample)},
          {"val_windows_per_sample", std::to_string(val_windows_per_sample)},
          {"seed", std::to_string(seed)}};
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : items()) j[k] = v;
  return j;
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  for (const auto& [k, v] : j.items()) set_key(c, k, v.get<std::string>());
  c.validate();
  return c;
}

const std::map<std::string, TrainConfig>& presets() {
  static const auto p = build_presets();
  return p;
}

TrainConfig preset(const std::string& name) {
  const auto& p = presets();
  auto it = p.find(name);
  if (it == p.end()) throw std::invalid_argument("unknown preset '" + name + "'");
  return it->second;
}

void set_key(TrainConfig& c, const std::string& key, const std::string& value) {
  const std::string& v = value;
  if (key == "preset") c.preset = v;
  else if (key == "family") c.family = eqtok::parse_family(v);
  else if (key == "regime") c.regime = parse_regime(v);
  else if (key == "model") c.model = v;
  else if (key == "batch_size") c.batch_size = static_cast<int>(to_int(key, v));
  else if (key == "learning_rate") c.learning_rate = to_double(key, v);
  else if (key == "weight_decay") c.weight_decay = to_double(key, v);
  else if (key == "dropout") c.dropout = to_double(key, v);
  else if (key == "schedule") c.schedule = parse_schedule(v);
  else if (key == "scheduler_step") c.scheduler_step = static_cast<int>(to_int(key, v));
  else if (key == "scheduler_gamma") c.scheduler_gamma = to_double(key, v);
  else if (key == "epochs") c.epochs = static_cast<int>(to_int(key, v));
  else if (key == "hidden") c.hidden = static_cast<int>(to_int(key, v));
  else if (key == "layers") c.layers = static_cast<int>(to_int(key, v));
  else if (key == "heads") c.heads = static_cast<int>(to_int(key, v));
  else if (key == "modes") c.modes = to_int_list(key, v);
  else if (key == "width") c.width = static_cast<int>(to_int(key, v));
  else if (key == "proj_width") c.proj_width = static_cast<int>(to_int(key, v));
  else if (key == "blocks") c.blocks = static_cast<int>(to_int(key, v));
  else if (key == "target_time") c.target_time = to_double(key, v);
  else if (key == "split") c.split = parse_split_key(v);
  else if (key == "train_fraction") c.train_fraction = to_double(key, v);
  else if (key == "val_fraction") c.val_fraction = to_double(key, v);
  else if (key == "windows_per_sample") c.windows_per_sample = static_cast<int>(to_int(key, v));
  else if (key == "val_windows_per_sample") c.val_windows_per_sample = static_cast<int>(to_int(key, v));
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_int(key, v));
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

TrainConfig config_from_keys(const std::vector<std::pair<std::string, std::string>>& kv) {
  TrainConfig c;
  for (const auto& [k, v] : kv)
    if (k == "preset" && !v.empty()) c = preset(v);
  for (const auto& [k, v] : kv)
    if (k != "preset") set_key(c, k, v);
  c.validate();
  return c;
}

TrainConfig parse_config(const std::string& text) { return config_from_keys(parse_key_values(text)); }

TrainConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const TrainConfig& c) {
  std::string out;
  for (const auto& [k, v] : c.items()) out += k + " = " + v + "\n";
  return out;
}

}  // namespace pitt::train
