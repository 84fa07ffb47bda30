#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pitt/eqtok/equation_spec.hpp"

namespace pitt::train {

enum class Regime { next_step_1d, next_step_2d, fixed_future, steady_state };
enum class SplitKey { equation_level, random, initial_condition_level };
enum class Schedule { one_cycle, step };

std::string to_string(Regime r);
std::string to_string(SplitKey k);
std::string to_string(Schedule s);
Regime parse_regime(const std::string& s);
SplitKey parse_split_key(const std::string& s);
Schedule parse_schedule(const std::string& s);

struct TrainConfig {
  std::string preset;
  eqtok::Family family = eqtok::Family::heat;
  Regime regime = Regime::next_step_1d;
  std::string model = "pitt";  // pitt | fno

  int batch_size = 32;
  double learning_rate = 1e-3;
  double weight_decay = 0.0;
  double dropout = 0.0;
  Schedule schedule = Schedule::one_cycle;
  int scheduler_step = 0;
  double scheduler_gamma = 1.0;
  int epochs = 1;

  int hidden = 64;  // PITT latent width; the FNO width for FNO rows
  int layers = 1;
  int heads = 1;
  std::vector<int> modes{8};
  int width = 0;  // PITT backbone width, 0 = hidden
  int proj_width = 128;
  int blocks = 6;

  double target_time = 20.0;  // fixed-future only
  SplitKey split = SplitKey::equation_level;
  double train_fraction = 0.6;
  double val_fraction = 0.2;
  int windows_per_sample = 0;      // training windows drawn per sample each epoch, 0 = all
  int val_windows_per_sample = 0;  // fixed validation subset per sample, 0 = all
  std::uint64_t seed = 0;

  void validate() const;
  // Flat key = value view, in a fixed key order.
  std::vector<std::pair<std::string, std::string>> items() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

/// Every shipped preset, keyed by name.
const std::map<std::string, TrainConfig>& presets();
TrainConfig preset(const std::string& name);

/// Applies one key = value override; unknown keys throw naming the key.
void set_key(TrainConfig& c, const std::string& key, const std::string& value);

/// Splits flat "key = value" text into pairs, in file order ('#' starts a comment).
std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text);
/// Applies a "preset" pair first, then every other pair, then validates.
TrainConfig config_from_keys(const std::vector<std::pair<std::string, std::string>>& kv);

/// Parses flat "key = value" text ('#' starts a comment). A "preset" key, if present,
/// is applied first and the remaining keys override it.
TrainConfig parse_config(const std::string& text);
TrainConfig load_config(const std::string& path);
std::string format_config(const TrainConfig& c);

}  // namespace pitt::train
