#pragma once

#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "pitt/io/container.hpp"
#include "pitt/nn/models.hpp"
#include "pitt/train/config.hpp"
#include "pitt/train/data.hpp"

namespace pitt::train {

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
  double wall_seconds = 0.0;
};

/// Trained weights plus everything needed to rebuild and evaluate the model.
struct Checkpoint {
  TrainConfig config;
  std::string kind;  // pitt | fno
  nlohmann::json model_config;
  Layout layout;
  Normalizer norm;
  std::string dataset_hash;
  std::vector<std::pair<std::string, nn::Tensor>> weights;
  int epoch = 0;  // epoch the weights come from
  double best_val = std::numeric_limits<double>::infinity();
  std::string rng_state;
  std::vector<EpochRecord> log;

  void capture(const nn::Model& m);
  std::unique_ptr<nn::Model> model() const;

  io::Container to_container() const;
  static Checkpoint from_container(const io::Container& c);
  std::string save(const std::filesystem::path& path, bool overwrite = false) const;
  static Checkpoint load(const std::filesystem::path& path);
};

}  // namespace pitt::train
