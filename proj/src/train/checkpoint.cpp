#include "pitt/train/checkpoint.hpp"

#include <stdexcept>

namespace pitt::train {

using nlohmann::json;

void Checkpoint::capture(const nn::Model& m) {
  weights.clear();
  for (const auto& [name, p] : m.params().items()) weights.emplace_back(name, p.value());
}

std::unique_ptr<nn::Model> Checkpoint::model() const {
  auto m = nn::make_model(kind, model_config, 0);
  const auto& items = m->params().items();
  if (items.size() != weights.size()) throw std::runtime_error("checkpoint: parameter count does not match the model");
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto p = items[i].second;
    if (items[i].first != weights[i].first || p.value().shape != weights[i].second.shape) {
      throw std::runtime_error("checkpoint: parameter '" + weights[i].first + "' does not match the model");
    }
    p.mutable_value() = weights[i].second;
  }
  return m;
}

io::Container Checkpoint::to_container() const {
  io::Container c;
  json log_j = json::array();
  for (const auto& r : log) {
    log_j.push_back({{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"val_loss", r.val_loss}, {"lr", r.lr},
                     {"wall_seconds", r.wall_seconds}});
  }
  json names = json::array();
  for (const auto& [name, t] : weights) names.push_back(name);
  c.meta = {{"kind", "checkpoint"},
            {"model", kind},
            {"model_config", model_config},
            {"train_config", config.to_json()},
            {"layout", {{"grid", layout.grid}, {"in_channels", layout.in_channels}}},
            {"normalizer", norm.to_json()},
            {"dataset_hash", dataset_hash},
            {"epoch", epoch},
            {"best_val_loss", best_val},
            {"rng_state", rng_state},
            {"log", log_j},
            {"parameters", names}};
  for (const auto& [name, t] : weights) c.put<double>("w/" + name, t.shape, t.data);
  return c;
}

Checkpoint Checkpoint::from_container(const io::Container& c) {
  const auto& m = c.meta;
  if (m.value("kind", "") != "checkpoint") throw io::FormatError("container is not a checkpoint");
  Checkpoint k;
  k.kind = m.at("model").get<std::string>();
  k.model_config = m.at("model_config");
  k.config = TrainConfig::from_json(m.at("train_config"));
  k.layout.grid = m.at("layout").at("grid").get<std::vector<int>>();
  k.layout.in_channels = m.at("layout").at("in_channels").get<int>();
  k.norm = Normalizer::from_json(m.at("normalizer"));
  k.dataset_hash = m.at("dataset_hash").get<std::string>();
  k.epoch = m.at("epoch").get<int>();
  k.best_val = m.at("best_val_loss").is_null() ? std::numeric_limits<double>::infinity()
                                                : m.at("best_val_loss").get<double>();
  k.rng_state = m.at("rng_state").get<std::string>();
  for (const auto& r : m.at("log")) {
    k.log.push_back({r.at("epoch").get<int>(), r.at("train_loss").get<double>(), r.at("val_loss").get<double>(),
                     r.at("lr").get<double>(), r.at("wall_seconds").get<double>()});
  }
  for (const auto& name : m.at("parameters")) {
    const auto n = name.get<std::string>();
    nn::Tensor t(c.shape("w/" + n));
    t.data = c.get<double>("w/" + n);
    k.weights.emplace_back(n, std::move(t));
  }
  return k;
}

std::string Checkpoint::save(const std::filesystem::path& path, bool overwrite) const {
  return to_container().save(path, overwrite);
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) { return from_container(io::Container::load(path)); }

}  // namespace pitt::train
