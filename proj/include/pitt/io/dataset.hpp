#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pitt/eqtok/equation_spec.hpp"
#include "pitt/io/container.hpp"

namespace pitt::io {

struct SampleMeta {
  eqtok::EquationSpec spec;
  std::uint64_t seed = 0;
  // Samples sharing an equation_group share the equation (and forcing); samples sharing
  // an init_group share the initial condition.
  std::int64_t equation_group = 0;
  std::int64_t init_group = 0;
  int resamples = 0;  // solver blow-ups rejected before this sample was accepted
};

/// Generated samples of one family, stored as stacked float32 fields plus int32 tokens.
///   1D:      u [count, frames, nx], grid_x [nx], grid_t [frames]
///   NS:      u [count, frames, n, n], grid_x = grid_y [n], grid_t [frames]
///   Poisson: input, u (target) [count, ny, nx], grid_x [nx], grid_y [ny]
struct Dataset {
  eqtok::Family family = eqtok::Family::heat;
  int pad_length = 0;
  std::string vocab_hash;
  std::uint64_t base_seed = 0;
  nlohmann::json generation = nlohmann::json::object();  // solver / sampler settings

  std::vector<std::int64_t> sample_shape;
  std::vector<float> u;
  std::vector<float> input;
  std::vector<float> grid_x, grid_y, grid_t;
  std::vector<std::int32_t> tokens;
  std::vector<std::int32_t> token_length;
  std::vector<SampleMeta> samples;

  std::size_t count() const { return samples.size(); }
  std::size_t sample_size() const;
  std::span<const float> field(std::size_t i) const;
  std::span<const float> input_field(std::size_t i) const;
  std::span<const std::int32_t> token_ids(std::size_t i) const;
  bool steady() const { return family == eqtok::Family::poisson; }

  Container to_container() const;
  static Dataset from_container(const Container& c);
  std::string save(const std::filesystem::path& path, bool overwrite = false) const;
  static Dataset load(const std::filesystem::path& path);
  std::string content_hash() const { return to_container().content_hash(); }

  /// Recomputes container invariants; returns one message per violation.
  std::vector<std::string> verify() const;
};

}  // namespace pitt::io
