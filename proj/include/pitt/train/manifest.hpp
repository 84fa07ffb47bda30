#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pitt/train/config.hpp"

namespace pitt::train {

/// One training experiment: a dataset, a configuration and the seeds to run it with.
/// Text form is the config format plus three keys: dataset, seeds and out.
struct Manifest {
  std::string dataset;
  TrainConfig config;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::string out;  // empty = default output directory

  void validate() const;
};

/// "5" means five seeds starting at `base`; "3,8,9" is an explicit list.
std::vector<std::uint64_t> parse_seeds(const std::string& text, std::uint64_t base = 0);

Manifest parse_manifest(const std::string& text);
Manifest load_manifest(const std::filesystem::path& path);

/// Short benchmark label: the family for 1D and Poisson, "ns-next" / "ns-ff20" for Navier-Stokes.
std::string benchmark_name(const TrainConfig& c);

}  // namespace pitt::train
