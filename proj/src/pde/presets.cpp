#include "pitt/pde/presets.hpp"

#include <stdexcept>

namespace pitt::pde {

using eqtok::Family;

namespace {

// 1D trajectories per (alpha, beta, gamma) combination
int per_combo_1d(Family f, const std::string& preset) {
  if (preset == "paper") return f == Family::heat ? 10000 : 2500;
  if (preset == "desk") return f == Family::burgers ? 20 : 100;
  return 0;
}

DatasetNSOptions ns_options(const std::string& preset) {
  DatasetNSOptions o;
  if (preset == "paper" || preset == "paper-ff") {
    o.inits_per_combo = preset == "paper" ? 1 : 5;
  } else if (preset == "desk" || preset == "desk-ff") {
    // coarser simulation and saved grid; the full (nu, A) grid is kept
    o.solver.n = 64;
    o.solver.save_n = 32;
    o.inits_per_combo = preset == "desk" ? 1 : 2;
  } else {
    throw std::invalid_argument("unknown generation preset '" + preset + "' for navier_stokes");
  }
  return o;
}

}  // namespace

std::vector<std::string> generation_presets(Family family) {
  if (family == Family::navier_stokes) return {"paper", "desk", "paper-ff", "desk-ff"};
  return {"paper", "desk"};
}

std::size_t preset_count(Family family, const std::string& preset) {
  if (eqtok::is_1d(family)) {
    const int k = per_combo_1d(family, preset);
    if (k == 0) throw std::invalid_argument("unknown generation preset '" + preset + "' for " + std::string(eqtok::family_name(family)));
    return static_cast<std::size_t>(k) * paper_parameter_grid(family).size();
  }
  if (family == Family::navier_stokes) {
    const auto o = ns_options(preset);
    return paper_viscosities().size() * paper_amplitudes().size() * static_cast<std::size_t>(o.inits_per_combo);
  }
  if (preset == "paper") return 5000;
  if (preset == "desk") return 1000;
  throw std::invalid_argument("unknown generation preset '" + preset + "' for poisson");
}

io::Dataset generate_preset(Family family, const std::string& preset, std::uint64_t seed, const GenerationLog& log) {
  const auto count = preset_count(family, preset);
  if (eqtok::is_1d(family)) {
    Dataset1DOptions o;
    o.family = family;
    o.count_per_combo = per_combo_1d(family, preset);
    o.seed = seed;
    return make_dataset_1d(o, log);
  }
  if (family == Family::navier_stokes) {
    auto o = ns_options(preset);
    o.seed = seed;
    return make_dataset_ns(o, log);
  }
  DatasetPoissonOptions o;
  o.count = static_cast<int>(count);
  o.seed = seed;
  return make_dataset_poisson(o, log);
}

}  // namespace pitt::pde
