#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pitt/pde/datasets.hpp"

namespace pitt::pde {

/// Named generation sizes per family: "paper" (full benchmark sizes) and "desk"
/// (a few hundred trajectories that train on one CPU). Navier-Stokes also has
/// "paper-ff" / "desk-ff" with several initial fields per (nu, A) combination.
std::vector<std::string> generation_presets(eqtok::Family family);

/// Number of samples the preset produces.
std::size_t preset_count(eqtok::Family family, const std::string& preset);

/// Throws std::invalid_argument naming the preset when it is unknown for the family.
io::Dataset generate_preset(eqtok::Family family, const std::string& preset, std::uint64_t seed,
                            const GenerationLog& log = {});

}  // namespace pitt::pde
