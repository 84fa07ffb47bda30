#pragma once

#include <json.hpp>

#include "pitt/eqtok/equation_spec.hpp"

namespace pitt::io {

/// Only the fields belonging to the equation's family are written.
nlohmann::json spec_to_json(const eqtok::EquationSpec& spec);
/// Throws std::invalid_argument for malformed or inconsistent input.
eqtok::EquationSpec spec_from_json(const nlohmann::json& j);

}  // namespace pitt::io
