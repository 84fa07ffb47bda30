#include "pitt/eqtok/equation_spec.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pitt::eqtok {

std::string_view family_name(Family f) {
  switch (f) {
    case Family::heat: return "heat";
    case Family::burgers: return "burgers";
    case Family::kdv: return "kdv";
    case Family::navier_stokes: return "ns";
    case Family::poisson: return "poisson";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "heat") return Family::heat;
  if (name == "burgers") return Family::burgers;
  if (name == "kdv") return Family::kdv;
  if (name == "ns" || name == "navier_stokes") return Family::navier_stokes;
  if (name == "poisson") return Family::poisson;
  throw std::invalid_argument("unknown equation family '" + std::string(name) + "'");
}

bool is_1d(Family f) { return f == Family::heat || f == Family::burgers || f == Family::kdv; }

void ForcingParams::validate() const {
  const auto n = static_cast<std::size_t>(terms);
  if (terms < 1 || amplitude.size() != n || omega.size() != n || wavenumber.size() != n ||
      phase.size() != n) {
    throw std::invalid_argument("forcing: every parameter list must hold J entries");
  }
  if (!(domain_length > 0.0)) throw std::invalid_argument("forcing: domain length must be positive");
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(amplitude[j]) > 0.25) throw std::invalid_argument("forcing: |A_j| > 0.25");
    if (std::abs(omega[j]) > 0.4) throw std::invalid_argument("forcing: |omega_j| > 0.4");
    if (wavenumber[j] < 1 || wavenumber[j] > 3) throw std::invalid_argument("forcing: l_j not in {1,2,3}");
    if (phase[j] < 0.0 || phase[j] >= 2.0 * std::numbers::pi) {
      throw std::invalid_argument("forcing: phi_j outside [0, 2 pi)");
    }
  }
}

ForcingParams ForcingParams::zero(int terms, double domain_length) {
  ForcingParams p;
  p.terms = terms;
  p.domain_length = domain_length;
  const auto n = static_cast<std::size_t>(terms);
  p.amplitude.assign(n, 0.0);
  p.omega.assign(n, 0.0);
  p.wavenumber.assign(n, 1);
  p.phase.assign(n, 0.0);
  return p;
}

void EquationSpec::validate() const {
  if (!(target_time >= 0.0) || !std::isfinite(target_time)) {
    throw std::invalid_argument("spec: target_time must be finite and >= 0");
  }
  const bool has_1d = alpha != 0.0 || beta != 0.0 || gamma != 0.0 || forcing.has_value();
  const bool has_ns = nu != 0.0 || amp != 0.0;
  bool has_poisson = !plates.empty();
  for (const auto& e : edges) has_poisson = has_poisson || e.kind != BoundaryKind::dirichlet || e.value != 0.0;

  if (is_1d(family)) {
    if (has_ns || has_poisson) throw std::invalid_argument("spec: 1D spec carries 2D fields");
    if (!forcing) throw std::invalid_argument("spec: 1D spec needs forcing parameters");
    forcing->validate();
    if (beta < 0.0 || gamma < 0.0) throw std::invalid_argument("spec: beta and gamma must be >= 0");
  } else if (family == Family::navier_stokes) {
    if (has_1d || has_poisson) throw std::invalid_argument("spec: NS spec carries foreign fields");
    if (!(nu > 0.0)) throw std::invalid_argument("spec: NS viscosity must be positive");
  } else {
    if (has_1d || has_ns) throw std::invalid_argument("spec: Poisson spec carries foreign fields");
    if (target_time != kPoissonSentinelTime) {
      throw std::invalid_argument("spec: Poisson target time must be the sentinel 1");
    }
  }
}

}  // namespace pitt::eqtok
