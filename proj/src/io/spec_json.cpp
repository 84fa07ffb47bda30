#include "pitt/io/spec_json.hpp"

#include <stdexcept>
#include <string>

namespace pitt::io {

using eqtok::BoundaryKind;
using eqtok::EquationSpec;
using eqtok::Family;
using nlohmann::json;

json spec_to_json(const EquationSpec& s) {
  json j = {{"family", eqtok::family_name(s.family)}, {"target_time", s.target_time}};
  switch (s.family) {
    case Family::heat:
    case Family::burgers:
    case Family::kdv:
      j["alpha"] = s.alpha;
      j["beta"] = s.beta;
      j["gamma"] = s.gamma;
      if (s.forcing) {
        const auto& f = *s.forcing;
        j["forcing"] = {{"terms", f.terms},         {"domain_length", f.domain_length}, {"amplitude", f.amplitude},
                        {"omega", f.omega},         {"wavenumber", f.wavenumber},       {"phase", f.phase}};
      }
      break;
    case Family::navier_stokes:
      j["nu"] = s.nu;
      j["amp"] = s.amp;
      break;
    case Family::poisson: {
      json edges = json::array();
      for (const auto& e : s.edges) {
        edges.push_back({{"kind", e.kind == BoundaryKind::neumann ? "neumann" : "dirichlet"}, {"value", e.value}});
      }
      json plates = json::array();
      for (const auto& p : s.plates) {
        plates.push_back({{"x", p.x}, {"y", p.y}, {"width", p.width}, {"charge", p.charge}});
      }
      j["edges"] = edges;
      j["plates"] = plates;
      break;
    }
  }
  return j;
}

EquationSpec spec_from_json(const json& j) {
  try {
    EquationSpec s;
    s.family = eqtok::parse_family(j.at("family").get<std::string>());
    s.target_time = j.at("target_time").get<double>();
    switch (s.family) {
      case Family::heat:
      case Family::burgers:
      case Family::kdv:
        s.alpha = j.at("alpha").get<double>();
        s.beta = j.at("beta").get<double>();
        s.gamma = j.at("gamma").get<double>();
        if (j.contains("forcing")) {
          const auto& f = j.at("forcing");
          eqtok::ForcingParams p;
          p.terms = f.at("terms").get<int>();
          p.domain_length = f.at("domain_length").get<double>();
          p.amplitude = f.at("amplitude").get<std::vector<double>>();
          p.omega = f.at("omega").get<std::vector<double>>();
          p.wavenumber = f.at("wavenumber").get<std::vector<int>>();
          p.phase = f.at("phase").get<std::vector<double>>();
          s.forcing = std::move(p);
        }
        break;
      case Family::navier_stokes:
        s.nu = j.at("nu").get<double>();
        s.amp = j.at("amp").get<double>();
        break;
      case Family::poisson: {
        const auto& edges = j.at("edges");
        if (edges.size() != 4) throw std::invalid_argument("spec json: expected 4 edges");
        for (std::size_t e = 0; e < 4; ++e) {
          const auto kind = edges[e].at("kind").get<std::string>();
          if (kind != "neumann" && kind != "dirichlet") throw std::invalid_argument("spec json: bad edge kind " + kind);
          s.edges[e] = {kind == "neumann" ? BoundaryKind::neumann : BoundaryKind::dirichlet,
                        edges[e].at("value").get<double>()};
        }
        for (const auto& p : j.at("plates")) {
          s.plates.push_back({p.at("x").get<int>(), p.at("y").get<int>(), p.at("width").get<int>(),
                              p.at("charge").get<double>()});
        }
        break;
      }
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("spec json: ") + e.what());
  }
}

}  // namespace pitt::io
