#include "pitt/pde/datasets.hpp"

#include <stdexcept>

#include "pitt/eqtok/tokenizer.hpp"
#include "pitt/eqtok/vocabulary.hpp"

namespace pitt::pde {

using eqtok::Family;
using nlohmann::json;

namespace {

void append_tokens(io::Dataset& d, const eqtok::EquationSpec& spec) {
  const auto seq = eqtok::tokenize_equation(spec, d.pad_length);
  d.tokens.insert(d.tokens.end(), seq.ids.begin(), seq.ids.end());
  d.token_length.push_back(seq.true_length);
}

template <class Range>
void append_floats(std::vector<float>& out, const Range& values) {
  for (double v : values) out.push_back(static_cast<float>(v));
}

io::Dataset empty_dataset(Family family, std::uint64_t seed) {
  io::Dataset d;
  d.family = family;
  d.pad_length = eqtok::default_pad_length(family);
  d.vocab_hash = eqtok::build_vocabulary().hash();
  d.base_seed = seed;
  return d;
}

}  // namespace

io::Dataset make_dataset_1d(const Dataset1DOptions& opts, const GenerationLog& log) {
  if (!eqtok::is_1d(opts.family)) throw std::invalid_argument("make_dataset_1d: family is not one-dimensional");
  if (opts.count_per_combo < 1) throw std::invalid_argument("make_dataset_1d: count_per_combo must be positive");
  const auto grid = opts.grid.empty() ? paper_parameter_grid(opts.family) : opts.grid;
  const auto& so = opts.solver;

  io::Dataset d = empty_dataset(opts.family, opts.seed);
  d.sample_shape = {so.nt + 1, so.nx};
  json combos = json::array();
  for (const auto& c : grid) combos.push_back({c.alpha, c.beta, c.gamma});
  d.generation = {{"solver",
                   {{"method", "pseudo-spectral integrating-factor RK4"},
                    {"internal_points", so.internal_points},
                    {"dt_max", so.dt_max},
                    {"cfl", so.cfl},
                    {"nx", so.nx},
                    {"nt", so.nt},
                    {"t_final", so.t_final}}},
                  {"coefficients", combos},
                  {"count_per_combo", opts.count_per_combo}};

  std::int64_t index = 0;
  for (const auto& c : grid) {
    for (int k = 0; k < opts.count_per_combo; ++k, ++index) {
      const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(index);
      Rng rng(seed);
      int resamples = 0;
      for (;;) {
        eqtok::EquationSpec spec;
        spec.family = opts.family;
        spec.alpha = c.alpha;
        spec.beta = c.beta;
        spec.gamma = c.gamma;
        spec.forcing = sample_forcing(rng);
        spec.target_time = so.t_final;
        try {
          const auto tr = solve_1d(spec, so);
          if (d.grid_x.empty()) {
            append_floats(d.grid_x, tr.x);
            append_floats(d.grid_t, tr.t);
          }
          append_floats(d.u, tr.u);
          append_tokens(d, spec);
          d.samples.push_back({spec, seed, index, index, resamples});
          break;
        } catch (const SolverBlowUp& e) {
          if (log) log("sample " + std::to_string(index) + " rejected (" + e.what() + "), resampling forcing");
          if (++resamples > opts.max_resamples) {
            throw std::runtime_error("make_dataset_1d: sample " + std::to_string(index) + " kept blowing up");
          }
        }
      }
    }
  }
  return d;
}

io::Dataset make_dataset_ns(const DatasetNSOptions& opts, const GenerationLog& log) {
  if (opts.inits_per_combo < 1) throw std::invalid_argument("make_dataset_ns: inits_per_combo must be positive");
  const auto nus = opts.viscosities.empty() ? paper_viscosities() : opts.viscosities;
  const auto amps = opts.amplitudes.empty() ? paper_amplitudes() : opts.amplitudes;
  const auto& so = opts.solver;

  io::Dataset d = empty_dataset(Family::navier_stokes, opts.seed);
  d.sample_shape = {so.frames + 1, so.save_n, so.save_n};
  d.generation = {{"solver",
                   {{"method", "pseudo-spectral vorticity, IMEX RK3 with Crank-Nicolson diffusion"},
                    {"n", so.n},
                    {"save_n", so.save_n},
                    {"t_final", so.t_final},
                    {"frames", so.frames},
                    {"cfl", so.cfl},
                    {"dt_max", so.dt_max}}},
                  {"grf",
                   {{"alpha", opts.spectrum.alpha},
                    {"tau", opts.spectrum.tau},
                    {"sigma", opts.spectrum.sigma()},
                    {"sqrt_eigenvalue", "sqrt(2) sigma (4 pi^2 |k|^2 + tau^2)^(-alpha/2)"}}},
                  {"viscosities", nus},
                  {"amplitudes", amps},
                  {"inits_per_combo", opts.inits_per_combo}};
  for (int i = 0; i < so.save_n; ++i) {
    d.grid_x.push_back(static_cast<float>(static_cast<double>(i) / so.save_n));
    d.grid_y.push_back(static_cast<float>(static_cast<double>(i) / so.save_n));
  }
  for (int f = 0; f <= so.frames; ++f) d.grid_t.push_back(static_cast<float>(so.t_final * f / so.frames));

  std::vector<std::vector<double>> inits;
  for (int k = 0; k < opts.inits_per_combo; ++k) {
    Rng rng(opts.seed + static_cast<std::uint64_t>(k));
    inits.push_back(sample_grf_vorticity(rng, so.n, opts.spectrum));
  }
  std::int64_t combo = 0;
  for (double nu : nus) {
    for (double amp : amps) {
      for (int k = 0; k < opts.inits_per_combo; ++k) {
        eqtok::EquationSpec spec;
        spec.family = Family::navier_stokes;
        spec.nu = nu;
        spec.amp = amp;
        spec.target_time = so.t_final;
        const auto tr = solve_ns(nu, amp, inits[static_cast<std::size_t>(k)], so);
        append_floats(d.u, tr.w);
        append_tokens(d, spec);
        d.samples.push_back({spec, opts.seed + static_cast<std::uint64_t>(k), combo, k, 0});
        if (log) {
          log("nu=" + std::to_string(nu) + " A=" + std::to_string(amp) + " init " + std::to_string(k) + ": " +
              std::to_string(tr.steps) + " steps");
        }
      }
      ++combo;
    }
  }
  return d;
}

std::vector<double> poisson_input_field(const PoissonProblem& p) {
  auto field = boundary_field(p);
  for (int i = 1; i < p.ny - 1; ++i)
    for (int j = 1; j < p.nx - 1; ++j) {
      auto& v = field[static_cast<std::size_t>(i) * p.nx + j];
      bool on_plate = false;
      for (const auto& pl : p.plates) on_plate = on_plate || (pl.y == i && j >= pl.x && j < pl.x + pl.width);
      if (!on_plate) v = 0.0;
    }
  return field;
}

io::Dataset make_dataset_poisson(const DatasetPoissonOptions& opts, const GenerationLog& log) {
  if (opts.count < 1) throw std::invalid_argument("make_dataset_poisson: count must be positive");
  io::Dataset d = empty_dataset(Family::poisson, opts.seed);
  const PoissonProblem shape_probe;
  d.sample_shape = {shape_probe.ny, shape_probe.nx};
  d.generation = {{"grid", {{"nx", shape_probe.nx}, {"ny", shape_probe.ny}, {"h", shape_probe.h()}}},
                  {"solver", {{"method", "5-point sparse LU with iterative refinement"}, {"tol", opts.tol}}},
                  {"plates",
                   {{"count", opts.plates.plates},
                    {"min_width", opts.plates.min_width},
                    {"max_width", opts.plates.max_width},
                    {"margin", opts.plates.margin},
                    {"charge_scale", opts.plates.charge_scale},
                    {"edge_value_scale", opts.plates.edge_value_scale}}},
                  {"target", "gradient magnitude of the potential"},
                  {"bc_assignment", "sample index mod 16, bit e set means edge e (left, right, bottom, top) is Neumann"}};
  for (int j = 0; j < shape_probe.nx; ++j) d.grid_x.push_back(static_cast<float>(j * shape_probe.h()));
  for (int i = 0; i < shape_probe.ny; ++i) d.grid_y.push_back(static_cast<float>(i * shape_probe.h()));

  for (int i = 0; i < opts.count; ++i) {
    const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(i);
    Rng rng(seed);
    const auto p = sample_poisson_problem(rng, i % 16, opts.plates);
    const auto sol = solve_poisson(p, opts.tol);
    append_floats(d.input, poisson_input_field(p));
    append_floats(d.u, field_magnitude(sol.u, p.nx, p.ny, p.h()));
    eqtok::EquationSpec spec;
    spec.family = Family::poisson;
    spec.edges = p.edges;
    spec.plates = p.plates;
    spec.target_time = eqtok::kPoissonSentinelTime;
    append_tokens(d, spec);
    d.samples.push_back({spec, seed, i, i, 0});
    if (log && (i + 1) % 500 == 0) log(std::to_string(i + 1) + " / " + std::to_string(opts.count) + " solved");
  }
  return d;
}

}  // namespace pitt::pde
