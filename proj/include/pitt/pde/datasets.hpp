#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pitt/io/dataset.hpp"
#include "pitt/pde/grf.hpp"
#include "pitt/pde/navier_stokes.hpp"
#include "pitt/pde/pde1d.hpp"
#include "pitt/pde/poisson.hpp"

namespace pitt::pde {

/// Receives one line per notable event (rejected trajectories, progress).
using GenerationLog = std::function<void(const std::string&)>;

struct Dataset1DOptions {
  eqtok::Family family = eqtok::Family::heat;
  std::vector<Coefficients> grid;  // empty means the full grid for the family
  int count_per_combo = 10;
  std::uint64_t seed = 0;
  Solver1DOptions solver;
  int max_resamples = 20;
};

/// Sample i (combination-major) uses seed + i; a blow-up redraws the forcing from the same stream.
io::Dataset make_dataset_1d(const Dataset1DOptions& opts, const GenerationLog& log = {});

struct DatasetNSOptions {
  std::vector<double> viscosities;  // empty means the full grid
  std::vector<double> amplitudes;
  int inits_per_combo = 1;
  std::uint64_t seed = 0;
  NSOptions solver;
  GrfSpectrum spectrum;
};

/// Initial field k is drawn from seed + k and shared by every (nu, A) combination, so
/// initial-condition groups are disjoint from equation groups.
io::Dataset make_dataset_ns(const DatasetNSOptions& opts, const GenerationLog& log = {});

struct DatasetPoissonOptions {
  int count = 5000;
  std::uint64_t seed = 0;
  PlateSampling plates;
  double tol = 1e-8;
};

/// Sample i uses seed + i and boundary combination i mod 16.
io::Dataset make_dataset_poisson(const DatasetPoissonOptions& opts, const GenerationLog& log = {});

/// Input channel for a steady-state sample: plate charges on plate cells, edge data on the boundary.
std::vector<double> poisson_input_field(const PoissonProblem& p);

}  // namespace pitt::pde
