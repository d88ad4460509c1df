/* Copyright 2026 The eteflow Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ete/types.hpp"

namespace ete {

/// Full physical description of one chromophoric network.
///
/// Energies in cm^-1, rates in ps^-1, distances in Angstrom, temperature in K.
/// Site indices are zero-based here; model files use one-based indices.
struct SystemModel {
  RealVector site_energies;
  RealMatrix couplings;                 // symmetric, zero diagonal
  std::optional<RealMatrix> distances;  // required only when correlation_radius > 0
  RealVector trap_rates;                // kappa_m
  double recombination_rate = 0.0;      // Gamma
  double temperature = 0.0;
  double reorganization_energy = 0.0;   // E_R
  double cutoff = 150.0;                // omega_c in cm^-1
  double correlation_radius = 0.0;      // R_c; +infinity means fully correlated
  RealVector disorder_fwhm;

  std::size_t sites() const { return static_cast<std::size_t>(site_energies.size()); }
  bool has_sink() const;
};

/// Every violated invariant, as human-readable messages naming the offending entries.
std::vector<std::string> model_problems(const SystemModel& model);

/// Valid but suspicious settings, such as a model without any sink.
std::vector<std::string> model_warnings(const SystemModel& model);

/// Throws ConfigError listing every problem reported by model_problems.
void validate(const SystemModel& model);

/// Stable 64-bit content hash of the model parameters.
std::uint64_t model_hash(const SystemModel& model);

/// H[m][m] = eps_m, H[m][n] = V_mn.
HermitianMatrix build_site_hamiltonian(const SystemModel& model);

struct ExcitonBasis {
  RealVector energies;          // ascending, cm^-1
  ComplexMatrix coefficients;   // column M holds c_m(M)

  std::size_t size() const { return static_cast<std::size_t>(energies.size()); }
  /// Pairs (M, M+1) whose energies differ by less than the tolerance (cm^-1).
  std::vector<std::pair<std::size_t, std::size_t>> degeneracies(double tolerance = 1e-6) const;
};

ExcitonBasis diagonalize(const HermitianMatrix& h);

/// C_mn = exp(-R_mn / R_c); identity for R_c = 0, all ones for R_c = +inf.
RealMatrix correlation_matrix(const SystemModel& model);

/// FWHM -> Gaussian standard deviation.
double fwhm_to_sigma(double fwhm);

/// Copy with site energies shifted by independent Normal(0, fwhm_m / (2 sqrt(2 ln 2))) draws.
/// Couplings are never perturbed. Deterministic in `seed`.
SystemModel sample_disorder(const SystemModel& model, std::uint64_t seed);

namespace initial {
struct SingleSite {
  std::size_t site = 0;
};
struct MixtureExcluding {
  std::vector<std::size_t> excluded;
};
struct Explicit {
  DensityMatrix rho;
};
}  // namespace initial

using InitialStateSpec = std::variant<initial::SingleSite, initial::MixtureExcluding, initial::Explicit>;

/// Throws ConfigError for out-of-range sites, empty mixtures, or explicit
/// matrices that are not Hermitian, positive semidefinite, and of unit trace.
DensityMatrix initial_state(const SystemModel& model, const InitialStateSpec& spec);

std::string describe(const InitialStateSpec& spec);

}  // namespace ete
