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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "ete/liouville.hpp"

namespace ete {

// ---------------------------------------------------------------------------
// Partition schemes
// ---------------------------------------------------------------------------

/// What a complete scheme must sum to: R = M - trap - recomb for the
/// Green's-function measure, the full generator M for the susceptibility measure.
enum class SchemeTarget { remainder, full };

/// Selects part of one Liouvillian part.
///
/// With no `elements` and `residual == false` the whole part is selected. With
/// `elements`, only those (row, col) Liouville-space entries. With
/// `residual == true`, every entry of the part not claimed by element
/// selectors on the same part elsewhere in the scheme.
struct MaskSelector {
  std::string name;
  Part part = Part::coherent;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> elements;
  bool residual = false;
};

struct PartitionScheme {
  SchemeTarget target = SchemeTarget::remainder;
  std::vector<MaskSelector> selectors;
};

using SparseOperator = Eigen::SparseMatrix<cd>;

/// One process M_k as a concrete Liouville-space matrix.
struct ProcessOperator {
  std::string name;
  SparseOperator matrix;
};

/// hamiltonian, lamb, relaxation, dephasing (+ trapping, recombination for SchemeTarget::full).
PartitionScheme default_scheme(SchemeTarget target = SchemeTarget::remainder);

/// Like default_scheme, with relaxation split into site-to-site population jumps
/// ("jump:n->m", the element mapping rho_nn into rho_mm), population damping
/// ("damping:n") and "relaxation:residual" for the coherence-coupled rest.
PartitionScheme pathway_scheme(std::size_t sites, SchemeTarget target = SchemeTarget::remainder);

/// Adds trapping and recombination processes to a remainder-target scheme.
PartitionScheme with_sinks(PartitionScheme scheme);

/// Builds each process matrix. Throws ConfigError for overlapping selectors or
/// out-of-range elements.
std::vector<ProcessOperator> materialize(const PartitionScheme& scheme, const Liouvillian& L);

/// Largest entry of |sum_k M_k - target|.
double completeness_error(std::span<const ProcessOperator> ops, const Liouvillian& L, SchemeTarget target);

inline constexpr double kCompletenessTolerance = 1e-12;

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class Measure { greens, susceptibility };
std::string_view measure_name(Measure measure);

struct ProcessContribution {
  std::string name;
  double raw = 0.0;
  /// Signed fraction: raw / eta^+ for raw > 0, raw / |eta^-| for raw < 0.
  std::optional<double> normalized;
};

/// Site-to-site relaxation pathways; entry (m, n) is the jump n -> m, the
/// diagonal holds population damping. Sum of `raw` plus `residual_raw` equals
/// the total relaxation contribution.
struct PathwayMatrix {
  RealMatrix raw;
  RealMatrix normalized;
  double residual_raw = 0.0;
  double residual_normalized = 0.0;
};

struct ContributionDiagnostics {
  bool scheme_complete = false;
  double completeness_error = 0.0;
  /// sum_k eta_k + reference - eta
  double partition_residual = 0.0;
  // susceptibility only
  double horizon = 0.0;
  double stop_time = 0.0;
  bool tail_extrapolated = false;
  std::size_t steps = 0;
  double rel_tol = 0.0;
  double abs_tol = 0.0;
  double residual_population = 0.0;
  /// g_k at the end of integration: the rate at which eta_k still grows per ps.
  std::vector<std::pair<std::string, double>> tail_rates;
  std::vector<std::string> warnings;
};

struct ContributionReport {
  Measure measure = Measure::greens;
  double eta = 0.0;
  double eta_bar = 0.0;
  /// Green's measure only: trapping of initial-state population already on
  /// trap sites, sum_m kappa_m / (kappa_m + Gamma) rho0_mm. Zero when the
  /// initial state avoids trap sites; eta = reference + sum_k eta_k.
  double reference = 0.0;
  std::vector<ProcessContribution> processes;
  std::optional<PathwayMatrix> pathways;
  ContributionDiagnostics diagnostics;
  std::uint64_t model_hash = 0;

  const ProcessContribution& at(std::string_view name) const;
  const ProcessContribution* find(std::string_view name) const;
  double raw_sum() const;
};

/// Divides positive contributions by their sum and negative ones by the magnitude of
/// theirs, so the two sets map to +1 and -1. Throws
/// PreconditionError when every contribution is zero.
ContributionReport normalize(ContributionReport report);

/// Collects jump/damping/residual entries of a pathway-scheme report; empty if absent.
std::optional<PathwayMatrix> pathway_matrix(const ContributionReport& report, std::size_t sites);

// ---------------------------------------------------------------------------
// Green's-function measure
// ---------------------------------------------------------------------------

/// eta_k = (2/hbar) Tr{H_recomb H_ref^{-1} R_k M^{-1} rho0} from one shared solve.
/// Requires kappa_m + Gamma > 0 on every site and no trap/recomb selectors.
ContributionReport greens_contributions(const Liouvillian& L, const DensityMatrix& rho0,
                                        const PartitionScheme& scheme);

// ---------------------------------------------------------------------------
// Susceptibility measure
// ---------------------------------------------------------------------------

struct SensitivityTrajectory {
  std::vector<double> times;
  std::vector<ComplexVector> rho;                 // vec(rho(t))
  std::vector<std::vector<ComplexVector>> sigma;  // [time][process] d vec(rho)/d lambda_k
};

/// Forward sensitivities d sigma_k/dt = M sigma_k + M_k rho, sigma_k(0) = 0,
/// integrated jointly with rho and sampled on `grid`.
SensitivityTrajectory sensitivity_trajectory(const Liouvillian& L, std::span<const ProcessOperator> ops,
                                             const DensityMatrix& rho0, double horizon, std::span<const double> grid,
                                             const IntegratorOptions& options = {});

struct SusceptibilityOptions {
  std::optional<double> horizon;  // default_horizon(L) when empty
  IntegratorOptions integrator;
  /// Integration stops once |rho| and every |sigma_k| fall below
  /// max(tail_threshold, 10 * abs_tol); the states cannot decay below the
  /// integrator's noise floor. The remaining outer integral is then
  /// g_k(t_stop) * (horizon - t_stop).
  double tail_threshold = 1e-12;
};

/// eta_k = (2/hbar) int_0^T dt int_0^t dt' (1/t') d/d lambda_k Tr{H_trap rho(t')}.
/// Remainder-target schemes are extended with_sinks. Requires an initial state
/// without population or coherence on trap sites. The report is normalised.
ContributionReport susceptibility_contributions(const Liouvillian& L, const DensityMatrix& rho0,
                                                const PartitionScheme& scheme,
                                                const SusceptibilityOptions& options = {});

}  // namespace ete
