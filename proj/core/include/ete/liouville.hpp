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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/LU>

#include "ete/bath.hpp"
#include "ete/integrator.hpp"
#include "ete/model.hpp"
#include "ete/types.hpp"

namespace ete {

/// Physical pieces of the generator; they sum to the full superoperator.
enum class Part : std::size_t { coherent = 0, lamb, relax, dephase, trap, recomb };

inline constexpr std::array<Part, 6> kAllParts{Part::coherent, Part::lamb,  Part::relax,
                                               Part::dephase,  Part::trap,  Part::recomb};

std::string_view part_name(Part part);

struct AssemblyOptions {
  double grouping_tolerance = kDefaultGroupingTolerance;  // rad/ps
};

/// Liouville-space generator M (N^2 x N^2, column stacking) with labelled parts:
///   coherent = -(i/hbar)[H_S, .]        lamb   = -(i/hbar)[H_LS, .]
///   relax    = Lindblad terms, w != 0    dephase = Lindblad terms, w = 0
///   trap     = -(1/hbar){H_trap, .}      recomb = -(1/hbar){H_recomb, .}
class Liouvillian {
 public:
  Liouvillian(std::size_t sites, std::array<ComplexMatrix, 6> parts, RealVector trap_rates, double recombination_rate,
              std::uint64_t model_hash = 0);

  std::size_t sites() const { return sites_; }
  Eigen::Index dim() const { return full_.rows(); }
  const ComplexMatrix& full() const { return full_; }
  const ComplexMatrix& part(Part p) const { return parts_[static_cast<std::size_t>(p)]; }
  /// R = full - trap - recomb.
  ComplexMatrix remainder() const;
  const RealVector& trap_rates() const { return trap_rates_; }
  double recombination_rate() const { return recombination_rate_; }
  bool has_sink() const;
  std::uint64_t model_hash() const { return model_hash_; }

  /// (2/hbar) Tr{H_trap rho} = 2 sum_m kappa_m rho_mm for vec(rho).
  double trap_density(const Eigen::Ref<const ComplexVector>& vec_rho) const;
  /// (2/hbar) Tr{H_recomb rho} = 2 Gamma Tr rho.
  double recomb_density(const Eigen::Ref<const ComplexVector>& vec_rho) const;

 private:
  std::size_t sites_;
  std::array<ComplexMatrix, 6> parts_;
  ComplexMatrix full_;
  RealVector trap_rates_;
  double recombination_rate_;
  std::uint64_t model_hash_;
};

Liouvillian assemble(const SystemModel& model, const AssemblyOptions& options = {});

/// Superoperator of X -> A X B in the column-stacking convention, (B^T kron A).
ComplexMatrix sandwich(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix commutator_superop(const ComplexMatrix& h);      // X -> [h, X]
ComplexMatrix anticommutator_superop(const ComplexMatrix& h);  // X -> {h, X}

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<double> trace;
  std::vector<double> p_trap;      // (2/hbar) Tr{H_trap rho(t)}, ps^-1
  std::vector<double> p_recomb;
  std::vector<double> trapped;     // integral of p_trap from 0 to t
  std::vector<double> recombined;
  std::uint64_t model_hash = 0;
};

/// rho(t) = exp(M t) rho0 sampled on `grid` (ascending, within [0, horizon]).
Trajectory propagate(const Liouvillian& L, const DensityMatrix& rho0, double horizon, std::span<const double> grid,
                     const IntegratorOptions& options = {});

/// Evenly spaced samples t0, t0 + dt, ..., up to and including t1.
std::vector<double> uniform_grid(double t0, double t1, double dt);

/// 5 exciton lifetimes (5 / Gamma), or 100 / max(kappa) without recombination.
double default_horizon(const Liouvillian& L);

struct TimeDomainOptions {
  std::optional<double> horizon;  // ps; default_horizon when empty
  double tolerance = 1e-4;        // on the untrapped, unrecombined residual
  IntegratorOptions integrator;
};

struct TimeDomainEte {
  double eta = 0.0;
  double eta_bar = 0.0;
  double residual = 0.0;  // Tr rho(horizon)
  double horizon = 0.0;
  bool converged = false;
  /// eta plus the residual split by the instantaneous trap / recombination ratio at the horizon.
  double eta_tail_corrected = 0.0;
};

TimeDomainEte ete_time_domain(const Liouvillian& L, const DensityMatrix& rho0, const TimeDomainOptions& options = {});

struct GreensEte {
  double eta = 0.0;
  double eta_bar = 0.0;
};

/// LU factorisation of M shared by every Green's-function quantity. Throws
/// PreconditionError when no sink is present.
class Resolvent {
 public:
  explicit Resolvent(const Liouvillian& L);
  /// M^{-1} v
  ComplexVector solve(const ComplexVector& v) const;

 private:
  Eigen::PartialPivLU<ComplexMatrix> lu_;
};

GreensEte ete_greens(const Liouvillian& L, const DensityMatrix& rho0);

/// Mean trapping time conditioned on trapping, by trapezoidal quadrature on
/// the trajectory grid. Empty when nothing is trapped. Throws PreconditionError
/// if more than 1e-3 of the population is left at the last sample.
std::optional<double> transfer_time(const Trajectory& trajectory);

/// Same quantity from the resolvent, 2 Tr{H_trap M^{-2} rho0} / (hbar eta):
/// no grid, no horizon. Empty when eta == 0.
std::optional<double> transfer_time(const Liouvillian& L, const DensityMatrix& rho0);

struct TrajectoryCsvOptions {
  bool coherences = false;  // add |rho_mn| columns for m < n
};

/// Columns: t, trace, p_trap, p_recomb, rho_11..rho_NN [, abs_rho_mn ...], trapped, recombined.
/// p_trap and p_recomb are rate densities (ps^-1); trapped and recombined are their running integrals.
/// The first line is a '# model_hash=<hex>' comment.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory, const TrajectoryCsvOptions& options = {});

}  // namespace ete
