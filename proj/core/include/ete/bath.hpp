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

#include <cstddef>
#include <utility>
#include <vector>

#include "ete/model.hpp"
#include "ete/types.hpp"

namespace ete {

/// Ohmic spectral density with exponential cutoff.
struct BathSpectrum {
  double reorganization_energy = 0.0;  // E_R, cm^-1
  double cutoff = 150.0;               // omega_c, cm^-1

  static BathSpectrum from(const SystemModel& model) { return {model.reorganization_energy, model.cutoff}; }
};

/// J(omega) in rad/ps for omega in rad/ps; zero for omega <= 0.
double spectral_density(double omega, const BathSpectrum& spectrum);

/// 1 / (exp(hbar omega / k T) - 1). Throws std::domain_error for omega == 0.
double bose_occupation(double omega, double temperature);

/// Site-independent part of gamma_mn(omega): 2 pi [J(w)(1 + n(w)) + J(-w) n(-w)].
/// Throws std::domain_error for omega == 0 (use dephasing_rate).
double transition_rate(double omega, double temperature, const BathSpectrum& spectrum);

/// omega -> 0+ limit of transition_rate: 2 pi (E_R / omega_c) k T / hbar, in ps^-1.
double dephasing_rate(double temperature, const BathSpectrum& spectrum);

/// Diagonal (exciton-basis) Lamb shift returned in the site basis:
///   H_LS = E_R sum_M sum_mn C_mn |c_m(M)|^2 |c_n(M)|^2 |M><M|.
/// With C = identity this is E_R sum_M sum_m |c_m(M)|^4 |M><M|.
HermitianMatrix lamb_shift(const ExcitonBasis& basis, double reorganization_energy);
HermitianMatrix lamb_shift(const ExcitonBasis& basis, double reorganization_energy, const RealMatrix& correlations);

/// Exciton pairs (M, N) sharing one Bohr frequency omega = (e_N - e_M) / hbar.
/// Generators for omega > 0 map |N> to the lower state |M>.
struct TransitionGroup {
  double omega = 0.0;  // rad/ps
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

struct TransitionTable {
  std::vector<TransitionGroup> groups;
  double tolerance = 0.0;

  /// Index of the omega = 0 group (always present).
  std::size_t zero_group() const;
};

inline constexpr double kDefaultGroupingTolerance = 1e-6;  // rad/ps

TransitionTable secular_transitions(const ExcitonBasis& basis, double tolerance = kDefaultGroupingTolerance);

/// A_m(omega) for one group and site m, in the site basis:
///   sum_{(M,N) in group} c_m(M)^* c_m(N) |M><N|.
ComplexMatrix lindblad_generator(const ExcitonBasis& basis, const TransitionGroup& group, std::size_t site);

}  // namespace ete
