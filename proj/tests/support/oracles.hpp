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

// Independent reference implementations used only by the tests. Nothing here
// calls the superoperator assembly, the integrator, or the contribution code.

#pragma once

#include <cstdint>
#include <random>

#include "ete/model.hpp"
#include "ete/types.hpp"

namespace ete::oracle {

/// Plain constants so the oracles do not borrow ete::units.
inline constexpr double kHbar = 5.308837458876145;     // cm^-1 ps
inline constexpr double kBoltzmann = 0.6950348004861;  // cm^-1 / K

/// d rho / dt of the master equation evaluated elementwise in the exciton
/// basis, without any Liouville-space matrix. Assumes distinct Bohr
/// frequencies (true for generic random models).
DensityMatrix master_rhs(const SystemModel& model, const DensityMatrix& rho);

/// exp(M t) v by Pade matrix exponential.
ComplexVector expm_apply(const ComplexMatrix& M, double t, const ComplexVector& v);

/// Random model with sinks: N sites, random couplings, bath and positions.
SystemModel random_model(std::mt19937_64& rng, std::size_t sites, bool with_bath = true);

/// Random density matrix (full rank, complex coherences).
DensityMatrix random_density(std::mt19937_64& rng, std::size_t sites);

/// Two-site Rabi formula: population of site 1 at t for rho0 = |1><1|,
/// detuning eps1 - eps2 and coupling v in cm^-1, no bath, no sinks.
double rabi_population(double detuning, double coupling, double t);

/// Asymptotic susceptibility rate g_k(inf) = int_0^inf ds 2 Tr{K (s - M)^{-1} Mk (s - M)^{-1} rho0},
/// the Laplace-domain form of int_0^inf s_k(t) / t dt.
double tail_rate_laplace(const ComplexMatrix& M, const ComplexMatrix& Mk, const RealVector& kappa,
                         const ComplexVector& rho0);

/// 2 Tr{K M^{-1} Mk M^{-1} rho0}: the constant in eta_k(T) = T g_k(inf) - this.
double susceptibility_offset(const ComplexMatrix& M, const ComplexMatrix& Mk, const RealVector& kappa,
                             const ComplexVector& rho0);

}  // namespace ete::oracle
