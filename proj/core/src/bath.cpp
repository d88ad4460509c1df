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

#include "ete/bath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ete/quantities.hpp"

namespace ete {

using units::kBoltzmann;
using units::kHbar;

double spectral_density(double omega, const BathSpectrum& spectrum) {
  if (omega <= 0.0) return 0.0;
  const double wc = units::energy_to_angular_frequency(spectrum.cutoff);
  // E_R / (hbar wc) is dimensionless: E_R and cutoff share cm^-1.
  return spectrum.reorganization_energy / spectrum.cutoff * omega * std::exp(-omega / wc);
}

double bose_occupation(double omega, double temperature) {
  if (omega == 0.0) throw std::domain_error("bose_occupation: omega = 0 is singular; use dephasing_rate");
  if (temperature <= 0.0) return omega > 0.0 ? 0.0 : -1.0;
  const double x = kHbar * omega / (kBoltzmann * temperature);
  return 1.0 / std::expm1(x);
}

double transition_rate(double omega, double temperature, const BathSpectrum& spectrum) {
  if (omega == 0.0) throw std::domain_error("transition_rate: omega = 0; use dephasing_rate");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (omega > 0.0) return two_pi * spectral_density(omega, spectrum) * (1.0 + bose_occupation(omega, temperature));
  // absorption: J(-w) n(-w) with -w > 0
  return two_pi * spectral_density(-omega, spectrum) * bose_occupation(-omega, temperature);
}

double dephasing_rate(double temperature, const BathSpectrum& spectrum) {
  const double kt_omega = kBoltzmann * temperature / kHbar;  // kT as angular frequency
  return 2.0 * std::numbers::pi * spectrum.reorganization_energy / spectrum.cutoff * kt_omega;
}

HermitianMatrix lamb_shift(const ExcitonBasis& basis, double reorganization_energy) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  return lamb_shift(basis, reorganization_energy, RealMatrix::Identity(n, n));
}

HermitianMatrix lamb_shift(const ExcitonBasis& basis, double reorganization_energy, const RealMatrix& correlations) {
  const ComplexMatrix& c = basis.coefficients;
  const RealMatrix weights = c.cwiseAbs2();  // |c_m(M)|^2, rows = sites
  RealVector shift(weights.cols());
  for (Eigen::Index k = 0; k < weights.cols(); ++k)
    shift(k) = reorganization_energy * weights.col(k).dot(correlations * weights.col(k));
  return c * shift.cast<cd>().asDiagonal() * c.adjoint();
}

std::size_t TransitionTable::zero_group() const {
  for (std::size_t g = 0; g < groups.size(); ++g)
    if (groups[g].omega == 0.0) return g;
  throw std::logic_error("transition table without omega = 0 group");
}

TransitionTable secular_transitions(const ExcitonBasis& basis, double tolerance) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("secular_transitions: tolerance must be > 0");
  const std::size_t n = basis.size();
  struct Entry {
    double omega;
    std::size_t m, k;
  };
  std::vector<Entry> entries;
  entries.reserve(n * n);
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t k = 0; k < n; ++k)
      entries.push_back({m == k ? 0.0 : units::energy_to_angular_frequency(basis.energies(k) - basis.energies(m)), m, k});
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.omega < b.omega; });

  // Chain pairs whose frequencies sit within `tolerance` of the group's first member.
  TransitionTable table;
  table.tolerance = tolerance;
  for (const auto& e : entries) {
    if (table.groups.empty() || std::abs(e.omega - table.groups.back().omega) > tolerance) {
      table.groups.push_back({e.omega, {}});
    }
    table.groups.back().pairs.emplace_back(e.m, e.k);
  }
  // Snap the group containing the diagonal pairs to exactly zero.
  for (auto& g : table.groups) {
    const bool has_diag = std::any_of(g.pairs.begin(), g.pairs.end(), [](auto p) { return p.first == p.second; });
    if (has_diag) g.omega = 0.0;
  }
  return table;
}

ComplexMatrix lindblad_generator(const ExcitonBasis& basis, const TransitionGroup& group, std::size_t site) {
  const ComplexMatrix& c = basis.coefficients;
  const auto n = c.rows();
  const auto m = static_cast<Eigen::Index>(site);
  ComplexMatrix a = ComplexMatrix::Zero(n, n);
  for (auto [bra, ket] : group.pairs) {
    const auto M = static_cast<Eigen::Index>(bra);
    const auto N = static_cast<Eigen::Index>(ket);
    a.noalias() += (std::conj(c(m, M)) * c(m, N)) * c.col(M) * c.col(N).adjoint();
  }
  return a;
}

}  // namespace ete
