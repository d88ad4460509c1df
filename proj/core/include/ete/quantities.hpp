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

// Internal unit system: energies in cm^-1, times in ps, temperatures in K.
// Angular frequencies are rad/ps and rates ps^-1.

namespace ete::units {

namespace codata {
inline constexpr double kPlanck = 6.62607015e-34;         // J s
inline constexpr double kSpeedOfLightCm = 2.99792458e10;  // cm / s
inline constexpr double kBoltzmann = 1.380649e-23;        // J / K
inline constexpr double kPi = 3.14159265358979323846;
}  // namespace codata

/// Reduced Planck constant in cm^-1 ps (about 5.30884).
inline constexpr double kHbar = 1.0e12 / (2.0 * codata::kPi * codata::kSpeedOfLightCm);

/// Boltzmann constant in cm^-1 / K (about 0.695035).
inline constexpr double kBoltzmann = codata::kBoltzmann / (codata::kPlanck * codata::kSpeedOfLightCm);

static_assert(kHbar > 0.0 && kBoltzmann > 0.0);

/// E / hbar: cm^-1 to rad/ps.
constexpr double energy_to_angular_frequency(double energy_wavenumber) {
  return energy_wavenumber / kHbar;
}

/// hbar * omega: rad/ps to cm^-1.
constexpr double angular_frequency_to_energy(double omega) { return omega * kHbar; }

/// k_B T in cm^-1. Throws ConfigError for T < 0.
double thermal_energy(double temperature_kelvin);

}  // namespace ete::units
