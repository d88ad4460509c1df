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

#include "ete/quantities.hpp"

#include <cmath>
#include <string>

#include "ete/errors.hpp"

namespace ete::units {

double thermal_energy(double temperature_kelvin) {
  if (!(temperature_kelvin >= 0.0) || !std::isfinite(temperature_kelvin))
    throw ConfigError("temperature", 0, "must be finite and >= 0 K, got " + std::to_string(temperature_kelvin));
  return kBoltzmann * temperature_kelvin;
}

}  // namespace ete::units
