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

#include <cmath>
#include <set>

#include "doctest.h"
#include "ete/errors.hpp"
#include "ete/hash.hpp"
#include "ete/quantities.hpp"

using namespace ete;

TEST_SUITE("quantities") {
  TEST_CASE("hbar and k_B in spectroscopic units") {
    CHECK(units::kHbar == doctest::Approx(5.308837).epsilon(1e-6));
    CHECK(units::kBoltzmann == doctest::Approx(0.6950348).epsilon(1e-6));
    // room temperature is about 205 cm^-1
    CHECK(units::thermal_energy(295.0) == doctest::Approx(205.03).epsilon(1e-4));
  }

  TEST_CASE("energy and angular frequency round trip") {
    for (double e : {-300.0, 0.0, 1e-3, 35.0, 1e4}) {
      CHECK(units::angular_frequency_to_energy(units::energy_to_angular_frequency(e)) == doctest::Approx(e));
    }
    // 1 cm^-1 corresponds to a period of 33.356 ps
    const double period = 2.0 * M_PI / units::energy_to_angular_frequency(1.0);
    CHECK(period == doctest::Approx(33.35641).epsilon(1e-6));
  }

  TEST_CASE("negative temperature is a configuration error") {
    CHECK_THROWS_AS(units::thermal_energy(-1.0), ConfigError);
    CHECK_THROWS_AS(units::thermal_energy(NAN), ConfigError);
    CHECK(units::thermal_energy(0.0) == 0.0);
  }

  TEST_CASE("hash and seed mixing are stable") {
    Fnv1a a;
    a.update(std::string_view("abc"));
    CHECK(a.digest() == 0xe71fa2190541574bULL);  // published FNV-1a 64 test vector
    CHECK(hex_digest(0x1fULL) == "000000000000001f");
    std::set<std::uint64_t> seeds;
    for (std::uint64_t k = 0; k < 1000; ++k) seeds.insert(mix_seed(42, k));
    CHECK(seeds.size() == 1000);
    CHECK(mix_seed(42, 7) == mix_seed(42, 7));
    CHECK(mix_seed(42, 7) != mix_seed(43, 7));
  }
}
