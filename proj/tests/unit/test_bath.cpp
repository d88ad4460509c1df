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
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "doctest.h"
#include "ete/bath.hpp"
#include "ete/quantities.hpp"
#include "oracles.hpp"

using namespace ete;

TEST_SUITE("bath") {
  TEST_CASE("reorganization energy is hbar * integral of J / omega") {
    for (double er : {1.0, 35.0, 120.0}) {
      for (double wc : {50.0, 150.0, 400.0}) {
        const BathSpectrum s{er, wc};
        boost::math::quadrature::exp_sinh<double> quad;
        const double integral = quad.integrate([&](double w) { return spectral_density(w, s) / w; });
        CHECK(units::kHbar * integral == doctest::Approx(er).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("spectral density vanishes for non-positive frequency") {
    const BathSpectrum s{35.0, 150.0};
    CHECK(spectral_density(0.0, s) == 0.0);
    CHECK(spectral_density(-3.0, s) == 0.0);
    // maximum at omega = omega_c
    const double wc = units::energy_to_angular_frequency(150.0);
    CHECK(spectral_density(wc, s) > spectral_density(0.9 * wc, s));
    CHECK(spectral_density(wc, s) > spectral_density(1.1 * wc, s));
  }

  TEST_CASE("detailed balance of transition rates") {
    const BathSpectrum s{35.0, 150.0};
    for (double T : {10.0, 77.0, 295.0, 1000.0}) {
      for (double e : {1.0, 20.0, 150.0, 600.0}) {
        const double w = units::energy_to_angular_frequency(e);
        const double ratio = transition_rate(w, T, s) / transition_rate(-w, T, s);
        CHECK(ratio == doctest::Approx(std::exp(e / units::thermal_energy(T))).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("zero temperature: no absorption, emission unchanged") {
    const BathSpectrum s{35.0, 150.0};
    const double w = units::energy_to_angular_frequency(100.0);
    CHECK(transition_rate(-w, 0.0, s) == 0.0);
    CHECK(transition_rate(w, 0.0, s) == doctest::Approx(2.0 * M_PI * spectral_density(w, s)));
    CHECK(dephasing_rate(0.0, s) == 0.0);
    CHECK_THROWS_AS(bose_occupation(0.0, 300.0), std::domain_error);
    CHECK_THROWS_AS(transition_rate(0.0, 300.0, s), std::domain_error);
  }

  TEST_CASE("dephasing rate is the omega -> 0 limit and linear in T") {
    const BathSpectrum s{35.0, 150.0};
    for (double T : {1.0, 100.0, 295.0}) {
      const double w = 1e-7;
      CHECK(dephasing_rate(T, s) == doctest::Approx(transition_rate(w, T, s)).epsilon(1e-6));
      CHECK(dephasing_rate(T, s) == doctest::Approx(transition_rate(-w, T, s)).epsilon(1e-6));
    }
    CHECK(dephasing_rate(200.0, s) == doctest::Approx(2.0 * dephasing_rate(100.0, s)));
  }

  TEST_CASE("Lamb shift forms") {
    std::mt19937_64 rng(9);
    const auto m = oracle::random_model(rng, 4);
    const auto b = diagonalize(build_site_hamiltonian(m));
    const ComplexMatrix ex = b.coefficients.adjoint() * lamb_shift(b, 35.0) * b.coefficients;
    for (Eigen::Index M = 0; M < 4; ++M) {
      double expect = 0.0;
      for (Eigen::Index k = 0; k < 4; ++k) expect += 35.0 * std::pow(std::abs(b.coefficients(k, M)), 4);
      CHECK(ex(M, M).real() == doctest::Approx(expect));
      for (Eigen::Index N = 0; N < 4; ++N)
        if (N != M) CHECK(std::abs(ex(M, N)) < 1e-12);
    }
    // fully correlated bath: a uniform shift E_R (sum_m |c_m|^2)^2 = E_R
    const ComplexMatrix uniform = lamb_shift(b, 35.0, RealMatrix::Ones(4, 4));
    CHECK((uniform - 35.0 * ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("secular grouping") {
    ExcitonBasis b;
    b.energies = RealVector{{0.0, 10.0, 20.0}};  // equal gaps share a group
    b.coefficients = ComplexMatrix::Identity(3, 3);
    const auto t = secular_transitions(b);
    std::size_t pairs = 0;
    for (const auto& g : t.groups) pairs += g.pairs.size();
    CHECK(pairs == 9);
    CHECK(t.groups.size() == 5);  // -20, -10, 0, 10, 20
    CHECK(t.groups[t.zero_group()].pairs.size() == 3);
    for (const auto& g : t.groups)
      if (std::abs(g.omega - units::energy_to_angular_frequency(10.0)) < 1e-9) CHECK(g.pairs.size() == 2);

    // omega > 0 generators lower the energy: |M><N| with e_N > e_M
    for (const auto& g : t.groups)
      for (auto [M, N] : g.pairs)
        if (g.omega > 0) CHECK(b.energies(N) > b.energies(M));
  }

  TEST_CASE("dephasing generator is diagonal in excitons") {
    std::mt19937_64 rng(4);
    const auto m = oracle::random_model(rng, 3);
    const auto b = diagonalize(build_site_hamiltonian(m));
    const auto t = secular_transitions(b);
    for (std::size_t site = 0; site < 3; ++site) {
      const ComplexMatrix a = lindblad_generator(b, t.groups[t.zero_group()], site);
      const ComplexMatrix ex = b.coefficients.adjoint() * a * b.coefficients;
      for (Eigen::Index M = 0; M < 3; ++M)
        CHECK(ex(M, M).real() == doctest::Approx(std::norm(b.coefficients(site, M))));
    }
  }
}
