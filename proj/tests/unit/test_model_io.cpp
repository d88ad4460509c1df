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

#include <filesystem>

#include "doctest.h"
#include "ete/errors.hpp"
#include "ete/model_io.hpp"

using namespace ete;

namespace {

const char* kDimer = R"(# provenance line one
# provenance line two
name: dimer
sites:
  - {energy: 100, fwhm: 20, position: [0, 0, 0]}
  - {energy: 0, trap_rate: 1.0, position: [3, 4, 0]}
couplings:
  - {sites: [1, 2], value: -50}
gamma_recomb: 0.001
temperature: 77
reorganization_energy: 35
correlation_radius: .inf
initial_state: {type: site, site: 1}
)";

std::string with_line(const std::string& text, const std::string& from, const std::string& to) {
  std::string out = text;
  out.replace(out.find(from), from.size(), to);
  return out;
}

}  // namespace

TEST_SUITE("model_io") {
  TEST_CASE("parse dimer document") {
    const auto f = parse_model(kDimer, "dimer");
    const auto& m = f.model;
    CHECK(m.sites() == 2);
    CHECK(m.site_energies(0) == 100.0);
    CHECK(m.couplings(0, 1) == -50.0);
    CHECK(m.couplings(1, 0) == -50.0);
    CHECK(m.trap_rates(1) == 1.0);
    CHECK(m.disorder_fwhm(0) == 20.0);
    CHECK(std::isinf(m.correlation_radius));
    REQUIRE(m.distances);
    CHECK((*m.distances)(0, 1) == doctest::Approx(5.0));
    CHECK(m.cutoff == 150.0);
    CHECK(std::get<initial::SingleSite>(f.initial_state).site == 0);
    CHECK(f.provenance == "# provenance line one\n# provenance line two\n");
  }

  TEST_CASE("default initial state avoids trap sites") {
    const auto f = parse_model(with_line(kDimer, "initial_state: {type: site, site: 1}\n", ""));
    const auto& mix = std::get<initial::MixtureExcluding>(f.initial_state);
    REQUIRE(mix.excluded.size() == 1);
    CHECK(mix.excluded[0] == 1);
  }

  TEST_CASE("errors carry key path and line") {
    try {
      parse_model(with_line(kDimer, "temperature: 77", "temperature: warm"));
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.key_path() == "temperature");
      CHECK(e.line() == 10);
    }
    try {
      parse_model(with_line(kDimer, "gamma_recomb", "gamma_recom"));
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("unknown key 'gamma_recom'") != std::string::npos);
      CHECK(e.line() == 9);
    }
    CHECK_THROWS_WITH_AS(parse_model(with_line(kDimer, "sites: [1, 2]", "sites: [1, 3]")),
                         doctest::Contains("couplings[0].sites[1]"), ConfigError);
    CHECK_THROWS_AS(parse_model("sites: [\n"), ConfigError);
    CHECK_THROWS_AS(load_model_file("/nonexistent/model.yaml"), ConfigError);
  }

  TEST_CASE("full-matrix couplings and explicit initial state") {
    const char* text = R"(sites: [{energy: 0, trap_rate: 1}, {energy: 10}]
couplings: [[0, 5], [5, 0]]
initial_state: {type: matrix, real: [[0, 0], [0, 1]]}
)";
    const auto f = parse_model(text);
    CHECK(f.model.couplings(1, 0) == 5.0);
    CHECK(std::holds_alternative<initial::Explicit>(f.initial_state));
  }

  TEST_CASE("overrides") {
    auto f = parse_model(kDimer);
    apply_override(f, "temperature=0");
    apply_override(f, "trap_rate.2=2.5");
    apply_override(f, "energy.1=90");
    apply_override(f, "correlation_radius=inf");
    CHECK(f.model.temperature == 0.0);
    CHECK(f.model.trap_rates(1) == 2.5);
    CHECK(f.model.site_energies(0) == 90.0);
    CHECK_THROWS_AS(apply_override(f, "trap_rate.3=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(f, "colour=blue"), ConfigError);
    CHECK_THROWS_AS(apply_override(f, "temperature"), ConfigError);
  }

  TEST_CASE("yaml round trip preserves the model") {
    const auto f = parse_model(kDimer);
    const auto g = parse_model(to_yaml(f));
    CHECK(model_hash(f.model) == model_hash(g.model));
  }

  TEST_CASE("bundled FMO model") {
    const auto f = load_model_file(ETE_TEST_DATA_DIR "/fmo.model");
    CHECK(f.model.sites() == 7);
    CHECK(f.model.trap_rates(2) == 1.0);
    CHECK(f.model.couplings(0, 1) == -104.1);
    CHECK(f.provenance.find("SCHEMATIC") != std::string::npos);
    CHECK(model_problems(f.model).empty());
  }
}
