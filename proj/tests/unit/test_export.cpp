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
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ete/export.hpp"
#include "ete/hash.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace ete;
namespace fs = std::filesystem;

namespace {

struct Fixture {
  SystemModel model;
  DensityMatrix rho0;
  Fixture() {
    std::mt19937_64 rng(5);
    model = oracle::random_model(rng, 3);
    model.trap_rates = RealVector{{0.0, 0.0, 1.0}};
    rho0 = initial_state(model, initial::MixtureExcluding{{2}});
  }
};

RunManifest manifest(const SystemModel& m) {
  RunManifest r;
  r.command = "test";
  r.tool_version = "0";
  r.model_hash = model_hash(m);
  r.seed = 7;
  r.configuration = {{"measure", "both"}};
  return r;
}

}  // namespace

TEST_SUITE("export") {
  TEST_CASE("report JSON carries measure tags, both value forms and pathways") {
    Fixture f;
    const auto L = assemble(f.model);
    std::vector<ContributionReport> reports{greens_contributions(L, f.rho0, pathway_scheme(3)),
                                            susceptibility_contributions(L, f.rho0, default_scheme())};
    const auto j = nlohmann::json::parse(reports_json(reports, f.model, manifest(f.model)));
    CHECK(j["model_hash"] == hex_digest(model_hash(f.model)));
    CHECK(j["provenance"]["seed"] == 7);
    CHECK_FALSE(j["provenance"].contains("started"));
    REQUIRE(j["reports"].size() == 2);
    const auto& g = j["reports"][0];
    CHECK(g["measure"] == "greens");
    CHECK(g["pathways"]["raw"].size() == 3);
    CHECK(g["pathways"]["raw"][0].size() == 3);
    CHECK(g["contributions"]["jump:1->3"].contains("fraction_of_eta"));
    const auto& s = j["reports"][1];
    CHECK(s["measure"] == "susceptibility");
    CHECK(s["contributions"]["trapping"]["normalized"].get<double>() < 0.0);
    CHECK(s["contributions"]["trapping"]["magnitude"].get<double>() > 0.0);
    CHECK(s["diagnostics"].contains("tail_rates"));
  }

  TEST_CASE("report CSV") {
    Fixture f;
    const auto L = assemble(f.model);
    std::vector<ContributionReport> reports{greens_contributions(L, f.rho0, default_scheme())};
    std::ostringstream os;
    write_reports_csv(os, reports);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# model_hash=", 0) == 0);
    std::getline(in, line);
    CHECK(line == "measure,process,raw,normalized,magnitude,fraction_of_eta");
    std::getline(in, line);
    CHECK(line.rfind("greens,hamiltonian,", 0) == 0);
  }

  TEST_CASE("sweep CSV long and wide forms") {
    Fixture f;
    SweepSpec s;
    s.grid = {0.0, 35.0};
    s.disorder = {3, 1};
    s.measures = {SweepMeasure::ete};
    const auto r = run_sweep(f.model, initial::MixtureExcluding{{2}}, s);
    std::ostringstream longform;
    write_sweep_csv(longform, r);
    const std::string text = longform.str();
    CHECK(text.find("seed=1") != std::string::npos);
    CHECK(text.find("reorganization_energy,35,eta,central,") != std::string::npos);
    CHECK(text.find("reorganization_energy,35,eta,std,") != std::string::npos);
    CHECK(text.find("reorganization_energy,35,eta,count,3") != std::string::npos);
    std::ostringstream wide;
    write_sweep_wide_csv(wide, r);
    CHECK(wide.str().find("reorganization_energy,ok,eta,eta.mean,eta.std,eta.min,eta.max") != std::string::npos);
    const auto j = nlohmann::json::parse(sweep_json(r, manifest(f.model)));
    CHECK(j["points"].size() == 2);
    CHECK(j["seed"] == 1);
  }

  TEST_CASE("atomic outputs publish all files or none") {
    const fs::path dir = fs::temp_directory_path() / ("ete_export_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    AtomicOutputs ok;
    ok.stage(dir / "a.txt", "alpha");
    ok.stage(dir / "b.txt", "beta");
    ok.commit();
    std::ifstream a(dir / "a.txt");
    std::string content;
    a >> content;
    CHECK(content == "alpha");
    CHECK_FALSE(fs::exists(dir / "a.txt.tmp"));

    AtomicOutputs bad;
    bad.stage(dir / "c.txt", "gamma");
    bad.stage(dir / "missing" / "d.txt", "delta");
    CHECK_THROWS(bad.commit());
    CHECK_FALSE(fs::exists(dir / "c.txt"));
    CHECK_FALSE(fs::exists(dir / "c.txt.tmp"));
    fs::remove_all(dir);
  }

  TEST_CASE("manifest has timestamps") {
    Fixture f;
    auto m = manifest(f.model);
    m.started = utc_timestamp();
    const auto j = nlohmann::json::parse(manifest_json(m));
    CHECK(j["started"].get<std::string>().size() == 20);
  }
}
