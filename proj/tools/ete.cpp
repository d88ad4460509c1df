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

// ete: command-line front end. Exit codes: 0 ok, 1 I/O, 2 configuration,
// 3 precondition, 4 numerical failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ete/contributions.hpp"
#include "ete/ensemble.hpp"
#include "ete/errors.hpp"
#include "ete/export.hpp"
#include "ete/hash.hpp"
#include "ete/liouville.hpp"
#include "ete/model_io.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kIo = 1, kConfig = 2, kPrecondition = 3, kNumerical = 4 };

struct Globals {
  std::string model_path;
  std::uint64_t seed = ete::kDefaultSeed;
  std::string output;
  double horizon = 0.0;  // 0 = default
  double rel_tol = ete::IntegratorOptions{}.rel_tol;
  double abs_tol = ete::IntegratorOptions{}.abs_tol;
  unsigned threads = 1;
  std::vector<std::string> overrides;
  long disorder_sample = -1;
};

std::string default_model_path() {
  if (fs::exists(ETE_SOURCE_MODEL)) return ETE_SOURCE_MODEL;
  return ETE_INSTALLED_MODEL;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

struct Session {
  Globals g;
  ete::ModelFile file;
  ete::RunManifest manifest;

  void load(const std::string& command) {
    if (g.model_path.empty()) g.model_path = default_model_path();
    file = ete::load_model_file(g.model_path);
    for (const auto& o : g.overrides) ete::apply_override(file, o);
    if (g.disorder_sample >= 0)
      file.model = ete::sample_disorder(file.model, ete::mix_seed(g.seed, static_cast<std::uint64_t>(g.disorder_sample)));
    manifest.command = command;
    manifest.tool_version = ETE_VERSION;
    manifest.model_source = g.model_path;
    manifest.seed = g.seed;
    manifest.overrides = g.overrides;
    manifest.model_hash = ete::model_hash(file.model);
    manifest.started = ete::utc_timestamp();
    manifest.configuration.emplace_back("initial_state", ete::describe(file.initial_state));
    manifest.configuration.emplace_back("rel_tol", fmt(g.rel_tol));
    manifest.configuration.emplace_back("abs_tol", fmt(g.abs_tol));
    if (g.disorder_sample >= 0) manifest.configuration.emplace_back("disorder_sample", std::to_string(g.disorder_sample));
  }

  ete::IntegratorOptions integrator() const {
    ete::IntegratorOptions o;
    o.rel_tol = g.rel_tol;
    o.abs_tol = g.abs_tol;
    return o;
  }

  // Writes `content` (+ manifest sidecar) atomically, or prints it when no --output was given.
  void publish(const std::string& content, const std::string& summary) {
    if (g.output.empty()) {
      std::cout << content;
      return;
    }
    manifest.finished = ete::utc_timestamp();
    manifest.outputs = {g.output};
    ete::AtomicOutputs out;
    out.stage(g.output, content);
    out.stage(g.output + ".manifest.json", ete::manifest_json(manifest));
    out.commit();
    std::cout << summary << "wrote " << g.output << " (+ .manifest.json)\n";
  }
};

bool ends_with(const std::string& s, std::string_view suffix) { return s.size() >= suffix.size() && s.ends_with(suffix); }

// ---------------------------------------------------------------------------

int cmd_simulate(Session& s, std::size_t samples, bool coherences) {
  s.load("simulate");
  const ete::Liouvillian L = ete::assemble(s.file.model);
  const ete::DensityMatrix rho0 = ete::initial_state(s.file.model, s.file.initial_state);
  double horizon = s.g.horizon;
  if (horizon <= 0.0) horizon = L.has_sink() ? ete::default_horizon(L) : 10.0;
  if (samples < 2) throw ete::ConfigError("--samples", 0, "need at least 2 samples");
  const auto grid = ete::uniform_grid(0.0, horizon, horizon / static_cast<double>(samples - 1));
  const auto traj = ete::propagate(L, rho0, horizon, grid, s.integrator());
  s.manifest.configuration.emplace_back("horizon", fmt(horizon));
  s.manifest.configuration.emplace_back("samples", std::to_string(grid.size()));
  std::ostringstream csv;
  ete::write_trajectory_csv(csv, traj, {coherences});
  std::ostringstream summary;
  summary << "trapped " << fmt(traj.trapped.back()) << ", recombined " << fmt(traj.recombined.back())
          << ", residual " << fmt(traj.trace.back()) << " at t = " << horizon << " ps\n";
  s.publish(csv.str(), summary.str());
  return kOk;
}

int cmd_contributions(Session& s, const std::string& measure, const std::string& scheme_name) {
  s.load("contributions");
  const ete::SystemModel& model = s.file.model;
  const ete::Liouvillian L = ete::assemble(model);
  const ete::DensityMatrix rho0 = ete::initial_state(model, s.file.initial_state);
  const bool pathways = scheme_name == "pathways";
  s.manifest.configuration.emplace_back("measure", measure);
  s.manifest.configuration.emplace_back("scheme", scheme_name);

  std::vector<ete::ContributionReport> reports;
  if (measure == "greens" || measure == "both") {
    const auto scheme = pathways ? ete::pathway_scheme(model.sites()) : ete::default_scheme();
    reports.push_back(ete::greens_contributions(L, rho0, scheme));
  }
  if (measure == "susceptibility" || measure == "both") {
    const auto scheme = pathways ? ete::pathway_scheme(model.sites(), ete::SchemeTarget::full)
                                 : ete::default_scheme(ete::SchemeTarget::full);
    ete::SusceptibilityOptions opt;
    if (s.g.horizon > 0.0) opt.horizon = s.g.horizon;
    opt.integrator = s.integrator();
    s.manifest.configuration.emplace_back("horizon", fmt(opt.horizon.value_or(ete::default_horizon(L))));
    reports.push_back(ete::susceptibility_contributions(L, rho0, scheme, opt));
  }

  std::string content;
  if (ends_with(s.g.output, ".csv")) {
    std::ostringstream csv;
    ete::write_reports_csv(csv, reports);
    content = csv.str();
  } else {
    content = ete::reports_json(reports, model, s.manifest);
  }

  std::ostringstream summary;
  for (const auto& r : reports) {
    summary << ete::measure_name(r.measure) << ": eta = " << std::setprecision(6) << r.eta << '\n';
    if (!pathways) {
      for (const auto& p : r.processes) {
        const double share = p.normalized ? *p.normalized : p.raw / r.eta;
        summary << "  " << std::left << std::setw(15) << p.name << std::right << std::setw(9) << std::fixed
                << std::setprecision(2) << 100.0 * share << " %\n"
                << std::defaultfloat;
      }
    }
    for (const auto& w : r.diagnostics.warnings) std::cerr << "warning: " << w << '\n';
  }
  s.publish(content, summary.str());
  return kOk;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  const auto number = [&](const std::string& t) {
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw ete::ConfigError("--grid", 0, "bad number '" + t + "'");
    }
  };
  std::vector<std::string> parts;
  std::string part;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::istringstream in(text.starts_with("log:") ? text.substr(4) : text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (text.starts_with("log:")) {
    // log:first:last:count
    if (parts.size() != 3) throw ete::ConfigError("--grid", 0, "expected log:first:last:count");
    const double a = number(parts[0]);
    const double b = number(parts[1]);
    const auto n = static_cast<std::size_t>(number(parts[2]));
    if (!(a > 0.0 && b > a) || n < 2) throw ete::ConfigError("--grid", 0, "log grid needs 0 < first < last, count >= 2");
    for (std::size_t i = 0; i < n; ++i)
      grid.push_back(a * std::pow(b / a, static_cast<double>(i) / static_cast<double>(n - 1)));
  } else if (sep == ':') {
    // first:last:step, inclusive
    if (parts.size() != 3) throw ete::ConfigError("--grid", 0, "expected first:last:step");
    const double a = number(parts[0]);
    const double b = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0) || b < a) throw ete::ConfigError("--grid", 0, "range grid needs step > 0 and last >= first");
    grid = ete::uniform_grid(a, b, step);
  } else {
    for (const auto& p : parts) grid.push_back(p == "inf" ? INFINITY : number(p));
  }
  return grid;
}

struct SweepFlags {
  std::string spec_file;
  std::string parameter;
  std::string grid;
  std::vector<std::string> measures;
  std::size_t samples = 0;
  bool keep_samples = false;
  bool wide = false;
};

ete::SweepSpec build_sweep_spec(const SweepFlags& f, const Globals& g) {
  ete::SweepSpec spec;
  std::string parameter = f.parameter;
  std::string grid = f.grid;
  std::vector<std::string> measures = f.measures;
  std::size_t samples = f.samples;
  if (!f.spec_file.empty()) {
    std::ifstream in(f.spec_file);
    if (!in) throw ete::ConfigError("--spec", 0, "cannot open '" + f.spec_file + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
      if (parameter.empty() && j.contains("parameter")) parameter = j.at("parameter").get<std::string>();
      if (grid.empty() && j.contains("grid")) {
        if (j["grid"].is_string()) {
          grid = j["grid"].get<std::string>();
        } else {
          for (const auto& v : j["grid"]) spec.grid.push_back(v.is_string() ? parse_grid(v.get<std::string>()).at(0) : v.get<double>());
        }
      }
      if (measures.empty() && j.contains("measures")) measures = j["measures"].get<std::vector<std::string>>();
      if (samples == 0 && j.contains("disorder")) samples = j["disorder"].value("samples", std::size_t{0});
      if (j.contains("disorder") && j["disorder"].contains("seed") && g.seed == ete::kDefaultSeed)
        spec.disorder.seed = j["disorder"]["seed"].get<std::uint64_t>();
      else
        spec.disorder.seed = g.seed;
    } catch (const nlohmann::json::exception& e) {
      throw ete::ConfigError(f.spec_file, 0, e.what());
    }
  } else {
    spec.disorder.seed = g.seed;
  }
  if (parameter.empty()) throw ete::ConfigError("--parameter", 0, "no sweep parameter given");
  spec.parameter = ete::parse_parameter(parameter, &spec.site);
  if (!grid.empty()) spec.grid = parse_grid(grid);
  if (!measures.empty()) {
    spec.measures.clear();
    for (const auto& m : measures) spec.measures.push_back(ete::parse_measure(m));
  }
  spec.disorder.samples = samples;
  spec.keep_samples = f.keep_samples;
  spec.threads = g.threads;
  if (g.horizon > 0.0) spec.evaluation.horizon = g.horizon;
  spec.evaluation.integrator.rel_tol = g.rel_tol;
  spec.evaluation.integrator.abs_tol = g.abs_tol;
  return spec;
}

int cmd_sweep(Session& s, const SweepFlags& flags) {
  s.load("sweep");
  const ete::SweepSpec spec = build_sweep_spec(flags, s.g);
  s.manifest.seed = spec.disorder.seed;
  std::string parameter(ete::parameter_name(spec.parameter));
  if (spec.parameter == ete::SweepParameter::trap_rate) parameter += "." + std::to_string(spec.site + 1);
  s.manifest.configuration.emplace_back("parameter", parameter);
  s.manifest.configuration.emplace_back("grid_points", std::to_string(spec.grid.size()));
  s.manifest.configuration.emplace_back("samples", std::to_string(spec.disorder.samples));
  s.manifest.configuration.emplace_back("threads", std::to_string(spec.threads));

  const ete::SweepResult result = ete::run_sweep(s.file.model, s.file.initial_state, spec);
  std::string content;
  if (ends_with(s.g.output, ".json")) {
    content = ete::sweep_json(result, s.manifest);
  } else {
    std::ostringstream csv;
    if (flags.wide) ete::write_sweep_wide_csv(csv, result);
    else ete::write_sweep_csv(csv, result);
    content = csv.str();
  }
  std::size_t failed = 0;
  for (const auto& p : result.points) {
    if (p.errors.empty()) continue;
    ++failed;
    for (const auto& e : p.errors) std::cerr << "warning: " << parameter << " = " << p.value << ": " << e << '\n';
  }
  std::ostringstream summary;
  summary << result.points.size() << " grid points, " << failed << " with failures\n";
  s.publish(content, summary.str());
  return kOk;
}

int cmd_validate(Session& s) {
  if (s.g.model_path.empty()) s.g.model_path = default_model_path();
  std::cout << "model: " << s.g.model_path << '\n';
  try {
    s.file = ete::load_model_file(s.g.model_path);
    for (const auto& o : s.g.overrides) ete::apply_override(s.file, o);
  } catch (const ete::ConfigError& e) {
    std::cout << "schema: FAIL\n  " << e.what() << '\n';
    return kConfig;
  }
  std::cout << "schema: ok\n";
  const auto& model = s.file.model;
  const auto problems = ete::model_problems(model);
  std::cout << "physics: " << (problems.empty() ? "ok" : "FAIL") << '\n';
  for (const auto& p : problems) std::cout << "  error: " << p << '\n';
  for (const auto& w : ete::model_warnings(model)) std::cout << "  warning: " << w << '\n';
  if (!problems.empty()) return kConfig;

  std::cout << "sites: " << model.sites() << ", hash " << ete::hex_digest(ete::model_hash(model)) << '\n';
  const auto basis = ete::diagonalize(ete::build_site_hamiltonian(model));
  std::cout << "exciton energies (cm^-1):";
  for (Eigen::Index i = 0; i < basis.energies.size(); ++i) std::cout << ' ' << std::fixed << std::setprecision(2) << basis.energies(i);
  std::cout << std::defaultfloat << '\n';
  for (const auto& [a, b] : basis.degeneracies())
    std::cout << "  warning: excitons " << a + 1 << " and " << b + 1 << " are degenerate\n";
  try {
    const auto rho0 = ete::initial_state(model, s.file.initial_state);
    std::cout << "initial state: " << ete::describe(s.file.initial_state) << '\n';
    for (Eigen::Index m = 0; m < rho0.rows(); ++m)
      if (model.trap_rates(m) > 0.0 && std::abs(rho0(m, m)) > 0.0)
        std::cout << "  warning: initial state overlaps trap site " << m + 1
                  << "; the susceptibility measure will refuse it\n";
  } catch (const ete::ConfigError& e) {
    std::cout << "initial state: FAIL\n  " << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eteflow: energy-transfer efficiency and its process contributions"};
  app.set_version_flag("--version", std::string("ete ") + ETE_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Session session;
  Globals& g = session.g;
  app.add_option("--model", g.model_path, "Model file (default: bundled fmo.model)");
  app.add_option("--seed", g.seed, "Master seed for disorder sampling")->capture_default_str();
  app.add_option("--output", g.output, "Output file; .json/.csv picks the format. Prints to stdout when absent");
  app.add_option("--horizon", g.horizon, "Integration horizon in ps (default 5/gamma_recomb)");
  app.add_option("--rel-tol", g.rel_tol, "Integrator relative tolerance")->capture_default_str();
  app.add_option("--abs-tol", g.abs_tol, "Integrator absolute tolerance")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for sweeps")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--set", g.overrides, "Override a model value, key=value (repeatable)");
  app.add_option("--disorder-sample", g.disorder_sample,
                 "Apply disorder realisation k (derived from --seed) before running");

  auto* simulate = app.add_subcommand("simulate", "Propagate the density matrix and write the trajectory CSV");
  std::size_t samples = 2001;
  bool coherences = false;
  simulate->add_option("--samples", samples, "Number of evenly spaced output times")->capture_default_str();
  simulate->add_flag("--coherences", coherences, "Add |rho_mn| columns");

  auto* contrib = app.add_subcommand("contributions", "Partition the efficiency into process contributions");
  std::string measure = "both";
  std::string scheme = "default";
  contrib->add_option("--measure", measure)->check(CLI::IsMember({"greens", "susceptibility", "both"}))->capture_default_str();
  contrib->add_option("--scheme", scheme)->check(CLI::IsMember({"default", "pathways"}))->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter, optionally with disorder averaging");
  SweepFlags flags;
  sweep->add_option("--spec", flags.spec_file, "JSON sweep spec {parameter, grid, measures, disorder: {samples, seed}}");
  sweep->add_option("--parameter", flags.parameter,
                    "reorganization_energy | temperature | correlation_radius | trap_rate.<site>");
  sweep->add_option("--grid", flags.grid, "first:last:step, log:first:last:count, or a comma list");
  sweep->add_option("--measures", flags.measures, "ete greens_contributions susceptibility_contributions transfer_time pathways")
      ->delimiter(',');
  sweep->add_option("--samples", flags.samples, "Disorder samples per grid point");
  sweep->add_flag("--keep-samples", flags.keep_samples, "Keep per-sample values (JSON output)");
  sweep->add_flag("--wide", flags.wide, "One CSV row per grid point instead of long form");

  auto* validate = app.add_subcommand("validate", "Check a model file and print diagnostics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*simulate) return cmd_simulate(session, samples, coherences);
    if (*contrib) return cmd_contributions(session, measure, scheme);
    if (*sweep) return cmd_sweep(session, flags);
    if (*validate) return cmd_validate(session);
  } catch (const ete::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ete::PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return kPrecondition;
  } catch (const ete::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}
