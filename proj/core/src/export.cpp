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

#include "ete/export.hpp"

#include <chrono>
#include <ctime>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <system_error>

#include "ete/errors.hpp"
#include "ete/hash.hpp"
#include "json.hpp"

namespace ete {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// JSON has no inf/nan; spell them out rather than emitting null.
ordered_json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ordered_json vector_json(const RealVector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

ordered_json matrix_json(const RealMatrix& m) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
  return out;
}

ordered_json model_json(const SystemModel& model) {
  ordered_json p;
  p["sites"] = model.sites();
  p["site_energies"] = vector_json(model.site_energies);
  p["couplings"] = matrix_json(model.couplings);
  p["trap_rates"] = vector_json(model.trap_rates);
  p["gamma_recomb"] = number(model.recombination_rate);
  p["temperature"] = number(model.temperature);
  p["reorganization_energy"] = number(model.reorganization_energy);
  p["cutoff"] = number(model.cutoff);
  p["correlation_radius"] = number(model.correlation_radius);
  p["disorder_fwhm"] = vector_json(model.disorder_fwhm);
  p["units"] = {{"energy", "cm^-1"}, {"rate", "ps^-1"}, {"temperature", "K"}, {"length", "Angstrom"}};
  return p;
}

// The reproducible part of a manifest: no wall-clock fields.
ordered_json provenance_json(const RunManifest& m) {
  ordered_json p;
  p["command"] = m.command;
  p["tool_version"] = m.tool_version;
  p["model_hash"] = hex_digest(m.model_hash);
  p["seed"] = m.seed;
  p["model_source"] = m.model_source;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : m.configuration) cfg[k] = v;
  p["configuration"] = cfg;
  p["overrides"] = m.overrides;
  return p;
}

ordered_json diagnostics_json(const ContributionReport& r) {
  const auto& d = r.diagnostics;
  ordered_json j;
  j["scheme_complete"] = d.scheme_complete;
  j["completeness_error"] = number(d.completeness_error);
  j["partition_residual"] = number(d.partition_residual);
  if (r.measure == Measure::susceptibility) {
    j["horizon"] = number(d.horizon);
    j["stop_time"] = number(d.stop_time);
    j["tail_extrapolated"] = d.tail_extrapolated;
    j["steps"] = d.steps;
    j["rel_tol"] = number(d.rel_tol);
    j["abs_tol"] = number(d.abs_tol);
    j["residual_population"] = number(d.residual_population);
    ordered_json tails = ordered_json::object();
    for (const auto& [name, g] : d.tail_rates) tails[name] = number(g);
    j["tail_rates"] = tails;
  }
  j["warnings"] = d.warnings;
  return j;
}

ordered_json report_json(const ContributionReport& r) {
  ordered_json j;
  j["measure"] = std::string(measure_name(r.measure));
  j["eta"] = number(r.eta);
  j["eta_bar"] = number(r.eta_bar);
  if (r.measure == Measure::greens) j["reference"] = number(r.reference);
  j["normalization"] =
      r.measure == Measure::greens
          ? "raw values sum to eta - reference; fraction_of_eta = raw / eta"
          : "normalized = raw / (sum of positive raw) for raw > 0, raw / |sum of negative raw| for raw < 0; "
            "magnitude = |normalized|";
  ordered_json order = ordered_json::array();
  ordered_json contributions = ordered_json::object();
  for (const auto& p : r.processes) {
    order.push_back(p.name);
    ordered_json c;
    c["raw"] = number(p.raw);
    if (p.normalized) {
      c["normalized"] = number(*p.normalized);
      c["magnitude"] = number(std::abs(*p.normalized));
    }
    if (r.measure == Measure::greens && r.eta != 0.0) c["fraction_of_eta"] = number(p.raw / r.eta);
    contributions[p.name] = c;
  }
  j["processes"] = order;
  j["contributions"] = contributions;
  if (r.pathways) {
    ordered_json pw;
    pw["convention"] = "entry [m][n] is the relaxation jump from site n+1 to site m+1; the diagonal is population damping";
    pw["raw"] = matrix_json(r.pathways->raw);
    if (r.measure == Measure::susceptibility) pw["normalized"] = matrix_json(r.pathways->normalized);
    pw["residual_raw"] = number(r.pathways->residual_raw);
    if (r.measure == Measure::susceptibility) pw["residual_normalized"] = number(r.pathways->residual_normalized);
    j["pathways"] = pw;
  }
  j["diagnostics"] = diagnostics_json(r);
  return j;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

}  // namespace

std::string manifest_json(const RunManifest& m) {
  ordered_json j = provenance_json(m);
  j["outputs"] = m.outputs;
  j["started"] = m.started;
  j["finished"] = m.finished;
  return j.dump(2) + "\n";
}

std::string reports_json(std::span<const ContributionReport> reports, const SystemModel& model,
                         const RunManifest& manifest) {
  ordered_json j;
  j["provenance"] = provenance_json(manifest);
  j["model_hash"] = hex_digest(model_hash(model));
  j["parameters"] = model_json(model);
  ordered_json list = ordered_json::array();
  for (const auto& r : reports) list.push_back(report_json(r));
  j["reports"] = list;
  return j.dump(2) + "\n";
}

void write_reports_csv(std::ostream& os, std::span<const ContributionReport> reports) {
  if (!reports.empty()) os << "# model_hash=" << hex_digest(reports.front().model_hash) << '\n';
  os << "measure,process,raw,normalized,magnitude,fraction_of_eta\n";
  for (const auto& r : reports) {
    const std::string measure(measure_name(r.measure));
    for (const auto& p : r.processes) {
      os << measure << ',' << p.name << ',' << fmt(p.raw) << ',';
      if (p.normalized) os << fmt(*p.normalized) << ',' << fmt(std::abs(*p.normalized));
      else os << ',';
      os << ',';
      if (r.measure == Measure::greens && r.eta != 0.0) os << fmt(p.raw / r.eta);
      os << '\n';
    }
    os << measure << ",eta," << fmt(r.eta) << ",,,\n";
    os << measure << ",eta_bar," << fmt(r.eta_bar) << ",,,\n";
  }
}

std::string sweep_json(const SweepResult& result, const RunManifest& manifest) {
  const auto& spec = result.spec;
  ordered_json j;
  j["provenance"] = provenance_json(manifest);
  j["model_hash"] = hex_digest(result.model_hash);
  j["seed"] = spec.disorder.seed;
  j["parameter"] = std::string(parameter_name(spec.parameter));
  if (spec.parameter == SweepParameter::trap_rate) j["site"] = spec.site + 1;
  ordered_json measures = ordered_json::array();
  for (auto m : spec.measures) measures.push_back(std::string(measure_key(m)));
  j["measures"] = measures;
  j["disorder"] = {{"samples", spec.disorder.samples},
                   {"seed", spec.disorder.seed},
                   {"sample_seed", "splitmix64(seed + (s + 1) * 0x9e3779b97f4a7c15), shared across grid points"},
                   {"statistics", "mean, unbiased std, min, max over successful samples"}};
  ordered_json points = ordered_json::array();
  for (const auto& p : result.points) {
    ordered_json pj;
    pj["value"] = number(p.value);
    pj["ok"] = p.errors.empty();
    if (p.central) {
      ordered_json c = ordered_json::object();
      for (const auto& [k, v] : *p.central) c[k] = number(v);
      pj["central"] = c;
    } else {
      pj["central"] = nullptr;
    }
    if (!p.ensemble.empty()) {
      ordered_json e = ordered_json::object();
      for (const auto& [k, s] : p.ensemble)
        e[k] = {{"mean", number(s.mean)}, {"std", number(s.std)}, {"min", number(s.min)},
                {"max", number(s.max)}, {"count", s.count}};
      pj["ensemble"] = e;
    }
    if (!p.samples.empty()) {
      ordered_json samples = ordered_json::array();
      for (const auto& s : p.samples) {
        if (!s) {
          samples.push_back(nullptr);
          continue;
        }
        ordered_json sj = ordered_json::object();
        for (const auto& [k, v] : *s) sj[k] = number(v);
        samples.push_back(sj);
      }
      pj["samples"] = samples;
    }
    pj["failed_samples"] = p.failed_samples;
    pj["errors"] = p.errors;
    points.push_back(pj);
  }
  j["points"] = points;
  return j.dump(2) + "\n";
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  const auto& spec = result.spec;
  std::string parameter(parameter_name(spec.parameter));
  if (spec.parameter == SweepParameter::trap_rate) parameter += "." + std::to_string(spec.site + 1);
  os << "# model_hash=" << hex_digest(result.model_hash) << " seed=" << spec.disorder.seed
     << " samples=" << spec.disorder.samples << '\n';
  os << "parameter,parameter_value,quantity,statistic,value\n";
  for (const auto& p : result.points) {
    const std::string head = parameter + ',' + fmt(p.value) + ',';
    if (p.central) {
      for (const auto& [k, v] : *p.central) os << head << k << ",central," << fmt(v) << '\n';
    } else {
      os << head << "*,failed,nan\n";
    }
    for (const auto& [k, s] : p.ensemble) {
      os << head << k << ",mean," << fmt(s.mean) << '\n';
      os << head << k << ",std," << fmt(s.std) << '\n';
      os << head << k << ",min," << fmt(s.min) << '\n';
      os << head << k << ",max," << fmt(s.max) << '\n';
      os << head << k << ",count," << s.count << '\n';
    }
  }
}

void write_sweep_wide_csv(std::ostream& os, const SweepResult& result) {
  std::set<std::string> names;
  for (const auto& p : result.points) {
    if (p.central)
      for (const auto& [k, v] : *p.central) names.insert(k);
    for (const auto& [k, s] : p.ensemble) names.insert(k);
  }
  const bool ensemble = result.spec.disorder.samples > 0;
  os << "# model_hash=" << hex_digest(result.model_hash) << " seed=" << result.spec.disorder.seed
     << " samples=" << result.spec.disorder.samples << '\n';
  os << parameter_name(result.spec.parameter) << ",ok";
  for (const auto& k : names) {
    os << ',' << k;
    if (ensemble) os << ',' << k << ".mean," << k << ".std," << k << ".min," << k << ".max";
  }
  os << '\n';
  const std::string nan = "nan";
  for (const auto& p : result.points) {
    os << fmt(p.value) << ',' << (p.errors.empty() ? 1 : 0);
    for (const auto& k : names) {
      const auto c = p.central ? p.central->find(k) : decltype(p.central->find(k)){};
      os << ',' << (p.central && c != p.central->end() ? fmt(c->second) : nan);
      if (ensemble) {
        const auto e = p.ensemble.find(k);
        if (e == p.ensemble.end()) {
          os << ",nan,nan,nan,nan";
        } else {
          os << ',' << fmt(e->second.mean) << ',' << fmt(e->second.std) << ',' << fmt(e->second.min) << ','
             << fmt(e->second.max);
        }
      }
    }
    os << '\n';
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

void AtomicOutputs::stage(std::filesystem::path path, std::string content) {
  paths_.push_back(std::move(path));
  contents_.push_back(std::move(content));
}

void AtomicOutputs::commit() {
  namespace fs = std::filesystem;
  std::vector<fs::path> temps;
  const auto cleanup = [&] {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
  };
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    fs::path tmp = paths_[i];
    tmp += ".tmp";
    temps.push_back(tmp);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << contents_[i];
    out.close();
    if (!out) {
      cleanup();
      throw std::runtime_error("cannot write " + paths_[i].string());
    }
  }
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    std::error_code ec;
    fs::rename(temps[i], paths_[i], ec);
    if (ec) {
      cleanup();
      throw std::runtime_error("cannot publish " + paths_[i].string() + ": " + ec.message());
    }
  }
}

}  // namespace ete
