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

#include "ete/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <thread>

#include "ete/errors.hpp"
#include "ete/hash.hpp"

namespace ete {

std::string_view parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::reorganization_energy: return "reorganization_energy";
    case SweepParameter::trap_rate: return "trap_rate";
    case SweepParameter::temperature: return "temperature";
    case SweepParameter::correlation_radius: return "correlation_radius";
  }
  return "?";
}

std::string_view measure_key(SweepMeasure m) {
  switch (m) {
    case SweepMeasure::ete: return "ete";
    case SweepMeasure::greens_contributions: return "greens_contributions";
    case SweepMeasure::susceptibility_contributions: return "susceptibility_contributions";
    case SweepMeasure::transfer_time: return "transfer_time";
    case SweepMeasure::pathways: return "pathways";
  }
  return "?";
}

SweepParameter parse_parameter(std::string_view name, std::size_t* site) {
  for (auto p : {SweepParameter::reorganization_energy, SweepParameter::temperature, SweepParameter::correlation_radius})
    if (name == parameter_name(p)) return p;
  constexpr std::string_view prefix = "trap_rate.";
  if (name.starts_with(prefix)) {
    const auto digits = name.substr(prefix.size());
    std::size_t one_based = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), one_based);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || one_based == 0)
      throw ConfigError("parameter", 0, "bad site in '" + std::string(name) + "' (sites are one-based)");
    if (site) *site = one_based - 1;
    return SweepParameter::trap_rate;
  }
  throw ConfigError("parameter", 0,
                    "unknown sweep parameter '" + std::string(name) +
                        "' (expected reorganization_energy, temperature, correlation_radius or trap_rate.<site>)");
}

SweepMeasure parse_measure(std::string_view name) {
  for (auto m : {SweepMeasure::ete, SweepMeasure::greens_contributions, SweepMeasure::susceptibility_contributions,
                 SweepMeasure::transfer_time, SweepMeasure::pathways})
    if (name == measure_key(m)) return m;
  // short forms match the quantity key prefixes
  if (name == "greens") return SweepMeasure::greens_contributions;
  if (name == "susceptibility") return SweepMeasure::susceptibility_contributions;
  throw ConfigError("measures", 0, "unknown measure '" + std::string(name) + "'");
}

void validate(const SweepSpec& spec, const SystemModel& model) {
  if (spec.grid.empty()) throw ConfigError("grid", 0, "sweep grid is empty");
  if (spec.parameter == SweepParameter::trap_rate && spec.site >= model.sites())
    throw ConfigError("parameter", 0, "trap_rate site " + std::to_string(spec.site + 1) + " outside the model");
  if (spec.measures.empty()) throw ConfigError("measures", 0, "no measures requested");
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    const double v = spec.grid[i];
    if (std::isnan(v) || v < 0.0)
      throw ConfigError("grid[" + std::to_string(i) + "]", 0,
                        std::string(parameter_name(spec.parameter)) + " must be >= 0, got " + std::to_string(v));
    if (std::isinf(v) && spec.parameter != SweepParameter::correlation_radius)
      throw ConfigError("grid[" + std::to_string(i) + "]", 0, "only correlation_radius may be infinite");
  }
}

SystemModel with_parameter(SystemModel model, SweepParameter parameter, std::size_t site, double value) {
  switch (parameter) {
    case SweepParameter::reorganization_energy: model.reorganization_energy = value; break;
    case SweepParameter::temperature: model.temperature = value; break;
    case SweepParameter::correlation_radius: model.correlation_radius = value; break;
    case SweepParameter::trap_rate:
      if (site >= model.sites()) throw ConfigError("parameter", 0, "trap_rate site outside the model");
      model.trap_rates(static_cast<Eigen::Index>(site)) = value;
      break;
  }
  return model;
}

Quantities evaluate(const SystemModel& model, const InitialStateSpec& initial, std::span<const SweepMeasure> measures,
                    const EvaluationOptions& options) {
  const Liouvillian L = assemble(model);
  const DensityMatrix rho0 = initial_state(model, initial);
  const auto wants = [&](SweepMeasure m) { return std::find(measures.begin(), measures.end(), m) != measures.end(); };
  SusceptibilityOptions sopt;
  sopt.horizon = options.horizon;
  sopt.integrator = options.integrator;
  sopt.tail_threshold = options.tail_threshold;

  Quantities q;
  if (wants(SweepMeasure::ete)) {
    const auto e = ete_greens(L, rho0);
    q["eta"] = e.eta;
    q["eta_bar"] = e.eta_bar;
  }
  if (wants(SweepMeasure::greens_contributions)) {
    const auto report = greens_contributions(L, rho0, default_scheme());
    for (const auto& p : report.processes) {
      q["greens." + p.name] = p.raw;
      q["greens." + p.name + ".fraction"] = p.raw / report.eta;
    }
  }
  if (wants(SweepMeasure::susceptibility_contributions)) {
    const auto report = susceptibility_contributions(L, rho0, default_scheme(SchemeTarget::full), sopt);
    for (const auto& p : report.processes) {
      q["susceptibility." + p.name] = p.normalized.value_or(0.0);
      q["susceptibility." + p.name + ".raw"] = p.raw;
    }
  }
  if (wants(SweepMeasure::transfer_time)) {
    if (const auto tau = transfer_time(L, rho0)) q["transfer_time"] = *tau;
  }
  if (wants(SweepMeasure::pathways)) {
    const std::size_t n = model.sites();
    const auto report = susceptibility_contributions(L, rho0, pathway_scheme(n, SchemeTarget::full), sopt);
    for (const auto& p : report.processes)
      if (p.name.starts_with("jump:") || p.name.starts_with("damping:") || p.name == "relaxation:residual")
        q["pathways." + p.name] = p.normalized.value_or(0.0);
    const auto& pm = *report.pathways;
    for (std::size_t m = 0; m < n; ++m) {
      double inbound = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        if (k != m) inbound += pm.normalized(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
      q["pathways.inbound." + std::to_string(m + 1)] = inbound;
    }
  }
  return q;
}

Statistics disorder_statistics(std::span<const double> values) {
  if (values.empty()) throw PreconditionError("disorder_statistics needs at least one value");
  Statistics s;
  s.count = values.size();
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  // two-pass for accuracy
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  return s;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("pearson_correlation needs two equal series of length >= 2");
  const auto sx = disorder_statistics(x);
  const auto sy = disorder_statistics(y);
  double cov = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) cov += (x[i] - sx.mean) * (y[i] - sy.mean);
  cov /= static_cast<double>(x.size() - 1);
  if (sx.std == 0.0 || sy.std == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return cov / (sx.std * sy.std);
}

namespace {

struct Unit {
  std::size_t point;
  std::size_t sample;  // 0 = central, s + 1 = disorder sample s
};

struct Outcome {
  std::optional<Quantities> values;
  std::string error;
};

}  // namespace

SweepResult run_sweep(const SystemModel& model, const InitialStateSpec& initial, const SweepSpec& spec) {
  validate(model);
  validate(spec, model);

  const std::size_t per_point = spec.disorder.samples + 1;
  const std::size_t total = spec.grid.size() * per_point;
  std::vector<Outcome> outcomes(total);

  // every (grid point x sample) is independent; results land in fixed slots
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const Unit unit{i / per_point, i % per_point};
      try {
        SystemModel m = with_parameter(model, spec.parameter, spec.site, spec.grid[unit.point]);
        if (unit.sample > 0) m = sample_disorder(m, mix_seed(spec.disorder.seed, unit.sample - 1));
        outcomes[i].values = evaluate(m, initial, spec.measures, spec.evaluation);
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(total)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  SweepResult result;
  result.spec = spec;
  result.model_hash = model_hash(model);
  for (std::size_t p = 0; p < spec.grid.size(); ++p) {
    SweepPoint point;
    point.value = spec.grid[p];
    const Outcome& central = outcomes[p * per_point];
    point.central = central.values;
    if (!central.values) point.errors.push_back("central: " + central.error);

    std::map<std::string, std::vector<double>> columns;
    for (std::size_t s = 0; s < spec.disorder.samples; ++s) {
      const Outcome& o = outcomes[p * per_point + s + 1];
      if (spec.keep_samples) point.samples.push_back(o.values);
      if (!o.values) {
        ++point.failed_samples;
        point.errors.push_back("sample " + std::to_string(s) + ": " + o.error);
        continue;
      }
      for (const auto& [name, v] : *o.values) columns[name].push_back(v);
    }
    for (const auto& [name, values] : columns) point.ensemble[name] = disorder_statistics(values);
    result.points.push_back(std::move(point));
  }
  return result;
}

}  // namespace ete
