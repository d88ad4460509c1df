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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ete/contributions.hpp"
#include "ete/model.hpp"

namespace ete {

enum class SweepParameter { reorganization_energy, trap_rate, temperature, correlation_radius };
enum class SweepMeasure { ete, greens_contributions, susceptibility_contributions, transfer_time, pathways };

std::string_view parameter_name(SweepParameter p);
std::string_view measure_key(SweepMeasure m);
/// Inverse of parameter_name / measure_key; measures also accept "greens" and "susceptibility".
/// ConfigError on unknown names.
/// "trap_rate.<site>" (one-based) also sets `site`.
SweepParameter parse_parameter(std::string_view name, std::size_t* site = nullptr);
SweepMeasure parse_measure(std::string_view name);

inline constexpr std::uint64_t kDefaultSeed = 20110517;

struct DisorderSpec {
  std::size_t samples = 0;
  std::uint64_t seed = kDefaultSeed;
};

struct EvaluationOptions {
  std::optional<double> horizon;  // susceptibility horizon, default_horizon(L) when empty
  IntegratorOptions integrator;
  double tail_threshold = SusceptibilityOptions{}.tail_threshold;
};

struct SweepSpec {
  SweepParameter parameter = SweepParameter::reorganization_energy;
  std::size_t site = 0;  // zero-based; trap_rate only
  std::vector<double> grid;
  std::vector<SweepMeasure> measures{SweepMeasure::ete, SweepMeasure::greens_contributions};
  DisorderSpec disorder;
  EvaluationOptions evaluation;
  unsigned threads = 1;
  bool keep_samples = false;
};

/// Throws ConfigError for an empty grid, values outside the parameter's domain
/// or a trap_rate site outside the model.
void validate(const SweepSpec& spec, const SystemModel& model);

/// Flat quantity name -> value. Names:
///   eta, eta_bar                         (ete)
///   greens.<process>                     raw eta_k; greens.<process>.fraction = eta_k / eta
///   susceptibility.<process>             normalized; susceptibility.<process>.raw
///   transfer_time                        ps
///   pathways.<jump:n->m | damping:n | relaxation:residual>  normalized, susceptibility measure
///   pathways.inbound.<m>                 sum over n != m of pathways.jump:n->m
using Quantities = std::map<std::string, double>;

Quantities evaluate(const SystemModel& model, const InitialStateSpec& initial, std::span<const SweepMeasure> measures,
                    const EvaluationOptions& options = {});

/// Copy of `model` with the swept parameter set to `value`.
SystemModel with_parameter(SystemModel model, SweepParameter parameter, std::size_t site, double value);

struct Statistics {
  double mean = 0.0;
  double std = 0.0;  // unbiased (n - 1); 0 for a single value
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

/// Throws PreconditionError for an empty list.
Statistics disorder_statistics(std::span<const double> values);

/// Sample Pearson coefficient; NaN when either series is constant.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

struct SweepPoint {
  double value = 0.0;
  std::optional<Quantities> central;  // empty if the undisordered evaluation failed
  std::map<std::string, Statistics> ensemble;
  std::vector<std::optional<Quantities>> samples;  // filled when keep_samples
  std::size_t failed_samples = 0;
  std::vector<std::string> errors;
};

struct SweepResult {
  SweepSpec spec;
  std::uint64_t model_hash = 0;
  std::vector<SweepPoint> points;
};

/// Sample s of every grid point uses the disorder seed mix_seed(seed, s), so
/// all grid points see the same disorder realisations. Results do not depend
/// on the thread count.
SweepResult run_sweep(const SystemModel& model, const InitialStateSpec& initial, const SweepSpec& spec);

}  // namespace ete
