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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ete/contributions.hpp"
#include "ete/ensemble.hpp"
#include "ete/model.hpp"

namespace ete {

/// What produced a set of outputs. Data files embed only the reproducible
/// fields (everything but the timestamps); the full manifest goes to a
/// sidecar '<output>.manifest.json'.
struct RunManifest {
  std::string command;
  std::string tool_version;
  std::uint64_t model_hash = 0;
  std::uint64_t seed = 0;
  std::string model_source;
  /// Resolved options after defaults, in resolution order.
  std::vector<std::pair<std::string, std::string>> configuration;
  /// key=value overrides applied on top of the model file.
  std::vector<std::string> overrides;
  std::vector<std::string> outputs;
  std::string started;
  std::string finished;
};

std::string manifest_json(const RunManifest& manifest);

/// One document for one or more reports of the same model.
std::string reports_json(std::span<const ContributionReport> reports, const SystemModel& model,
                         const RunManifest& manifest);

/// measure,process,raw,normalized,magnitude,fraction_of_eta
void write_reports_csv(std::ostream& os, std::span<const ContributionReport> reports);

std::string sweep_json(const SweepResult& result, const RunManifest& manifest);

/// Long form: parameter,parameter_value,quantity,statistic,value.
/// statistic is central | mean | std | min | max | count, or 'failed' with value nan.
void write_sweep_csv(std::ostream& os, const SweepResult& result);

/// One row per grid point: parameter_value, then q, q.mean, q.std, q.min, q.max per quantity.
void write_sweep_wide_csv(std::ostream& os, const SweepResult& result);

/// Current UTC time, ISO 8601.
std::string utc_timestamp();

/// Collects file contents and publishes them together: each is written to a
/// temporary sibling, then all are renamed into place. Nothing is left behind
/// if a write fails.
class AtomicOutputs {
 public:
  void stage(std::filesystem::path path, std::string content);
  void commit();
  const std::vector<std::filesystem::path>& paths() const { return paths_; }

 private:
  std::vector<std::filesystem::path> paths_;
  std::vector<std::string> contents_;
};

}  // namespace ete
