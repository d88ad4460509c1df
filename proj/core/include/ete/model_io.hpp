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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ete/model.hpp"

namespace ete {

/// A parsed model document: the physical model plus its initial-state choice.
struct ModelFile {
  SystemModel model;
  InitialStateSpec initial_state;
  /// Leading '#' comment block of the document (provenance header).
  std::string provenance;
  std::string source;
};

/// Parses the YAML model schema:
///
///   sites:                 list of {energy, trap_rate, fwhm, position: [x, y, z]}
///   couplings:             full N x N matrix, or list of {sites: [i, j], value: V}
///   distances:             optional full N x N matrix (else derived from positions)
///   gamma_recomb, temperature, reorganization_energy, cutoff, correlation_radius
///   initial_state:         {type: site, site: i} | {type: mixture, exclude: [...]}
///                          | {type: matrix, real: [[...]], imag: [[...]]}
///
/// Site indices in the file are one-based. Units are fixed: cm^-1, ps^-1, Angstrom, K.
/// Throws ConfigError carrying the key path and line of the first violation.
ModelFile parse_model(std::string_view text, std::string_view source_name = "<memory>");
ModelFile load_model_file(const std::filesystem::path& path);

/// Applies `key=value` overrides. Recognised keys: temperature, reorganization_energy,
/// cutoff, correlation_radius, gamma_recomb, trap_rate.<site>, energy.<site>, fwhm.<site>.
void apply_override(ModelFile& file, std::string_view assignment);

/// Writes a model back out in the same schema (full-matrix couplings and distances).
std::string to_yaml(const ModelFile& file);

}  // namespace ete
