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
#include <string>
#include <string_view>

namespace ete {

/// FNV-1a accumulator for content hashes that must stay stable across runs.
class Fnv1a {
 public:
  void update(std::string_view bytes);
  void update(double value);
  void update(std::uint64_t value);
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string hex_digest(std::uint64_t value);

/// splitmix64 finalizer; used to derive per-sample seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t counter);

}  // namespace ete
