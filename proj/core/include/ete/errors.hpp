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

#include <stdexcept>
#include <string>

namespace ete {

// Three failure classes; the CLI maps each to its own exit code.

/// Malformed or physically invalid configuration (model file, sweep spec, flags).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
  ConfigError(const std::string& key_path, int line, const std::string& what)
      : std::runtime_error(format(key_path, line, what)), key_path_(key_path), line_(line) {}

  const std::string& key_path() const noexcept { return key_path_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& key_path, int line, const std::string& what) {
    std::string out = key_path.empty() ? std::string("<root>") : key_path;
    if (line > 0) out += " (line " + std::to_string(line) + ")";
    return out + ": " + what;
  }

  std::string key_path_;
  int line_ = 0;
};

/// A valid configuration that does not meet an operation's precondition.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// Integrator or solver failure.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double time = -1.0)
      : std::runtime_error(time >= 0.0 ? what + " (at t = " + std::to_string(time) + " ps)" : what),
        time_(time) {}

  /// Simulation time of the failure in ps, negative when not time-related.
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace ete
