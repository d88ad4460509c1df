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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ete {

struct IntegratorOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double initial_step = 1e-3;  // ps
  std::size_t max_steps = 20'000'000;
};

using RealState = std::vector<double>;

/// dx/dt = f(x, t) written into dxdt.
using OdeRhs = std::function<void(const RealState& x, RealState& dxdt, double t)>;

struct IntegrationSummary {
  double final_time = 0.0;
  std::size_t steps = 0;
  bool stopped_early = false;
};

/// Adaptive Dormand-Prince 5(4) integration from t = 0 to t_end with dense output.
///
/// `on_sample` is called for every time in `samples` (ascending, within
/// [0, t_end]) with the interpolated state. After each accepted step
/// `stop` may end the run early; `x` then holds the state at the final
/// accepted time. Throws NumericalError if the step size collapses.
IntegrationSummary integrate_dense(const OdeRhs& rhs, RealState& x, double t_end, std::span<const double> samples,
                                   const IntegratorOptions& options,
                                   const std::function<void(double, const RealState&)>& on_sample = {},
                                   const std::function<bool(double, const RealState&)>& stop = {});

}  // namespace ete
