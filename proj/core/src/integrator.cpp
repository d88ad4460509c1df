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

#include "ete/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "ete/errors.hpp"

namespace ete {

namespace odeint = boost::numeric::odeint;

IntegrationSummary integrate_dense(const OdeRhs& rhs, RealState& x, double t_end, std::span<const double> samples,
                                   const IntegratorOptions& options,
                                   const std::function<void(double, const RealState&)>& on_sample,
                                   const std::function<bool(double, const RealState&)>& stop) {
  if (!(t_end > 0.0)) throw NumericalError("integration horizon must be > 0");
  if (!std::is_sorted(samples.begin(), samples.end()))
    throw NumericalError("sample times must be ascending");

  auto stepper = odeint::make_dense_output(options.abs_tol, options.rel_tol, odeint::runge_kutta_dopri5<RealState>());
  auto system = [&rhs](const RealState& s, RealState& ds, double t) { rhs(s, ds, t); };

  IntegrationSummary summary;
  std::size_t next = 0;
  RealState buffer(x.size());
  while (next < samples.size() && samples[next] <= 0.0) {
    if (on_sample) on_sample(samples[next], x);
    ++next;
  }

  stepper.initialize(x, 0.0, std::min(options.initial_step, t_end));
  double t = 0.0;
  try {
    while (t < t_end) {
      const auto [t0, t1] = stepper.do_step(system);
      ++summary.steps;
      const double h = t1 - t0;
      if (!std::isfinite(t1) || h <= 1e-14 * std::max(1.0, std::abs(t1)))
        throw NumericalError("step size underflow (h = " + std::to_string(h) + ")", t0);
      if (summary.steps > options.max_steps) throw NumericalError("maximum number of integration steps exceeded", t1);
      t = t1;
      while (next < samples.size() && samples[next] <= std::min(t, t_end)) {
        stepper.calc_state(samples[next], buffer);
        if (on_sample) on_sample(samples[next], buffer);
        ++next;
      }
      if (stop && t < t_end && stop(t, stepper.current_state())) {
        summary.stopped_early = true;
        break;
      }
    }
  } catch (const odeint::step_adjustment_error& e) {
    throw NumericalError(std::string("integrator failed: ") + e.what(), t);
  }

  if (summary.stopped_early) {
    x = stepper.current_state();
    summary.final_time = t;
  } else {
    stepper.calc_state(t_end, x);
    summary.final_time = t_end;
  }
  for (const double v : x)
    if (!std::isfinite(v)) throw NumericalError("non-finite state", summary.final_time);
  return summary;
}

}  // namespace ete
