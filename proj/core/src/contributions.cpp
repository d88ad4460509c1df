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

#include "ete/contributions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "ete/errors.hpp"

namespace ete {

namespace {

using Triplet = Eigen::Triplet<cd>;

std::string site_name(std::size_t i) { return std::to_string(i + 1); }

MaskSelector whole(std::string name, Part part) { return {std::move(name), part, {}, false}; }

void append_sinks(PartitionScheme& scheme) {
  scheme.selectors.push_back(whole("trapping", Part::trap));
  scheme.selectors.push_back(whole("recombination", Part::recomb));
  scheme.target = SchemeTarget::full;
}

SparseOperator to_sparse(const ComplexMatrix& dense) {
  std::vector<Triplet> entries;
  for (Eigen::Index j = 0; j < dense.cols(); ++j)
    for (Eigen::Index i = 0; i < dense.rows(); ++i)
      if (dense(i, j) != cd(0.0)) entries.emplace_back(i, j, dense(i, j));
  SparseOperator s(dense.rows(), dense.cols());
  s.setFromTriplets(entries.begin(), entries.end());
  s.makeCompressed();
  return s;
}

}  // namespace

PartitionScheme default_scheme(SchemeTarget target) {
  PartitionScheme scheme;
  scheme.selectors = {whole("hamiltonian", Part::coherent), whole("lamb", Part::lamb),
                      whole("relaxation", Part::relax), whole("dephasing", Part::dephase)};
  if (target == SchemeTarget::full) append_sinks(scheme);
  return scheme;
}

PartitionScheme pathway_scheme(std::size_t sites, SchemeTarget target) {
  PartitionScheme scheme;
  scheme.selectors = {whole("hamiltonian", Part::coherent), whole("lamb", Part::lamb),
                      whole("dephasing", Part::dephase)};
  for (std::size_t to = 0; to < sites; ++to) {
    for (std::size_t from = 0; from < sites; ++from) {
      const auto row = static_cast<Eigen::Index>(liouville_index(to, to, sites));
      const auto col = static_cast<Eigen::Index>(liouville_index(from, from, sites));
      std::string name = to == from ? "damping:" + site_name(to) : "jump:" + site_name(from) + "->" + site_name(to);
      scheme.selectors.push_back({std::move(name), Part::relax, {{row, col}}, false});
    }
  }
  scheme.selectors.push_back({"relaxation:residual", Part::relax, {}, true});
  if (target == SchemeTarget::full) append_sinks(scheme);
  return scheme;
}

PartitionScheme with_sinks(PartitionScheme scheme) {
  if (scheme.target == SchemeTarget::remainder) append_sinks(scheme);
  return scheme;
}

std::vector<ProcessOperator> materialize(const PartitionScheme& scheme, const Liouvillian& L) {
  const Eigen::Index dim = L.dim();
  // claimed[part] holds every element taken by an element selector
  std::map<Part, std::set<std::pair<Eigen::Index, Eigen::Index>>> claimed;
  std::map<Part, int> whole_count;
  std::set<std::string> names;
  for (const auto& sel : scheme.selectors) {
    if (!names.insert(sel.name).second) throw ConfigError("scheme", 0, "duplicate process name '" + sel.name + "'");
    if (sel.residual && !sel.elements.empty())
      throw ConfigError("scheme." + sel.name, 0, "a residual selector cannot list elements");
    if (sel.elements.empty() || sel.residual) {
      ++whole_count[sel.part];
      continue;
    }
    for (const auto& e : sel.elements) {
      if (e.first < 0 || e.first >= dim || e.second < 0 || e.second >= dim)
        throw ConfigError("scheme." + sel.name, 0, "element outside the Liouville space");
      if (!claimed[sel.part].insert(e).second)
        throw ConfigError("scheme." + sel.name, 0, "element selected by more than one process");
    }
  }
  for (const auto& [part, count] : whole_count) {
    const bool has_elements = claimed.count(part) > 0;
    const bool has_whole = std::any_of(scheme.selectors.begin(), scheme.selectors.end(), [&](const MaskSelector& s) {
      return s.part == part && s.elements.empty() && !s.residual;
    });
    if (count > 1 || (has_whole && has_elements))
      throw ConfigError("scheme", 0, "part '" + std::string(part_name(part)) + "' is selected more than once");
  }

  std::vector<ProcessOperator> ops;
  ops.reserve(scheme.selectors.size());
  for (const auto& sel : scheme.selectors) {
    const ComplexMatrix& source = L.part(sel.part);
    if (sel.residual) {
      ComplexMatrix rest = source;
      for (const auto& e : claimed[sel.part]) rest(e.first, e.second) = 0.0;
      ops.push_back({sel.name, to_sparse(rest)});
    } else if (sel.elements.empty()) {
      ops.push_back({sel.name, to_sparse(source)});
    } else {
      std::vector<Triplet> entries;
      for (const auto& e : sel.elements)
        if (source(e.first, e.second) != cd(0.0)) entries.emplace_back(e.first, e.second, source(e.first, e.second));
      SparseOperator s(dim, dim);
      s.setFromTriplets(entries.begin(), entries.end());
      ops.push_back({sel.name, std::move(s)});
    }
  }
  return ops;
}

double completeness_error(std::span<const ProcessOperator> ops, const Liouvillian& L, SchemeTarget target) {
  ComplexMatrix diff = target == SchemeTarget::full ? L.full() : L.remainder();
  for (const auto& op : ops) diff -= ComplexMatrix(op.matrix);
  return diff.size() ? diff.cwiseAbs().maxCoeff() : 0.0;
}

std::string_view measure_name(Measure measure) {
  return measure == Measure::greens ? "greens" : "susceptibility";
}

const ProcessContribution* ContributionReport::find(std::string_view name) const {
  const auto it = std::find_if(processes.begin(), processes.end(), [&](const auto& p) { return p.name == name; });
  return it == processes.end() ? nullptr : &*it;
}

const ProcessContribution& ContributionReport::at(std::string_view name) const {
  if (const auto* p = find(name)) return *p;
  throw std::out_of_range("no process named '" + std::string(name) + "' in report");
}

double ContributionReport::raw_sum() const {
  double s = 0.0;
  for (const auto& p : processes) s += p.raw;
  return s;
}

namespace {

std::pair<double, double> signed_totals(const std::vector<double>& values) {
  double pos = 0.0;
  double neg = 0.0;
  for (double v : values) (v > 0.0 ? pos : neg) += v;
  return {pos, neg};
}

double normalized_value(double v, double pos, double neg) {
  if (v > 0.0) return v / pos;
  if (v < 0.0) return v / std::abs(neg);
  return 0.0;
}

}  // namespace

ContributionReport normalize(ContributionReport report) {
  std::vector<double> raw;
  for (const auto& p : report.processes) raw.push_back(p.raw);
  const auto [pos, neg] = signed_totals(raw);
  if (pos == 0.0 && neg == 0.0) throw PreconditionError("cannot normalize: every contribution is zero");
  for (auto& p : report.processes) p.normalized = normalized_value(p.raw, pos, neg);
  if (report.pathways) {
    const auto n = report.pathways->raw.rows();
    report.pathways = pathway_matrix(report, static_cast<std::size_t>(n));
  }
  return report;
}

std::optional<PathwayMatrix> pathway_matrix(const ContributionReport& report, std::size_t sites) {
  const auto n = static_cast<Eigen::Index>(sites);
  PathwayMatrix pm;
  pm.raw = RealMatrix::Zero(n, n);
  bool any = false;
  for (std::size_t to = 0; to < sites; ++to) {
    for (std::size_t from = 0; from < sites; ++from) {
      const std::string name =
          to == from ? "damping:" + site_name(to) : "jump:" + site_name(from) + "->" + site_name(to);
      if (const auto* p = report.find(name)) {
        pm.raw(to, from) = p->raw;
        any = true;
      }
    }
  }
  if (!any) return std::nullopt;
  if (const auto* r = report.find("relaxation:residual")) pm.residual_raw = r->raw;

  std::vector<double> values(pm.raw.data(), pm.raw.data() + pm.raw.size());
  values.push_back(pm.residual_raw);
  const auto [pos, neg] = signed_totals(values);
  pm.normalized = RealMatrix::Zero(n, n);
  if (pos != 0.0 || neg != 0.0) {
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) pm.normalized(i, j) = normalized_value(pm.raw(i, j), pos, neg);
    pm.residual_normalized = normalized_value(pm.residual_raw, pos, neg);
  }
  return pm;
}

// ---------------------------------------------------------------------------

ContributionReport greens_contributions(const Liouvillian& L, const DensityMatrix& rho0,
                                        const PartitionScheme& scheme) {
  const std::size_t n = L.sites();
  for (const auto& sel : scheme.selectors)
    if (sel.part == Part::trap || sel.part == Part::recomb)
      throw PreconditionError("Green's measure: process '" + sel.name +
                              "' selects a sink part; sinks form the reference generator");
  const RealVector& kappa = L.trap_rates();
  const double gamma = L.recombination_rate();
  for (std::size_t m = 0; m < n; ++m)
    if (!(kappa(m) + gamma > 0.0))
      throw PreconditionError("Green's measure needs kappa_m + Gamma > 0 on every site; site " + site_name(m) +
                              " has neither trapping nor recombination");

  const auto ops = materialize(scheme, L);
  const Resolvent resolvent(L);
  const ComplexVector x = resolvent.solve(vectorize(rho0));

  ContributionReport report;
  report.measure = Measure::greens;
  report.model_hash = L.model_hash();
  report.eta = -L.trap_density(x);
  report.eta_bar = -L.recomb_density(x);

  // H_recomb H_ref^{-1} is diagonal on populations: weight Gamma / (kappa_m + Gamma).
  RealVector weight(n);
  for (std::size_t m = 0; m < n; ++m) weight(m) = gamma / (kappa(m) + gamma);
  for (std::size_t m = 0; m < n; ++m) report.reference += (1.0 - weight(m)) * rho0(m, m).real();

  for (const auto& op : ops) {
    const ComplexVector y = op.matrix * x;
    double eta_k = 0.0;
    for (std::size_t m = 0; m < n; ++m) eta_k += weight(m) * y(liouville_index(m, m, n)).real();
    report.processes.push_back({op.name, eta_k, std::nullopt});
  }

  auto& diag = report.diagnostics;
  diag.completeness_error = completeness_error(ops, L, SchemeTarget::remainder);
  diag.scheme_complete = diag.completeness_error <= kCompletenessTolerance * std::max(1.0, L.full().cwiseAbs().maxCoeff());
  diag.partition_residual = report.raw_sum() + report.reference - report.eta;
  if (!diag.scheme_complete) diag.warnings.push_back("scheme is not complete with respect to R; sum_k eta_k != eta");
  report.pathways = pathway_matrix(report, n);
  return report;
}

// ---------------------------------------------------------------------------

namespace {

// Joint state layout (as doubles):
//   [ vec(rho) | sigma_0 | ... | sigma_{K-1} ]  complex, (K + 1) * dim entries
//   [ g_0 .. g_{K-1} | eta_0 .. eta_{K-1} | trapped | recombined ]  real
struct JointLayout {
  Eigen::Index dim;
  Eigen::Index k;
  std::size_t complex_doubles() const { return static_cast<std::size_t>(2 * dim * (k + 1)); }
  std::size_t g(Eigen::Index i) const { return complex_doubles() + static_cast<std::size_t>(i); }
  std::size_t eta(Eigen::Index i) const { return complex_doubles() + static_cast<std::size_t>(k + i); }
  std::size_t trapped() const { return complex_doubles() + static_cast<std::size_t>(2 * k); }
  std::size_t recombined() const { return trapped() + 1; }
  std::size_t size() const { return recombined() + 1; }
};

class JointSystem {
 public:
  JointSystem(const Liouvillian& L, std::span<const ProcessOperator> ops) : L_(L), ops_(ops) {
    layout_ = {L.dim(), static_cast<Eigen::Index>(ops.size())};
  }

  const JointLayout& layout() const { return layout_; }

  Eigen::Map<const ComplexMatrix> block(const RealState& x) const {
    return {reinterpret_cast<const cd*>(x.data()), layout_.dim, layout_.k + 1};
  }

  void operator()(const RealState& x, RealState& dx, double t) const {
    const Eigen::Index dim = layout_.dim;
    const auto state = block(x);
    Eigen::Map<ComplexMatrix> dstate(reinterpret_cast<cd*>(dx.data()), dim, layout_.k + 1);
    dstate.noalias() = L_.full() * state;
    const auto rho = state.col(0);
    for (Eigen::Index k = 0; k < layout_.k; ++k) {
      dstate.col(k + 1) += ops_[static_cast<std::size_t>(k)].matrix * rho;
      // s_k(t) / t; at t = 0 sigma_k vanishes and the ratio tends to d s_k / dt
      const double s_over_t = t > 0.0 ? L_.trap_density(state.col(k + 1)) / t : L_.trap_density(dstate.col(k + 1));
      dx[layout_.g(k)] = s_over_t;
      dx[layout_.eta(k)] = x[layout_.g(k)];
    }
    dx[layout_.trapped()] = L_.trap_density(rho);
    dx[layout_.recombined()] = L_.recomb_density(rho);
  }

 private:
  const Liouvillian& L_;
  std::span<const ProcessOperator> ops_;
  JointLayout layout_;
};

void check_no_trap_overlap(const Liouvillian& L, const DensityMatrix& rho0) {
  const std::size_t n = L.sites();
  for (std::size_t m = 0; m < n; ++m) {
    if (L.trap_rates()(m) <= 0.0) continue;
    if (rho0.row(m).cwiseAbs().maxCoeff() > 1e-12 || rho0.col(m).cwiseAbs().maxCoeff() > 1e-12)
      throw PreconditionError("initial state overlaps trap site " + site_name(m));
  }
}

}  // namespace

SensitivityTrajectory sensitivity_trajectory(const Liouvillian& L, std::span<const ProcessOperator> ops,
                                             const DensityMatrix& rho0, double horizon, std::span<const double> grid,
                                             const IntegratorOptions& options) {
  const JointSystem system(L, ops);
  const auto& layout = system.layout();
  RealState x(layout.size(), 0.0);
  Eigen::Map<ComplexVector>(reinterpret_cast<cd*>(x.data()), layout.dim) = vectorize(rho0);

  SensitivityTrajectory out;
  const auto sample = [&](double t, const RealState& s) {
    const auto state = system.block(s);
    out.times.push_back(t);
    out.rho.emplace_back(state.col(0));
    std::vector<ComplexVector> sig;
    sig.reserve(static_cast<std::size_t>(layout.k));
    for (Eigen::Index k = 0; k < layout.k; ++k) sig.emplace_back(state.col(k + 1));
    out.sigma.push_back(std::move(sig));
  };
  integrate_dense(std::cref(system), x, horizon, grid, options, sample);
  return out;
}

ContributionReport susceptibility_contributions(const Liouvillian& L, const DensityMatrix& rho0,
                                                const PartitionScheme& input_scheme,
                                                const SusceptibilityOptions& options) {
  check_no_trap_overlap(L, rho0);
  if (!L.has_sink()) throw PreconditionError("no trap or recombination sink: efficiency is undefined");
  const PartitionScheme scheme = with_sinks(input_scheme);
  const auto ops = materialize(scheme, L);
  const double horizon = options.horizon.value_or(default_horizon(L));
  if (!(horizon > 0.0)) throw PreconditionError("susceptibility horizon must be > 0");

  const JointSystem system(L, ops);
  const auto& layout = system.layout();
  RealState x(layout.size(), 0.0);
  Eigen::Map<ComplexVector>(reinterpret_cast<cd*>(x.data()), layout.dim) = vectorize(rho0);

  const double threshold = std::max(options.tail_threshold, 10.0 * options.integrator.abs_tol);
  const auto decayed = [&](double, const RealState& s) {
    return system.block(s).cwiseAbs().maxCoeff() < threshold;
  };
  const IntegrationSummary summary = integrate_dense(std::cref(system), x, horizon, {}, options.integrator, {}, decayed);

  ContributionReport report;
  report.measure = Measure::susceptibility;
  report.model_hash = L.model_hash();
  const double remaining = horizon - summary.final_time;
  report.eta = x[layout.trapped()];
  report.eta_bar = x[layout.recombined()];
  auto& diag = report.diagnostics;
  for (Eigen::Index k = 0; k < layout.k; ++k) {
    const double g = x[layout.g(k)];
    const double eta_k = x[layout.eta(k)] + g * remaining;
    report.processes.push_back({ops[static_cast<std::size_t>(k)].name, eta_k, std::nullopt});
    diag.tail_rates.emplace_back(ops[static_cast<std::size_t>(k)].name, g);
  }

  diag.horizon = horizon;
  diag.stop_time = summary.final_time;
  diag.tail_extrapolated = summary.stopped_early;
  diag.steps = summary.steps;
  diag.rel_tol = options.integrator.rel_tol;
  diag.abs_tol = options.integrator.abs_tol;
  {
    double tr = 0.0;
    const auto rho = system.block(x).col(0);
    for (std::size_t m = 0; m < L.sites(); ++m) tr += rho(liouville_index(m, m, L.sites())).real();
    diag.residual_population = tr;
  }
  diag.completeness_error = completeness_error(ops, L, SchemeTarget::full);
  diag.scheme_complete = diag.completeness_error <= kCompletenessTolerance * std::max(1.0, L.full().cwiseAbs().maxCoeff());
  diag.partition_residual = report.raw_sum() - report.eta;
  if (!diag.scheme_complete) diag.warnings.push_back("scheme is not complete with respect to M; sum_k eta_k != eta");
  if (std::abs(diag.residual_population) > 1e-3)
    diag.warnings.push_back("horizon too short: residual population " + std::to_string(diag.residual_population));
  double max_tail = 0.0;
  for (const auto& [name, g] : diag.tail_rates) max_tail = std::max(max_tail, std::abs(g));
  if (max_tail * horizon > 1e-6) {
    std::ostringstream os;
    os << "individual contributions keep growing linearly past t = " << diag.stop_time
       << " ps (max |g_k| = " << max_tail << " ps^-1); raw values scale with the horizon, normalized values converge";
    diag.warnings.push_back(os.str());
  }

  report.pathways = pathway_matrix(report, L.sites());
  return normalize(std::move(report));
}

}  // namespace ete
