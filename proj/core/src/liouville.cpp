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

#include "ete/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "ete/errors.hpp"
#include "ete/hash.hpp"
#include "ete/quantities.hpp"

namespace ete {

namespace {

constexpr cd kI{0.0, 1.0};

// Complex views over the leading 2 * dim doubles of an integrator state.
Eigen::Map<const ComplexVector> complex_view(const RealState& x, Eigen::Index dim, Eigen::Index offset = 0) {
  return {reinterpret_cast<const cd*>(x.data()) + offset, dim};
}
Eigen::Map<ComplexVector> complex_view(RealState& x, Eigen::Index dim, Eigen::Index offset = 0) {
  return {reinterpret_cast<cd*>(x.data()) + offset, dim};
}

}  // namespace

std::string_view part_name(Part part) {
  switch (part) {
    case Part::coherent: return "coherent";
    case Part::lamb: return "lamb";
    case Part::relax: return "relax";
    case Part::dephase: return "dephase";
    case Part::trap: return "trap";
    case Part::recomb: return "recomb";
  }
  return "unknown";
}

Liouvillian::Liouvillian(std::size_t sites, std::array<ComplexMatrix, 6> parts, RealVector trap_rates,
                         double recombination_rate, std::uint64_t model_hash)
    : sites_(sites),
      parts_(std::move(parts)),
      trap_rates_(std::move(trap_rates)),
      recombination_rate_(recombination_rate),
      model_hash_(model_hash) {
  const auto dim = static_cast<Eigen::Index>(sites_ * sites_);
  full_ = ComplexMatrix::Zero(dim, dim);
  for (auto& p : parts_) {
    if (p.size() == 0) p = ComplexMatrix::Zero(dim, dim);
    if (p.rows() != dim || p.cols() != dim) throw std::invalid_argument("Liouvillian part has wrong dimension");
    full_ += p;
  }
  if (trap_rates_.size() != static_cast<Eigen::Index>(sites_))
    throw std::invalid_argument("Liouvillian: one trap rate per site required");
}

ComplexMatrix Liouvillian::remainder() const { return full_ - part(Part::trap) - part(Part::recomb); }

bool Liouvillian::has_sink() const { return recombination_rate_ > 0.0 || trap_rates_.maxCoeff() > 0.0; }

double Liouvillian::trap_density(const Eigen::Ref<const ComplexVector>& vec_rho) const {
  double p = 0.0;
  for (std::size_t m = 0; m < sites_; ++m)
    if (trap_rates_(m) != 0.0) p += trap_rates_(m) * vec_rho(liouville_index(m, m, sites_)).real();
  return 2.0 * p;
}

double Liouvillian::recomb_density(const Eigen::Ref<const ComplexVector>& vec_rho) const {
  double tr = 0.0;
  for (std::size_t m = 0; m < sites_; ++m) tr += vec_rho(liouville_index(m, m, sites_)).real();
  return 2.0 * recombination_rate_ * tr;
}

ComplexMatrix sandwich(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index n = a.rows();
  ComplexMatrix s(n * n, n * n);
  // block (i, j) = b(j, i) * a
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) s.block(i * n, j * n, n, n) = b(j, i) * a;
  return s;
}

ComplexMatrix commutator_superop(const ComplexMatrix& h) {
  const auto id = ComplexMatrix::Identity(h.rows(), h.cols());
  return sandwich(h, id) - sandwich(id, h);
}

ComplexMatrix anticommutator_superop(const ComplexMatrix& h) {
  const auto id = ComplexMatrix::Identity(h.rows(), h.cols());
  return sandwich(h, id) + sandwich(id, h);
}

namespace {

// Adds rate * sum_mn C_mn [A_m X A_n^+ - 1/2 {A_n^+ A_m, X}] for one frequency group.
void add_lindblad_group(ComplexMatrix& target, const std::vector<ComplexMatrix>& generators, const RealMatrix& corr,
                        double rate) {
  const std::size_t n = generators.size();
  const Eigen::Index d = generators.front().rows();
  ComplexMatrix decay = ComplexMatrix::Zero(d, d);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t k = 0; k < n; ++k) {
      const double c = corr(m, k);
      if (c == 0.0) continue;
      target += (rate * c) * sandwich(generators[m], generators[k].adjoint());
      decay += c * generators[k].adjoint() * generators[m];
    }
  }
  target -= (0.5 * rate) * anticommutator_superop(decay);
}

}  // namespace

Liouvillian assemble(const SystemModel& model, const AssemblyOptions& options) {
  validate(model);
  const std::size_t n = model.sites();
  const auto dim = static_cast<Eigen::Index>(n * n);
  const double inv_hbar = 1.0 / units::kHbar;

  const HermitianMatrix h = build_site_hamiltonian(model);
  const ExcitonBasis basis = diagonalize(h);
  const RealMatrix corr = correlation_matrix(model);
  const BathSpectrum spectrum = BathSpectrum::from(model);

  std::array<ComplexMatrix, 6> parts;
  for (auto& p : parts) p = ComplexMatrix::Zero(dim, dim);
  auto& coherent = parts[static_cast<std::size_t>(Part::coherent)];
  auto& lamb = parts[static_cast<std::size_t>(Part::lamb)];
  auto& relax = parts[static_cast<std::size_t>(Part::relax)];
  auto& dephase = parts[static_cast<std::size_t>(Part::dephase)];
  auto& trap = parts[static_cast<std::size_t>(Part::trap)];
  auto& recomb = parts[static_cast<std::size_t>(Part::recomb)];

  coherent = (-kI * inv_hbar) * commutator_superop(h);

  if (model.reorganization_energy > 0.0) {
    lamb = (-kI * inv_hbar) * commutator_superop(lamb_shift(basis, model.reorganization_energy, corr));

    const TransitionTable table = secular_transitions(basis, options.grouping_tolerance);
    std::vector<ComplexMatrix> generators(n);
    for (const auto& group : table.groups) {
      const bool pure_dephasing = group.omega == 0.0;
      const double rate = pure_dephasing ? dephasing_rate(model.temperature, spectrum)
                                         : transition_rate(group.omega, model.temperature, spectrum);
      if (rate == 0.0) continue;
      for (std::size_t m = 0; m < n; ++m) generators[m] = lindblad_generator(basis, group, m);
      add_lindblad_group(pure_dephasing ? dephase : relax, generators, corr, rate);
    }
  }

  const ComplexMatrix kappa = model.trap_rates.cast<cd>().asDiagonal();
  trap = -anticommutator_superop(kappa);
  recomb = ComplexMatrix::Identity(dim, dim) * cd(-2.0 * model.recombination_rate);

  return Liouvillian(n, std::move(parts), model.trap_rates, model.recombination_rate, model_hash(model));
}

std::vector<double> uniform_grid(double t0, double t1, double dt) {
  if (!(dt > 0.0) || t1 < t0) throw std::invalid_argument("uniform_grid: need dt > 0 and t1 >= t0");
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9));
  grid.reserve(count + 2);
  for (std::size_t i = 0; i <= count; ++i) grid.push_back(t0 + static_cast<double>(i) * dt);
  if (t1 - grid.back() > 1e-9 * std::max(1.0, t1)) grid.push_back(t1);
  return grid;
}

double default_horizon(const Liouvillian& L) {
  if (L.recombination_rate() > 0.0) return 5.0 / L.recombination_rate();
  const double kmax = L.trap_rates().maxCoeff();
  if (kmax > 0.0) return 100.0 / kmax;
  throw PreconditionError("no trap or recombination sink: efficiency horizon is undefined");
}

namespace {

void check_density(const DensityMatrix& rho, std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(n);
  if (rho.rows() != dim || rho.cols() != dim)
    throw PreconditionError("initial state must be " + std::to_string(n) + "x" + std::to_string(n));
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw PreconditionError("initial state is not Hermitian");
}

}  // namespace

Trajectory propagate(const Liouvillian& L, const DensityMatrix& rho0, double horizon, std::span<const double> grid,
                     const IntegratorOptions& options) {
  check_density(rho0, L.sites());
  if (!(horizon > 0.0)) throw PreconditionError("propagation horizon must be > 0");
  const Eigen::Index dim = L.dim();
  const auto n = static_cast<Eigen::Index>(L.sites());
  const ComplexMatrix& M = L.full();

  // state: vec(rho) (complex), then cumulative trapped and recombined probability
  RealState x(2 * dim + 2, 0.0);
  complex_view(x, dim) = vectorize(rho0);

  const auto rhs = [&](const RealState& s, RealState& ds, double) {
    const auto rho = complex_view(s, dim);
    complex_view(ds, dim).noalias() = M * rho;
    ds[2 * dim] = L.trap_density(rho);
    ds[2 * dim + 1] = L.recomb_density(rho);
  };

  Trajectory traj;
  traj.model_hash = L.model_hash();
  const auto sample = [&](double t, const RealState& s) {
    const auto rho = complex_view(s, dim);
    traj.times.push_back(t);
    traj.states.push_back(unvectorize(rho, n));
    traj.trace.push_back(traj.states.back().trace().real());
    traj.p_trap.push_back(L.trap_density(rho));
    traj.p_recomb.push_back(L.recomb_density(rho));
    traj.trapped.push_back(s[2 * dim]);
    traj.recombined.push_back(s[2 * dim + 1]);
  };
  for (const double t : grid)
    if (t < 0.0 || t > horizon * (1.0 + 1e-12)) throw PreconditionError("output grid must lie within [0, horizon]");
  integrate_dense(rhs, x, horizon, grid, options, sample);
  return traj;
}

TimeDomainEte ete_time_domain(const Liouvillian& L, const DensityMatrix& rho0, const TimeDomainOptions& options) {
  check_density(rho0, L.sites());
  if (!L.has_sink()) throw PreconditionError("no trap or recombination sink: efficiency is undefined");
  const double horizon = options.horizon.value_or(default_horizon(L));
  const std::vector<double> last{horizon};
  const Trajectory traj = propagate(L, rho0, horizon, last, options.integrator);

  TimeDomainEte out;
  out.horizon = horizon;
  out.eta = traj.trapped.back();
  out.eta_bar = traj.recombined.back();
  out.residual = traj.trace.back();
  out.converged = std::abs(out.residual) < options.tolerance;
  const double flux = traj.p_trap.back() + traj.p_recomb.back();
  out.eta_tail_corrected = out.eta + (flux > 0.0 ? out.residual * traj.p_trap.back() / flux : 0.0);
  return out;
}

Resolvent::Resolvent(const Liouvillian& L) {
  if (!L.has_sink())
    throw PreconditionError(
        "generator is singular: no sink present (set a trap_rate on some site or gamma_recomb > 0)");
  lu_.compute(L.full());
  const double rcond = lu_.rcond();
  if (!(rcond > 1e-14)) throw NumericalError("generator is numerically singular (rcond = " + std::to_string(rcond) + ")");
}

ComplexVector Resolvent::solve(const ComplexVector& v) const { return lu_.solve(v); }

GreensEte ete_greens(const Liouvillian& L, const DensityMatrix& rho0) {
  check_density(rho0, L.sites());
  const Resolvent resolvent(L);
  const ComplexVector x = resolvent.solve(vectorize(rho0));
  // integral_0^inf rho dt = -M^{-1} rho0
  return {-L.trap_density(x), -L.recomb_density(x)};
}

std::optional<double> transfer_time(const Trajectory& traj) {
  if (traj.times.size() < 2) throw PreconditionError("transfer_time needs at least two samples");
  if (std::abs(traj.trace.back()) > 1e-3)
    throw PreconditionError("trajectory not converged: residual population " + std::to_string(traj.trace.back()) +
                            " at t = " + std::to_string(traj.times.back()) + " ps");
  double moment = 0.0;
  double mass = 0.0;
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    const double dt = traj.times[i] - traj.times[i - 1];
    mass += 0.5 * dt * (traj.p_trap[i] + traj.p_trap[i - 1]);
    moment += 0.5 * dt * (traj.times[i] * traj.p_trap[i] + traj.times[i - 1] * traj.p_trap[i - 1]);
  }
  if (!(mass > 0.0)) return std::nullopt;
  return moment / mass;
}

std::optional<double> transfer_time(const Liouvillian& L, const DensityMatrix& rho0) {
  check_density(rho0, L.sites());
  const Resolvent resolvent(L);
  const ComplexVector x = resolvent.solve(vectorize(rho0));
  const double eta = -L.trap_density(x);
  if (!(eta > 0.0)) return std::nullopt;
  // integral_0^inf t rho(t) dt = M^{-2} rho0
  return L.trap_density(resolvent.solve(x)) / eta;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const TrajectoryCsvOptions& options) {
  const std::size_t n = traj.states.empty() ? 0 : static_cast<std::size_t>(traj.states.front().rows());
  os << "# model_hash=" << hex_digest(traj.model_hash) << '\n';
  os << "t,trace,p_trap,p_recomb";
  for (std::size_t m = 0; m < n; ++m) os << ",rho_" << m + 1 << '_' << m + 1;
  if (options.coherences)
    for (std::size_t m = 0; m < n; ++m)
      for (std::size_t k = m + 1; k < n; ++k) os << ",abs_rho_" << m + 1 << '_' << k + 1;
  os << ",trapped,recombined\n";
  os << std::setprecision(12);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& rho = traj.states[i];
    os << traj.times[i] << ',' << traj.trace[i] << ',' << traj.p_trap[i] << ',' << traj.p_recomb[i];
    for (std::size_t m = 0; m < n; ++m) os << ',' << rho(m, m).real();
    if (options.coherences)
      for (std::size_t m = 0; m < n; ++m)
        for (std::size_t k = m + 1; k < n; ++k) os << ',' << std::abs(rho(m, k));
    os << ',' << traj.trapped[i] << ',' << traj.recombined[i] << '\n';
  }
}

}  // namespace ete
