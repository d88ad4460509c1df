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

#include "ete/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ete/errors.hpp"
#include "ete/hash.hpp"

namespace ete {

namespace {

constexpr double kSymmetryTolerance = 1e-12;

bool all_finite(const Eigen::Ref<const RealMatrix>& m) { return m.allFinite(); }

std::string site_label(Eigen::Index i) { return std::to_string(i + 1); }

}  // namespace

bool SystemModel::has_sink() const {
  return recombination_rate > 0.0 || (trap_rates.size() > 0 && trap_rates.maxCoeff() > 0.0);
}

std::vector<std::string> model_problems(const SystemModel& model) {
  std::vector<std::string> problems;
  const Eigen::Index n = model.site_energies.size();
  if (n < 2) problems.push_back("model needs at least 2 sites, got " + std::to_string(n));
  if (!all_finite(model.site_energies)) problems.push_back("site energies must be finite");

  if (model.couplings.rows() != n || model.couplings.cols() != n) {
    problems.push_back("couplings must be " + std::to_string(n) + "x" + std::to_string(n));
  } else {
    if (!all_finite(model.couplings)) problems.push_back("couplings must be finite");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (model.couplings(i, i) != 0.0)
        problems.push_back("coupling diagonal (" + site_label(i) + "," + site_label(i) + ") must be zero");
      for (Eigen::Index j = i + 1; j < n; ++j)
        if (std::abs(model.couplings(i, j) - model.couplings(j, i)) > kSymmetryTolerance)
          problems.push_back("couplings not symmetric at (" + site_label(i) + "," + site_label(j) + ")");
    }
  }

  if (model.trap_rates.size() != n) {
    problems.push_back("trap_rates must have one entry per site");
  } else {
    for (Eigen::Index i = 0; i < n; ++i)
      if (!(model.trap_rates(i) >= 0.0) || !std::isfinite(model.trap_rates(i)))
        problems.push_back("trap rate of site " + site_label(i) + " must be finite and >= 0");
  }
  if (model.disorder_fwhm.size() != n) {
    problems.push_back("disorder fwhm must have one entry per site");
  } else {
    for (Eigen::Index i = 0; i < n; ++i)
      if (!(model.disorder_fwhm(i) >= 0.0) || !std::isfinite(model.disorder_fwhm(i)))
        problems.push_back("fwhm of site " + site_label(i) + " must be finite and >= 0");
  }

  if (!(model.recombination_rate >= 0.0) || !std::isfinite(model.recombination_rate))
    problems.push_back("gamma_recomb must be finite and >= 0");
  if (!(model.temperature >= 0.0) || !std::isfinite(model.temperature))
    problems.push_back("temperature must be finite and >= 0");
  if (!(model.reorganization_energy >= 0.0) || !std::isfinite(model.reorganization_energy))
    problems.push_back("reorganization_energy must be finite and >= 0");
  if (!(model.cutoff > 0.0) || !std::isfinite(model.cutoff)) problems.push_back("cutoff must be finite and > 0");
  if (!(model.correlation_radius >= 0.0)) problems.push_back("correlation_radius must be >= 0");

  if (model.distances) {
    const RealMatrix& r = *model.distances;
    if (r.rows() != n || r.cols() != n) {
      problems.push_back("distances must be " + std::to_string(n) + "x" + std::to_string(n));
    } else {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (r(i, i) != 0.0) problems.push_back("distance diagonal must be zero at site " + site_label(i));
        for (Eigen::Index j = i + 1; j < n; ++j) {
          if (std::abs(r(i, j) - r(j, i)) > kSymmetryTolerance)
            problems.push_back("distances not symmetric at (" + site_label(i) + "," + site_label(j) + ")");
          if (!(r(i, j) >= 0.0) || !std::isfinite(r(i, j)))
            problems.push_back("distance (" + site_label(i) + "," + site_label(j) + ") must be finite and >= 0");
        }
      }
    }
  } else if (model.correlation_radius > 0.0) {
    problems.push_back("correlation_radius > 0 requires distances or site positions");
  }

  return problems;
}

std::vector<std::string> model_warnings(const SystemModel& model) {
  std::vector<std::string> warnings;
  if (!model.has_sink())
    warnings.push_back("no sink: every trap rate is zero and gamma_recomb is zero; efficiency and contribution "
                       "operations will fail");
  return warnings;
}

void validate(const SystemModel& model) {
  const auto problems = model_problems(model);
  if (problems.empty()) return;
  std::ostringstream os;
  os << "invalid model";
  for (const auto& p : problems) os << "\n  - " << p;
  throw ConfigError(os.str());
}

std::uint64_t model_hash(const SystemModel& model) {
  Fnv1a h;
  h.update(std::string_view("ete-model-v1"));
  const auto put = [&h](const auto& m) {
    h.update(static_cast<std::uint64_t>(m.rows()));
    h.update(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) h.update(static_cast<double>(m(i, j)));
  };
  put(model.site_energies);
  put(model.couplings);
  h.update(static_cast<std::uint64_t>(model.distances.has_value()));
  if (model.distances) put(*model.distances);
  put(model.trap_rates);
  put(model.disorder_fwhm);
  for (double v : {model.recombination_rate, model.temperature, model.reorganization_energy, model.cutoff,
                   model.correlation_radius})
    h.update(v);
  return h.digest();
}

HermitianMatrix build_site_hamiltonian(const SystemModel& model) {
  const Eigen::Index n = model.site_energies.size();
  HermitianMatrix h = model.couplings.cast<cd>();
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = model.site_energies(i);
  return h;
}

std::vector<std::pair<std::size_t, std::size_t>> ExcitonBasis::degeneracies(double tolerance) const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (Eigen::Index i = 0; i + 1 < energies.size(); ++i)
    if (energies(i + 1) - energies(i) < tolerance) out.emplace_back(i, i + 1);
  return out;
}

ExcitonBasis diagonalize(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");

  // Eigen already returns ascending eigenvalues; the explicit sort keeps the
  // contract independent of that detail.
  const Eigen::Index n = h.rows();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return solver.eigenvalues()(a) < solver.eigenvalues()(b); });

  ExcitonBasis basis;
  basis.energies.resize(n);
  basis.coefficients.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    basis.energies(k) = solver.eigenvalues()(order[k]);
    ComplexVector col = solver.eigenvectors().col(order[k]);
    // Fix the global phase: largest-magnitude component real and positive.
    Eigen::Index imax = 0;
    col.cwiseAbs().maxCoeff(&imax);
    col *= std::conj(col(imax)) / std::abs(col(imax));
    basis.coefficients.col(k) = col;
  }
  return basis;
}

RealMatrix correlation_matrix(const SystemModel& model) {
  const Eigen::Index n = model.site_energies.size();
  const double rc = model.correlation_radius;
  if (rc == 0.0) return RealMatrix::Identity(n, n);
  if (std::isinf(rc)) return RealMatrix::Ones(n, n);
  if (!model.distances) throw ConfigError("correlation_radius", 0, "R_c > 0 requires distances or site positions");
  RealMatrix c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = (i == j) ? 1.0 : std::exp(-(*model.distances)(i, j) / rc);
  return c;
}

double fwhm_to_sigma(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

SystemModel sample_disorder(const SystemModel& model, std::uint64_t seed) {
  SystemModel out = model;
  std::mt19937_64 rng(seed);
  for (Eigen::Index i = 0; i < out.site_energies.size(); ++i) {
    const double sigma = fwhm_to_sigma(model.disorder_fwhm(i));
    // Draw for every site, even sigma = 0, so site k always uses the k-th variate.
    std::normal_distribution<double> normal(0.0, 1.0);
    out.site_energies(i) += sigma * normal(rng);
  }
  return out;
}

namespace {

void check_site(std::size_t site, std::size_t n, const char* what) {
  if (site >= n)
    throw ConfigError("initial_state", 0,
                      std::string(what) + " site " + std::to_string(site + 1) + " outside 1.." + std::to_string(n));
}

}  // namespace

DensityMatrix initial_state(const SystemModel& model, const InitialStateSpec& spec) {
  const std::size_t n = model.sites();
  const auto dim = static_cast<Eigen::Index>(n);
  return std::visit(
      [&](const auto& s) -> DensityMatrix {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, initial::SingleSite>) {
          check_site(s.site, n, "initial");
          DensityMatrix rho = DensityMatrix::Zero(dim, dim);
          rho(s.site, s.site) = 1.0;
          return rho;
        } else if constexpr (std::is_same_v<T, initial::MixtureExcluding>) {
          std::vector<bool> keep(n, true);
          for (std::size_t e : s.excluded) {
            check_site(e, n, "excluded");
            keep[e] = false;
          }
          const auto count = std::count(keep.begin(), keep.end(), true);
          if (count == 0) throw ConfigError("initial_state", 0, "mixture excludes every site");
          DensityMatrix rho = DensityMatrix::Zero(dim, dim);
          for (std::size_t i = 0; i < n; ++i)
            if (keep[i]) rho(i, i) = 1.0 / static_cast<double>(count);
          return rho;
        } else {
          const DensityMatrix& rho = s.rho;
          if (rho.rows() != dim || rho.cols() != dim)
            throw ConfigError("initial_state", 0, "explicit matrix must be " + std::to_string(n) + "x" + std::to_string(n));
          if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw ConfigError("initial_state", 0, "explicit matrix is not Hermitian");
          if (std::abs(rho.trace() - cd(1.0)) > 1e-8)
            throw ConfigError("initial_state", 0, "explicit matrix must have unit trace");
          Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
          if (es.eigenvalues().minCoeff() < -1e-8)
            throw ConfigError("initial_state", 0, "explicit matrix is not positive semidefinite");
          return rho;
        }
      },
      spec);
}

std::string describe(const InitialStateSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, initial::SingleSite>) {
          return "site " + std::to_string(s.site + 1);
        } else if constexpr (std::is_same_v<T, initial::MixtureExcluding>) {
          std::string out = "mixture excluding {";
          for (std::size_t i = 0; i < s.excluded.size(); ++i) out += (i ? "," : "") + std::to_string(s.excluded[i] + 1);
          return out + "}";
        } else {
          return "explicit matrix";
        }
      },
      spec);
}

}  // namespace ete
