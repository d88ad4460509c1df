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

#include "oracles.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <unsupported/Eigen/MatrixFunctions>

namespace ete::oracle {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double correlation(const SystemModel& m, Eigen::Index a, Eigen::Index b) {
  if (a == b) return 1.0;
  if (m.correlation_radius == 0.0) return 0.0;
  if (std::isinf(m.correlation_radius)) return 1.0;
  return std::exp(-(*m.distances)(a, b) / m.correlation_radius);
}

// Emission (w > 0) or absorption (w < 0) rate for a transition of angular frequency w.
double rate(const SystemModel& m, double w) {
  const double wc = m.cutoff / kHbar;
  const auto J = [&](double x) { return x > 0.0 ? m.reorganization_energy / m.cutoff * x * std::exp(-x / wc) : 0.0; };
  const auto nb = [&](double x) {
    if (m.temperature == 0.0) return 0.0;
    return 1.0 / (std::exp(kHbar * x / (kBoltzmann * m.temperature)) - 1.0);
  };
  if (w > 0.0) return kTwoPi * J(w) * (1.0 + nb(w));
  return kTwoPi * J(-w) * nb(-w);
}

}  // namespace

DensityMatrix master_rhs(const SystemModel& model, const DensityMatrix& rho) {
  const Eigen::Index n = model.site_energies.size();
  RealMatrix h = model.couplings;
  h.diagonal() = model.site_energies;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
  const RealMatrix U = es.eigenvectors();  // U(m, M) = c_m(M)
  const RealVector e = es.eigenvalues();

  const ComplexMatrix r = U.transpose().cast<cd>() * rho * U.cast<cd>();  // exciton basis
  ComplexMatrix d = ComplexMatrix::Zero(n, n);
  const cd i(0.0, 1.0);

  // Lamb shift (diagonal in excitons), coherent part
  RealVector shift = RealVector::Zero(n);
  for (Eigen::Index M = 0; M < n; ++M)
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b)
        shift(M) += model.reorganization_energy * correlation(model, a, b) * U(a, M) * U(a, M) * U(b, M) * U(b, M);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) d(a, b) += -i / kHbar * ((e(a) + shift(a)) - (e(b) + shift(b))) * r(a, b);

  if (model.reorganization_energy > 0.0) {
    // population transfer N -> M between distinct excitons
    for (Eigen::Index M = 0; M < n; ++M) {
      for (Eigen::Index N = 0; N < n; ++N) {
        if (M == N) continue;
        const double w = (e(N) - e(M)) / kHbar;
        double g = 0.0;
        for (Eigen::Index a = 0; a < n; ++a)
          for (Eigen::Index b = 0; b < n; ++b)
            g += correlation(model, a, b) * U(a, M) * U(a, N) * U(b, M) * U(b, N);
        g *= rate(model, w);
        d(M, M) += g * r(N, N);
        for (Eigen::Index c = 0; c < n; ++c) {
          d(N, c) -= 0.5 * g * r(N, c);
          d(c, N) -= 0.5 * g * r(c, N);
        }
      }
    }
    // pure dephasing
    const double gphi = kTwoPi * model.reorganization_energy / model.cutoff * kBoltzmann * model.temperature / kHbar;
    for (Eigen::Index A = 0; A < n; ++A) {
      for (Eigen::Index B = 0; B < n; ++B) {
        double s = 0.0;
        for (Eigen::Index a = 0; a < n; ++a)
          for (Eigen::Index b = 0; b < n; ++b) {
            const double c = correlation(model, a, b);
            const double da = U(a, A) * U(a, A);
            const double db = U(b, B) * U(b, B);
            s += c * (da * db - 0.5 * (U(b, A) * U(b, A) * da + U(b, B) * U(b, B) * U(a, B) * U(a, B)));
          }
        d(A, B) += gphi * s * r(A, B);
      }
    }
  }

  ComplexMatrix out = U.cast<cd>() * d * U.transpose().cast<cd>();
  // sinks in the site basis
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      out(a, b) -= (model.trap_rates(a) + model.trap_rates(b) + 2.0 * model.recombination_rate) * rho(a, b);
  return out;
}

ComplexVector expm_apply(const ComplexMatrix& M, double t, const ComplexVector& v) {
  const ComplexMatrix Mt = M * t;
  const ComplexMatrix E = Mt.exp();
  return E * v;
}

SystemModel random_model(std::mt19937_64& rng, std::size_t sites, bool with_bath) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(sites);
  SystemModel m;
  m.site_energies = RealVector(n);
  for (Eigen::Index i = 0; i < n; ++i) m.site_energies(i) = 400.0 * u(rng);
  m.couplings = RealMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) m.couplings(i, j) = m.couplings(j, i) = 200.0 * (u(rng) - 0.5);
  m.trap_rates = RealVector::Zero(n);
  m.trap_rates(static_cast<Eigen::Index>(rng() % sites)) = 0.2 + 2.0 * u(rng);
  m.recombination_rate = 1e-3 + 0.05 * u(rng);
  m.temperature = 400.0 * u(rng);
  m.reorganization_energy = with_bath ? 5.0 + 60.0 * u(rng) : 0.0;
  m.cutoff = 50.0 + 200.0 * u(rng);
  m.disorder_fwhm = RealVector::Constant(n, 50.0);
  RealMatrix pos(n, 3);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) pos(i, k) = 30.0 * u(rng);
  RealMatrix dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) dist(i, j) = (pos.row(i) - pos.row(j)).norm();
  m.distances = dist;
  m.correlation_radius = u(rng) < 0.5 ? 0.0 : 20.0 * u(rng);
  return m;
}

DensityMatrix random_density(std::mt19937_64& rng, std::size_t sites) {
  std::normal_distribution<double> g;
  const auto n = static_cast<Eigen::Index>(sites);
  ComplexMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cd(g(rng), g(rng));
  ComplexMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

double rabi_population(double detuning, double coupling, double t) {
  const double omega = std::sqrt(detuning * detuning + 4.0 * coupling * coupling) / kHbar;
  const double amp = 4.0 * coupling * coupling / (detuning * detuning + 4.0 * coupling * coupling);
  const double s = std::sin(0.5 * omega * t);
  return 1.0 - amp * s * s;
}

namespace {

double trap_trace(const RealVector& kappa, const ComplexVector& v) {
  const Eigen::Index n = kappa.size();
  double p = 0.0;
  for (Eigen::Index m = 0; m < n; ++m) p += kappa(m) * v(m + m * n).real();
  return 2.0 * p;
}

}  // namespace

double tail_rate_laplace(const ComplexMatrix& M, const ComplexMatrix& Mk, const RealVector& kappa,
                         const ComplexVector& rho0) {
  const Eigen::Index d = M.rows();
  const auto integrand = [&](double s) {
    const ComplexMatrix A = s * ComplexMatrix::Identity(d, d) - M;
    Eigen::PartialPivLU<ComplexMatrix> lu(A);
    const ComplexVector x = lu.solve(rho0);
    return trap_trace(kappa, lu.solve(Mk * x));
  };
  boost::math::quadrature::exp_sinh<double> quad;
  return quad.integrate(integrand, 1e-12);
}

double susceptibility_offset(const ComplexMatrix& M, const ComplexMatrix& Mk, const RealVector& kappa,
                             const ComplexVector& rho0) {
  Eigen::PartialPivLU<ComplexMatrix> lu(M);
  return trap_trace(kappa, lu.solve(Mk * lu.solve(rho0)));
}

}  // namespace ete::oracle
