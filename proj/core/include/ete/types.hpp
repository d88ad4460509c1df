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

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace ete {

using cd = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// N x N complex matrix assumed Hermitian by the caller (site basis, cm^-1).
using HermitianMatrix = Eigen::MatrixXcd;

/// N x N reduced density matrix in the site basis.
using DensityMatrix = Eigen::MatrixXcd;

// Liouville space uses column stacking: vec(rho)[m + n * N] = rho(m, n),
// so that vec(A X B) = (B^T kron A) vec(X).
inline constexpr std::size_t liouville_index(std::size_t row, std::size_t col, std::size_t n) {
  return row + col * n;
}

inline ComplexVector vectorize(const ComplexMatrix& rho) {
  return Eigen::Map<const ComplexVector>(rho.data(), rho.size());
}

inline ComplexMatrix unvectorize(const ComplexVector& v, Eigen::Index n) {
  return Eigen::Map<const ComplexMatrix>(v.data(), n, n);
}

}  // namespace ete
