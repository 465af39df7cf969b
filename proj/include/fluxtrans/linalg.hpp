// Copyright 2026 The fluxtrans Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "fluxtrans/error.hpp"

namespace fluxtrans {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr Complex I_unit{0.0, 1.0};

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
struct SymmetricEigen {
  VectorXd values;
  MatrixXd vectors;  // columns
};

namespace detail {

inline SymmetricEigen lapack_symmetric_eigen(const MatrixXd& a, int count) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  const bool partial = count > 0 && count < n;
  const lapack_int want = partial ? count : n;
  MatrixXd work = a;  // column-major copy, destroyed by LAPACK
  VectorXd w(n);
  MatrixXd z(n, want);
  lapack_int found = 0;
  lapack_int info = 0;
  if (partial) {
    std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
    info = LAPACKE_dsyevx(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, work.data(), n, 0.0, 0.0, 1, want,
                          2.0 * LAPACKE_dlamch('S'), &found, w.data(), z.data(), n, ifail.data());
  } else {
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
    info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'U', n, work.data(), n, 0.0, 0.0, 0, 0, 0.0, &found, w.data(),
                          z.data(), n, isuppz.data());
  }
  if (info != 0 || found != want) {
    throw Error(ErrorCode::NoConvergence, "symmetric eigensolver failed with info=" + std::to_string(info));
  }
  SymmetricEigen out;
  out.values = w.head(want);
  out.vectors = std::move(z);
  return out;
}

/// Checks residual and orthonormality of an eigen-decomposition against a
/// fixed pseudo-random probe vector. The cost is a few matrix-vector products.
inline bool decomposition_is_accurate(const MatrixXd& a, const SymmetricEigen& e) {
  const Eigen::Index k = e.values.size();
  if (k == 0) return true;
  if (!e.values.allFinite() || !e.vectors.allFinite()) return false;
  VectorXd x(k);
  for (Eigen::Index i = 0; i < k; ++i) x(i) = std::cos(1.0 + 0.7548776662466927 * static_cast<double>(i));
  const VectorXd vx = e.vectors * x;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff()) * std::sqrt(static_cast<double>(a.rows()));
  const double residual = (a * vx - e.vectors * e.values.cwiseProduct(x)).norm() / (scale * x.norm());
  const double orthonormality = (e.vectors.transpose() * vx - x).norm() / x.norm();
  return residual < 1e-9 && orthonormality < 1e-9;
}

}  // namespace detail

/// Lowest `count` eigenpairs of a real symmetric matrix. The full spectrum
/// uses LAPACK dsyevr; a partial one uses dsyevx (bisection and inverse
/// iteration). Every result is checked against a probe vector; when the
/// check fails (some optimized BLAS kernels return wrong products on some
/// CPUs), Eigen's own solver recomputes the decomposition.
/// count <= 0 or count >= n returns the full decomposition.
inline SymmetricEigen symmetric_eigen(const MatrixXd& a, int count = 0) {
  const Eigen::Index n = a.rows();
  if (a.cols() != a.rows()) throw Error(ErrorCode::InvalidSpec, "symmetric_eigen: matrix not square");
  if (n == 0) return {};
  SymmetricEigen out = detail::lapack_symmetric_eigen(a, count);
  if (detail::decomposition_is_accurate(a, out)) return out;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "symmetric eigensolver failed");
  const Eigen::Index want = count > 0 && count < n ? count : n;
  out.values = es.eigenvalues().head(want);
  out.vectors = es.eigenvectors().leftCols(want);
  return out;
}

/// True when LAPACK returns an accurate decomposition of a 256 x 256 probe
/// matrix. Blocked LAPACK paths only engage above about 128 rows, so smaller
/// probes do not exercise the BLAS kernels.
inline bool lapack_eigensolver_is_reliable() {
  const Eigen::Index n = 256;
  MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) a(i, j) = a(j, i) = std::sin(0.37 * static_cast<double>(i * n + j) + 0.1);
  return detail::decomposition_is_accurate(a, detail::lapack_symmetric_eigen(a, 0));
}

/// f(A) for Hermitian A through its spectral decomposition.
template <class F>
MatrixXcd hermitian_function(const MatrixXcd& a, F&& f) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "hermitian eigen-solver failed");
  VectorXcd fv(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(es.eigenvalues()(i));
  return es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().adjoint();
}

/// Places `op` on slot `slot` of a tensor product with identities elsewhere.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> embed(const Eigen::MatrixBase<Derived>& op,
                                                                              std::size_t slot,
                                                                              const std::vector<int>& dims) {
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::Index left = 1, right = 1;
  for (std::size_t i = 0; i < slot; ++i) left *= dims[i];
  for (std::size_t i = slot + 1; i < dims.size(); ++i) right *= dims[i];
  M inner = Eigen::kroneckerProduct(M(op), M::Identity(right, right)).eval();
  return Eigen::kroneckerProduct(M::Identity(left, left), inner).eval();
}

inline double hermiticity_defect(const MatrixXcd& a) { return (a - a.adjoint()).cwiseAbs().maxCoeff(); }
inline double symmetry_defect(const MatrixXd& a) { return (a - a.transpose()).cwiseAbs().maxCoeff(); }

/// max |U^dagger U - 1| over all entries.
inline double unitarity_defect(const MatrixXcd& u) {
  return (u.adjoint() * u - MatrixXcd::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace fluxtrans
