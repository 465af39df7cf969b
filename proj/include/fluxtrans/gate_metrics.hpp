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

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fluxtrans/error.hpp"
#include "fluxtrans/linalg.hpp"
#include "fluxtrans/propagation.hpp"

namespace fluxtrans {

/// Partial trace over one qubit of an 8x8 operator, scaled by 1/2.
/// Qubit 0 is the most significant bit of the basis index.
inline MatrixXcd trace_out_spectator(const MatrixXcd& u8, int spectator = 2) {
  if (u8.rows() != 8 || u8.cols() != 8) throw Error(ErrorCode::BadIndex, "spectator trace needs an 8x8 operator");
  if (spectator < 0 || spectator > 2) throw Error(ErrorCode::BadIndex, "spectator index must be 0, 1 or 2");
  const int bit = 2 - spectator;
  auto expand = [&](Eigen::Index r, int s) {
    const Eigen::Index low = r & ((Eigen::Index{1} << bit) - 1);
    const Eigen::Index high = r >> bit;
    return (high << (bit + 1)) | (Eigen::Index{s} << bit) | low;
  };
  MatrixXcd out = MatrixXcd::Zero(4, 4);
  for (Eigen::Index a = 0; a < 4; ++a)
    for (Eigen::Index b = 0; b < 4; ++b)
      out(a, b) = 0.5 * (u8(expand(a, 0), expand(b, 0)) + u8(expand(a, 1), expand(b, 1)));
  return out;
}

inline Eigen::Matrix2cd pauli_matrix(char p) {
  Eigen::Matrix2cd m;
  switch (p) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw Error(ErrorCode::InvalidSpec, std::string("unknown Pauli letter ") + p);
  }
  return m;
}

/// Tensor product of single-qubit Paulis, first letter on the most significant qubit.
inline MatrixXcd pauli_string_matrix(const std::string& s) {
  MatrixXcd m = MatrixXcd::Identity(1, 1);
  for (char c : s) {
    const MatrixXcd p = pauli_matrix(c);
    m = Eigen::kroneckerProduct(m, p).eval();
  }
  return m;
}

inline std::vector<std::string> pauli_strings(int qubits) {
  std::vector<std::string> out{""};
  for (int q = 0; q < qubits; ++q) {
    std::vector<std::string> next;
    for (const auto& s : out)
      for (char c : {'I', 'X', 'Y', 'Z'}) next.push_back(s + c);
    out = std::move(next);
  }
  return out;
}

struct PauliWeights {
  std::map<std::string, double> weights;
  double total() const {
    double t = 0.0;
    for (const auto& [k, v] : weights) t += v;
    return t;
  }
};

/// p_P = |Tr(U_err^dagger P) / d|^2 with U_err = U^dagger * target.
inline PauliWeights pauli_error_weights(const MatrixXcd& u, const MatrixXcd& target) {
  if (u.rows() != target.rows() || u.cols() != target.cols() || u.rows() != u.cols())
    throw Error(ErrorCode::InvalidSpec, "process and target must be square and of equal size");
  int nq = 0;
  while ((Eigen::Index{1} << nq) < u.rows()) ++nq;
  if ((Eigen::Index{1} << nq) != u.rows()) throw Error(ErrorCode::InvalidSpec, "operator is not on qubits");
  const MatrixXcd err = u.adjoint() * target;
  const double d = static_cast<double>(u.rows());
  PauliWeights w;
  for (const auto& s : pauli_strings(nq)) w.weights[s] = std::norm((err.adjoint() * pauli_string_matrix(s)).trace() / d);
  return w;
}

/// U_CZ on the first two qubits tensored with identity on the third.
inline MatrixXcd spectator_target() {
  return cz_target(3);
}

/// Weights sorted for reporting: strings built only from I and Z first, then
/// by decreasing weight, ties broken alphabetically.
inline std::vector<std::pair<std::string, double>> ranked_weights(const PauliWeights& w) {
  std::vector<std::pair<std::string, double>> v(w.weights.begin(), w.weights.end());
  auto z_only = [](const std::string& s) { return s.find_first_not_of("IZ") == std::string::npos; };
  std::sort(v.begin(), v.end(), [&](const auto& a, const auto& b) {
    const bool za = z_only(a.first), zb = z_only(b.first);
    if (za != zb) return za;
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return v;
}

}  // namespace fluxtrans
