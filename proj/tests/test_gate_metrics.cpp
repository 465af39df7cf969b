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


#include <catch_amalgamated.hpp>

#include <Eigen/QR>
#include <random>

#include "fluxtrans/gate_metrics.hpp"

using namespace fluxtrans;
using Catch::Approx;

namespace {

MatrixXcd random_unitary(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return Eigen::HouseholderQR<MatrixXcd>(m).householderQ();
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) { return Eigen::kroneckerProduct(a, b).eval(); }

}  // namespace

TEST_CASE("spectator trace of product operators", "[gate_metrics]") {
  const MatrixXcd cz = cz_target(2);
  CHECK((trace_out_spectator(kron(cz, pauli_string_matrix("I"))) - cz).norm() < 1e-14);
  CHECK(trace_out_spectator(kron(cz, pauli_string_matrix("Z"))).norm() < 1e-14);
  // tracing the first qubit of Z (x) CZ'
  const MatrixXcd a = random_unitary(4, 3);
  CHECK((trace_out_spectator(kron(pauli_string_matrix("I"), a), 0) - a).norm() < 1e-13);
  CHECK_THROWS_AS(trace_out_spectator(cz), Error);
  CHECK_THROWS_AS(trace_out_spectator(kron(cz, pauli_string_matrix("I")), 3), Error);
}

TEST_CASE("spectator trace is a contraction", "[gate_metrics]") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = trace_out_spectator(random_unitary(8, seed));
    Eigen::JacobiSVD<MatrixXcd> svd(r);
    CHECK(svd.singularValues().maxCoeff() <= 1.0 + 1e-12);
  }
}

TEST_CASE("Pauli strings form an orthogonal basis", "[gate_metrics]") {
  const auto s = pauli_strings(2);
  REQUIRE(s.size() == 16);
  for (const auto& a : s)
    for (const auto& b : s) {
      const Complex t = (pauli_string_matrix(a).adjoint() * pauli_string_matrix(b)).trace();
      CHECK(std::abs(t - (a == b ? 4.0 : 0.0)) < 1e-14);
    }
  CHECK_THROWS_AS(pauli_matrix('Q'), Error);
}

TEST_CASE("Pauli error weights of a unitary sum to one", "[gate_metrics][property]") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto w = pauli_error_weights(random_unitary(8, seed), spectator_target());
    CHECK(w.weights.size() == 64);
    CHECK(w.total() == Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("a single Pauli error carries all the weight", "[gate_metrics]") {
  const MatrixXcd t = spectator_target();
  const MatrixXcd zii = pauli_string_matrix("ZII");
  const auto w = pauli_error_weights(zii * t, t);
  CHECK(w.weights.at("ZII") == Approx(1.0).epsilon(1e-14));
  CHECK(w.weights.at("III") == Approx(0.0).margin(1e-14));
  const auto ideal = pauli_error_weights(std::exp(Complex(0.0, 1.3)) * t, t);
  CHECK(ideal.weights.at("III") == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ranking lists Z-type strings before the rest", "[gate_metrics]") {
  PauliWeights w;
  w.weights = {{"XI", 0.5}, {"ZZ", 0.1}, {"II", 0.3}, {"IY", 0.05}, {"IZ", 0.05}};
  const auto r = ranked_weights(w);
  const std::vector<std::string> order{"II", "ZZ", "IZ", "XI", "IY"};
  REQUIRE(r.size() == order.size());
  for (std::size_t i = 0; i < order.size(); ++i) CHECK(r[i].first == order[i]);
}
