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

#include <Eigen/Eigenvalues>

#include "fixtures.hpp"
#include "fluxtrans/quantization.hpp"

using namespace fluxtrans;
using Catch::Approx;

namespace {

// Sinc discrete-variable representation of -4 E_C d^2/dphi^2 + V(phi) on a
// uniform phase grid; spectrally accurate for smooth potentials.
template <class Potential>
Eigen::VectorXd phase_grid_levels(double ec, Potential v, double lo, double hi, int points, int count) {
  const double h = (hi - lo) / (points - 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(points, points);
  const double pi = units::pi;
  for (int i = 0; i < points; ++i) {
    for (int j = 0; j < points; ++j) {
      const int k = i - j;
      const double t = (k == 0) ? pi * pi / 3.0 : 2.0 * ((k % 2 == 0) ? 1.0 : -1.0) / (k * k);
      H(i, j) = 4.0 * ec * t / (h * h);
    }
    H(i, i) += v(lo + i * h);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().head(count);
}

// Cooper-pair charge basis at offset charge ng: 4 E_C (n - ng)^2 on the
// diagonal, -E_J/2 between neighbours.
Eigen::VectorXd charge_basis_levels(double ec, double ej, int nmax, int count, double ng = 0.0) {
  const int d = 2 * nmax + 1;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double n = i - nmax - ng;
    H(i, i) = 4.0 * ec * n * n;
    if (i + 1 < d) H(i, i + 1) = H(i + 1, i) = -0.5 * ej;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().head(count);
}

// Charge-basis levels averaged over the offset charge. An oscillator basis on
// the extended phase axis sees no offset charge and reproduces these band
// centres rather than the ng = 0 values.
Eigen::VectorXd band_mean_levels(double ec, double ej, int count) {
  const int samples = 64;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(count);
  for (int k = 0; k < samples; ++k) acc += charge_basis_levels(ec, ej, 40, count, static_cast<double>(k) / samples);
  return acc / samples;
}

Eigen::VectorXd transitions(const Eigen::VectorXd& e) { return (e.array() - e(0)).matrix(); }

}  // namespace

TEST_CASE("canonical commutator off the truncation corner", "[quantization][property]") {
  const auto ops = mode_operators(NodeKind::Transmon, 0.2, 13.6, 25);
  const MatrixXcd comm = ops.n * ops.phi - ops.phi * ops.n;
  const MatrixXcd expect = -I_unit * MatrixXcd::Identity(25, 25);
  const Eigen::Index k = 24;
  CHECK((comm - expect).topLeftCorner(k, k).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(comm(k, k) - expect(k, k)) > 1.0);  // the corner entry is the truncation artefact
}

TEST_CASE("exact truncations of n^2 and phi^2", "[quantization]") {
  const auto ops = mode_operators(NodeKind::Fluxonium, 0.8, 1.6, 12);
  const MatrixXd phi2 = (ops.phi * ops.phi).real();
  CHECK((ops.phi_squared - phi2).topLeftCorner(11, 11).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(ops.phi_squared(11, 11) - phi2(11, 11)) > 1e-3);
}

TEST_CASE("fluxonium levels agree with a phase-grid oracle", "[quantization][property]") {
  const auto spec = testing::ft_cell();
  const auto& node = spec.nodes[0];
  const double ec = 0.828;
  const auto mode = local_mode(node, ec, default_bare_levels(NodeKind::Fluxonium), 5, spec);
  auto v = [&](double phi) {
    return 0.5 * node.inductive_energy * (phi - node.external_flux) * (phi - node.external_flux) -
           node.josephson_energy * std::cos(phi);
  };
  const auto oracle = phase_grid_levels(ec, v, node.external_flux - 7 * units::pi, node.external_flux + 7 * units::pi, 701, 5);
  const VectorXd ours = transitions(mode.energies);
  const VectorXd ref = transitions(oracle);
  CHECK((ours - ref).cwiseAbs().maxCoeff() < 1e-4);
  CHECK(std::abs(mode.energies(0) - oracle(0)) < 1e-4);
}

TEST_CASE("transmon levels agree with the charge-basis band centres", "[quantization]") {
  const auto spec = testing::ft_cell();
  const auto& node = spec.nodes[2];
  const double ec = 0.19416;
  const auto mode = local_mode(node, ec, default_bare_levels(NodeKind::Transmon), 5, spec);
  const auto oracle = band_mean_levels(ec, node.josephson_energy, 5);
  CHECK((transitions(mode.energies) - transitions(oracle)).cwiseAbs().maxCoeff() < 1e-4);
  CHECK(mode.energies(1) - mode.energies(0) == Approx(4.4).epsilon(0.05));
}

TEST_CASE("coupler at the sweet spot behaves as one junction of E_eff", "[quantization]") {
  const auto spec = testing::ft_cell();
  const auto& node = spec.nodes[1];
  const double ec = 0.4284;
  const auto mode = local_mode(node, ec, default_bare_levels(NodeKind::Coupler), 3, spec);
  const double eeff = squid_model(node, spec).effective_ej(node.external_flux);
  CHECK(eeff == Approx(12.822 - 7.5).epsilon(1e-12));
  const auto centres = band_mean_levels(ec, eeff, 3);
  CHECK(mode.energies(1) - mode.energies(0) == Approx(centres(1) - centres(0)).margin(1e-3));
  // the n_g = 0 levels differ by the charge dispersion, tens of MHz at this E_J / E_C
  const auto at_zero = charge_basis_levels(ec, eeff, 40, 3);
  CHECK(std::abs((at_zero(1) - at_zero(0)) - (centres(1) - centres(0))) > 1e-2);
}

TEST_CASE("SQUID effective junction energy", "[quantization]") {
  const SquidModel sq{12.822, 7.5, CouplerGauge{}};
  const double sum = 20.322, d = 5.322 / 20.322;
  for (double x : {0.0, 0.3, 1.0, units::pi / 2, 2.0}) {
    const double expect = sum * std::sqrt(std::cos(x) * std::cos(x) + d * d * std::sin(x) * std::sin(x));
    CHECK(sq.effective_ej(x) == Approx(expect).epsilon(1e-12));
  }
  // the magnitude does not depend on how the loop phase is split
  const SquidModel other{12.822, 7.5, CouplerGauge{0.8, -0.2}};
  CHECK(other.effective_ej(0.7) == Approx(sq.effective_ej(0.7)).epsilon(1e-12));
}

TEST_CASE("assembled Hamiltonian is real symmetric with product dimension", "[quantization]") {
  const auto m = build_model(testing::ft_cell());
  REQUIRE(m.dimension() == 125);
  CHECK(symmetry_defect(m.static_hamiltonian) == 0.0);
  CHECK((m.static_part({units::pi / 2}) - m.static_hamiltonian).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(m.index_of(m.label_of(77)) == 77);
}

TEST_CASE("uncoupled Hamiltonian is diagonal in the product basis", "[quantization]") {
  const auto m = build_model(testing::uncoupled_cell());
  MatrixXd off = m.static_hamiltonian;
  off.diagonal().setZero();
  CHECK(off.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("truncation errors", "[quantization]") {
  const auto spec = testing::ft_cell();
  CHECK_THROWS_AS(mode_operators(NodeKind::Transmon, 0.2, 13.6, 1), Error);
  QuantizationOptions q;
  q.dimension_cap = 100;
  try {
    build_model(spec, q);
    FAIL("dimension cap ignored");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionOverflow);
  }
  q = {};
  q.levels["q1"] = 1;
  CHECK_THROWS_AS(build_model(spec, q), Error);
}

TEST_CASE("level convergence search", "[quantization]") {
  const auto spec = testing::ft_cell();
  const double ec = 0.828;
  const int n = converge_levels(spec.nodes[0], ec, 5, 1e-6);
  CHECK(n >= 5);
  CHECK(n <= default_bare_levels(NodeKind::Fluxonium));
  const auto a = local_mode(spec.nodes[0], ec, n, 5, spec);
  const auto b = local_mode(spec.nodes[0], ec, default_bare_levels(NodeKind::Fluxonium), 5, spec);
  CHECK((a.energies - b.energies).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("symmetric eigensolver is orthonormal above the blocked-LAPACK size", "[quantization]") {
  const Eigen::Index n = 300;
  MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) a(i, j) = a(j, i) = std::cos(0.91 * static_cast<double>(i * n + j));
  for (int count : {0, 40}) {
    const auto e = symmetric_eigen(a, count);
    const Eigen::Index k = count > 0 ? count : n;
    REQUIRE(e.vectors.cols() == k);
    const MatrixXd gram = e.vectors.transpose() * e.vectors;
    CHECK((gram - MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((a * e.vectors - e.vectors * e.values.asDiagonal()).cwiseAbs().maxCoeff() < 1e-9);
    for (Eigen::Index i = 1; i < k; ++i) CHECK(e.values(i) >= e.values(i - 1));
  }
}
