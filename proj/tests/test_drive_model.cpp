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

#include <cmath>

#include "fixtures.hpp"
#include "fluxtrans/drive_model.hpp"
#include "fluxtrans/spectrum.hpp"

using namespace fluxtrans;
using Catch::Approx;

namespace {

constexpr double kEjSum = 12.822 + 7.5;
constexpr double kEjDiff = 12.822 - 7.5;

/// Constant and cos(2 theta) Fourier parts of E_eff(pi/2 + phi cos theta) - E_diff by quadrature.
std::pair<double, double> fourier_oracle(double phi) {
  const int n = 4096;
  const double d = kEjDiff / kEjSum;
  double a0 = 0.0, a2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double th = units::two_pi * k / n;
    const double x = units::pi / 2 + phi * std::cos(th);
    const double f = kEjSum * std::sqrt(std::cos(x) * std::cos(x) + d * d * std::sin(x) * std::sin(x)) - kEjDiff;
    a0 += f / n;
    a2 += 2.0 * f * std::cos(2.0 * th) / n;
  }
  return {a0, a2};
}

struct CellFixture {
  CircuitSpec spec = testing::ft_cell();
  HamiltonianModel model = build_model(spec);
  DressedSpectrum spectrum = dressed_spectrum(model);
  GateSites sites = default_gate_sites(spec);
  ThreeLevelModel three = numerical_A_matrix(model, spectrum, sites);
};

}  // namespace

TEST_CASE("drive coefficients vanish without drive and are even", "[drive_model][property]") {
  const auto z = jacobi_anger_coefficients(kEjSum, kEjDiff, 0.0);
  CHECK(z.alpha == Approx(0.0).margin(1e-12));
  CHECK(z.beta == Approx(0.0).margin(1e-12));
  for (double phi : {0.05, 0.3, 1.2}) {
    const auto p = jacobi_anger_coefficients(kEjSum, kEjDiff, phi);
    const auto m = jacobi_anger_coefficients(kEjSum, kEjDiff, -phi);
    CHECK(p.alpha == Approx(m.alpha).epsilon(1e-14));
    CHECK(p.beta == Approx(m.beta).epsilon(1e-14));
    CHECK(p.alpha > 0.0);
    CHECK(p.beta > 0.0);
  }
}

TEST_CASE("drive coefficients agree with a quadrature Fourier series at weak drive", "[drive_model]") {
  // The closed forms share the leading phi^2 behaviour with the exact series;
  // the relative deviation grows as phi^2.
  for (auto [phi, tol_a, tol_b] : {std::tuple{0.01, 2e-4, 1e-6}, std::tuple{0.05, 5e-3, 1e-4}}) {
    const auto [a0, a2] = fourier_oracle(phi);
    const auto dc = jacobi_anger_coefficients(kEjSum, kEjDiff, phi);
    CHECK(dc.alpha == Approx(a0).epsilon(tol_a));
    CHECK(dc.beta == Approx(a2).epsilon(tol_b));
  }
}

TEST_CASE("drive coefficients reject amplitudes outside the expansion domain", "[drive_model]") {
  CHECK_THROWS_MATCHES(jacobi_anger_coefficients(kEjSum, kEjDiff, 1.6), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::ExpansionDomain;
                       }));
  CHECK_THROWS_AS(jacobi_anger_coefficients(kEjDiff, kEjSum, 0.1), Error);
}

TEST_CASE("first-order effective gate matches the closed forms", "[drive_model]") {
  CellFixture f;
  for (double phi : {0.05, 0.1, 0.15}) {
    const auto dc = jacobi_anger_coefficients(kEjSum, kEjDiff, phi);
    const auto g = effective_gate(f.three, dc, 1);
    CHECK(g.omega_d == Approx(analytic_drive_frequency(f.three, dc)).epsilon(1e-14));
    // resonance: the 101 and 200 diagonal entries coincide
    CHECK(std::abs(g.h_eff(0, 0) - g.h_eff(2, 2)) < 1e-10);
    CHECK(g.g_eff == Approx(std::abs(g.h_eff(0, 2))).epsilon(1e-14));
    CHECK(g.g_eff == Approx(std::abs(analytic_exchange(f.three, dc, g.omega_d))).epsilon(1e-9));
    CHECK(g.t_gate == Approx(1.0 / (2.0 * g.g_eff)).epsilon(1e-12));
  }
}

TEST_CASE("second-order resonance stays near the first-order root", "[drive_model]") {
  CellFixture f;
  const auto dc = jacobi_anger_coefficients(kEjSum, kEjDiff, 0.05);
  const auto g1 = effective_gate(f.three, dc, 1);
  const auto g2 = effective_gate(f.three, dc, 2);
  CHECK(std::abs(g2.omega_d - g1.omega_d) / g1.omega_d < 0.05);
  CHECK(std::abs(g2.h_eff(0, 0) - g2.h_eff(2, 2)) < 1e-8);
}

TEST_CASE("three-level propagation is unitary", "[drive_model]") {
  CellFixture f;
  const auto dc = jacobi_anger_coefficients(kEjSum, kEjDiff, 0.1);
  const auto u = propagate_three_level(f.three, dc, 0.16, 50.0);
  CHECK((u.adjoint() * u - Matrix3cd::Identity()).norm() < 1e-7);
}

TEST_CASE("perturbative and numerical drive matrices share signs and scale", "[drive_model]") {
  CellFixture f;
  const auto& t = f.three;
  const Matrix3d pert =
      perturbative_A_matrix(t.bare_energies, t.g_101_110, t.g_101_200, t.g_110_200, t.zpf_phi);
  // the perturbative matrix is written as <0|cos|0> - cos
  const Matrix3d num = -t.A;
  for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    CHECK(std::signbit(pert(i, j)) == std::signbit(num(i, j)));
    const double ratio = pert(i, j) / num(i, j);
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
  }
  CHECK_THROWS_AS(perturbative_A_matrix(Vector3d(1.0, 1.0, 2.0), 0.01, 0.01, 0.01, 0.5), Error);
}
