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

#include <algorithm>
#include <numeric>

#include "fixtures.hpp"
#include "fluxtrans/spectrum.hpp"

using namespace fluxtrans;
using Catch::Approx;

TEST_CASE("two-level dressing matches the closed form", "[spectrum]") {
  // |01> and |10> of two qubits exchange-coupled with strength g
  const double e01 = 1.0, e10 = 1.2, g = 0.05, e11 = 2.3;
  MatrixXd h = MatrixXd::Zero(4, 4);
  h(1, 1) = e01;
  h(2, 2) = e10;
  h(3, 3) = e11;
  h(1, 2) = h(2, 1) = g;
  const auto s = dressed_spectrum(h, {2, 2});
  const double mean = 0.5 * (e01 + e10), half = 0.5 * (e10 - e01);
  const double split = std::sqrt(half * half + g * g);
  CHECK(s.energy({0, 1}) == Approx(mean - split).epsilon(1e-12));
  CHECK(s.energy({1, 0}) == Approx(mean + split).epsilon(1e-12));
  const double cos2 = 0.5 * (1.0 + half / split);
  CHECK(s.overlap({0, 1}) == Approx(cos2).epsilon(1e-12));
  CHECK(s.state({0, 1})(1) > 0.0);  // sign gauge: positive bare overlap
  // exchange coupling leaves E_11 untouched, so zeta is the level repulsion alone
  const double zeta = ((e11 - (mean + split)) - ((mean - split) - 0.0)) * units::ghz_to_khz;
  CHECK(zz_crosstalk(s, 0, 1) == Approx(zeta).epsilon(1e-9));
}

TEST_CASE("diagonal ZZ shift is reported in kHz", "[spectrum]") {
  MatrixXd h = MatrixXd::Zero(4, 4);
  h(1, 1) = 1.0;
  h(2, 2) = 2.0;
  h(3, 3) = 3.0 + 1e-6;
  const auto s = dressed_spectrum(h, {2, 2});
  CHECK(zz_crosstalk(s, 0, 1) == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("uncoupled cell has zero ZZ and zero delocalization", "[spectrum][property]") {
  const auto m = build_model(testing::uncoupled_cell());
  const auto s = dressed_spectrum(m);
  CHECK(std::abs(zz_crosstalk(s)) < 1e-6);
  for (const auto& [l, e] : delocalization(s, {0, 2})) CHECK(e == Approx(0.0).margin(1e-12));
}

TEST_CASE("optimal assignment agrees with brute force", "[spectrum]") {
  MatrixXd cost(4, 4);
  cost << 4, 1, 3, 2,
          2, 0, 5, 3,
          3, 2, 2, 1,
          1, 3, 4, 2;
  const auto a = detail::hungarian(cost);
  double got = 0.0;
  for (int r = 0; r < 4; ++r) got += cost(r, a[static_cast<std::size_t>(r)]);
  std::vector<int> p{0, 1, 2, 3};
  double best = 1e300;
  do {
    double c = 0.0;
    for (int r = 0; r < 4; ++r) c += cost(r, p[static_cast<std::size_t>(r)]);
    best = std::min(best, c);
  } while (std::next_permutation(p.begin(), p.end()));
  CHECK(got == Approx(best));
}

TEST_CASE("maximally hybridized state is flagged as ambiguous", "[spectrum]") {
  MatrixXd h = MatrixXd::Zero(4, 4);
  h(1, 1) = h(2, 2) = 1.0;
  h(1, 2) = h(2, 1) = 0.1;
  h(3, 3) = 2.5;
  SpectrumOptions opt;
  opt.required = {{0, 1}};
  try {
    dressed_spectrum(h, {2, 2}, opt);
    FAIL("degenerate doublet labeled without complaint");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AmbiguousLabel);
  }
}

TEST_CASE("labels are a bijection onto the computed states", "[spectrum]") {
  const auto m = build_model(testing::ft_cell());
  const auto s = dressed_spectrum(m);
  CHECK(static_cast<Eigen::Index>(s.column.size()) == m.dimension());
  std::vector<Eigen::Index> cols;
  for (const auto& [l, c] : s.column) cols.push_back(c);
  std::sort(cols.begin(), cols.end());
  for (Eigen::Index i = 0; i < m.dimension(); ++i) CHECK(cols[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("design-point spectrum of the reference cell", "[spectrum]") {
  const auto m = build_model(testing::ft_cell());
  const auto s = dressed_spectrum(m);
  const double e0 = s.energy({0, 0, 0});
  CHECK(s.energy({1, 0, 0}) - e0 == Approx(0.300).epsilon(0.10));
  CHECK(s.energy({2, 0, 0}) - s.energy({1, 0, 0}) == Approx(3.7).epsilon(0.15));
  CHECK(s.energy({0, 0, 1}) - e0 == Approx(4.4).epsilon(0.05));
}

TEST_CASE("ZZZ vanishes for an uncoupled three-qubit product", "[spectrum]") {
  // three qubits, one excitation each, additive energies
  const std::vector<int> dims{2, 2, 2};
  MatrixXd h = MatrixXd::Zero(8, 8);
  const double f[3] = {0.3, 4.4, 0.5};
  for (int b = 0; b < 8; ++b) h(b, b) = ((b >> 2) & 1) * f[0] + ((b >> 1) & 1) * f[1] + (b & 1) * f[2];
  auto s = dressed_spectrum(h, dims);
  CHECK(std::abs(zzz_interaction(s, 0, 1, 2)) < 1e-3);
  h(7, 7) += 1e-9;  // 1 Hz three-body shift
  s = dressed_spectrum(h, dims);
  CHECK(zzz_interaction(s, 0, 1, 2) == Approx(1.0).epsilon(1e-4));
}

TEST_CASE("flux readjustment finds a bracketed root", "[spectrum]") {
  auto zeta = [](double x) { return 5.0 * (x - 1.62); };
  const auto r = readjust_flux(zeta, units::pi / 2, 0.3, 13, 1e-9);
  CHECK(r.root_found);
  CHECK(r.flux == Approx(1.62).margin(1e-9));
  // the default stopping rule is |zeta| < 0.01 kHz
  const auto loose = readjust_flux(zeta, units::pi / 2, 0.3);
  CHECK(std::abs(loose.zeta_khz) < 0.01);
  auto bowl = [](double x) { return 0.2 + (x - 1.5) * (x - 1.5); };
  const auto r2 = readjust_flux(bowl, units::pi / 2, 0.3);
  CHECK_FALSE(r2.root_found);
  CHECK(r2.flux == Approx(1.5).margin(1e-3));
}
