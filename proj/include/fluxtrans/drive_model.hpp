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

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "fluxtrans/error.hpp"
#include "fluxtrans/linalg.hpp"
#include "fluxtrans/quantization.hpp"
#include "fluxtrans/spectrum.hpp"
#include "fluxtrans/units.hpp"

namespace fluxtrans {

using Eigen::Matrix3cd;
using Eigen::Matrix3d;
using Eigen::Vector3cd;
using Eigen::Vector3d;

/// Constant and second-harmonic parts of E_sum sqrt(cos^2 x + d^2 sin^2 x) - E_diff
/// for x = pi/2 + phi_AC cos(w t).
struct DriveCoefficients {
  double alpha = 0.0;  // GHz
  double beta = 0.0;   // GHz
  double d = 0.0;      // E_diff / E_sum
  double phi_ac = 0.0;
};

inline DriveCoefficients jacobi_anger_coefficients(double ej_sum, double ej_diff, double phi_ac) {
  if (!(ej_sum > ej_diff) || !(ej_diff > 0.0))
    throw Error(ErrorCode::InvalidSpec, "junction energies need E_sum > E_diff > 0");
  if (!(std::abs(phi_ac) <= 1.5)) throw Error(ErrorCode::ExpansionDomain, "phi_AC outside [0, 1.5] rad");
  const double x = std::abs(phi_ac);
  const double d = ej_diff / ej_sum;
  const double j0 = std::cyl_bessel_j(0.0, x);
  const double j2 = std::cyl_bessel_j(2.0, x);
  const double root = std::sqrt(1.0 + (d * d - 1.0) * j0 * j0);
  DriveCoefficients c;
  c.d = d;
  c.phi_ac = phi_ac;
  c.alpha = ej_sum * root - ej_diff;
  c.beta = ej_sum * 2.0 * (1.0 - d * d) * j0 * j2 / root;
  return c;
}

/// Node positions of the gate pair inside a chain.
struct GateSites {
  std::size_t fluxonium = 0;
  std::size_t coupler = 1;
  std::size_t transmon = 2;
};

/// Finds the first fluxonium-coupler-transmon triple of a chain in which the
/// coupler joins the two qubits.
inline GateSites default_gate_sites(const CircuitSpec& spec) {
  for (std::size_t c = 0; c < spec.nodes.size(); ++c) {
    if (!spec.nodes[c].is_coupler()) continue;
    std::optional<std::size_t> f, t;
    for (const auto& cp : spec.couplings) {
      for (auto [mine, other] : {std::pair{cp.a, cp.b}, std::pair{cp.b, cp.a}}) {
        if (mine.node != spec.nodes[c].name) continue;
        const auto o = spec.index_of(other.node);
        if (spec.nodes[o].kind == NodeKind::Fluxonium) f = o;
        if (spec.nodes[o].kind == NodeKind::Transmon) t = o;
      }
    }
    if (f && t) return GateSites{*f, c, *t};
  }
  throw Error(ErrorCode::InvalidSpec, "no coupler joins a fluxonium and a transmon");
}

/// Labels |101>, |110>, |200> written as (fluxonium, coupler, transmon).
inline std::array<Label, 3> three_level_labels(std::size_t nodes, const GateSites& g) {
  return {make_label(nodes, {{g.fluxonium, 1}, {g.transmon, 1}}),
          make_label(nodes, {{g.fluxonium, 1}, {g.coupler, 1}}),
          make_label(nodes, {{g.fluxonium, 2}})};
}

/// Three-level model of the gate. The time-dependent Hamiltonian is
/// diag(E) + drive_sign * A * (alpha + beta cos(2 w t)): the SQUID potential is
/// -E_eff(x) cos(phi_c), so drive_sign = -1 for the physical circuit.
struct ThreeLevelModel {
  Vector3d energies = Vector3d::Zero();  // E_101, E_110, E_200 (GHz)
  Matrix3d A = Matrix3d::Zero();         // <i|cos phi_c|j>
  double zpf_phi = 0.0;
  double drive_sign = -1.0;
  Vector3d bare_energies = Vector3d::Zero();
  double g_101_110 = 0.0;  // GHz
  double g_101_200 = 0.0;
  double g_110_200 = 0.0;
  double coupler_ground_cos = 0.0;  // <0|cos phi_c|0> of the bare coupler

  Matrix3d drive_matrix() const { return drive_sign * A; }
};

namespace detail {

inline void check_denominator(double de) {
  if (std::abs(de) <= 1e-3) throw Error(ErrorCode::DegenerateDenominator, "bare energies closer than 1 MHz");
}

}  // namespace detail

/// Leading-order perturbative A in the convention A = <0|cos|0> - cos (the
/// matrix multiplying alpha + beta cos 2wt with a positive sign). Entries are
/// ordered (101, 110, 200).
enum class PerturbativeForm {
  /// Off-diagonals linear in g/(dE), the first-order state corrections.
  FirstOrder,
  /// A_01 and A_12 built from squared ratios (g/dE)^2.
  SquaredRatios,
};

inline Matrix3d perturbative_A_matrix(const Vector3d& bare, double g_101_110, double g_101_200, double g_110_200,
                                      double zpf_phi, PerturbativeForm form = PerturbativeForm::FirstOrder) {
  detail::check_denominator(bare(0) - bare(1));
  detail::check_denominator(bare(0) - bare(2));
  detail::check_denominator(bare(1) - bare(2));
  const double pref = zpf_phi * zpf_phi * (1.0 - zpf_phi * zpf_phi / 2.0);
  const double r01 = g_101_110 / (bare(0) - bare(1));  // admixture of 110 into 101
  const double r02 = g_101_200 / (bare(0) - bare(2));
  const double r12 = g_110_200 / (bare(1) - bare(2));
  const double r21 = g_110_200 / (bare(2) - bare(1));  // admixture of 110 into 200
  const double n0 = 1.0 + r01 * r01 + r02 * r02;
  const double n1 = 1.0 + r01 * r01 + r12 * r12;
  const double n2 = 1.0 + r21 * r21 + r02 * r02;
  Matrix3d a;
  a(0, 0) = pref * r01 * r01 / n0;
  a(1, 1) = pref / n1;
  a(2, 2) = pref * r21 * r21 / n2;
  if (form == PerturbativeForm::FirstOrder) {
    a(0, 1) = pref * r01 / std::sqrt(n0 * n1);
    a(1, 2) = pref * r21 / std::sqrt(n2 * n1);
  } else {
    a(0, 1) = pref * r01 * r01 / std::sqrt(n0 * n1);
    a(1, 2) = pref * r21 * r21 / std::sqrt(n2 * n1);
  }
  a(0, 2) = pref * r01 * r21 / std::sqrt(n0 * n2);
  a(1, 0) = a(0, 1);
  a(2, 1) = a(1, 2);
  a(2, 0) = a(0, 2);
  return a;
}

/// Three-level model from the dressed spectrum of the full Hamiltonian.
inline ThreeLevelModel numerical_A_matrix(const HamiltonianModel& model, const DressedSpectrum& s,
                                          const GateSites& sites, std::size_t coupler_index = 0) {
  const auto labels = three_level_labels(model.node_dims.size(), sites);
  ThreeLevelModel m;
  const auto& cosc = model.couplers.at(coupler_index).cos_phi;
  std::array<VectorXd, 3> v;
  for (int i = 0; i < 3; ++i) {
    v[static_cast<std::size_t>(i)] = s.state(labels[static_cast<std::size_t>(i)]);  // positive bare overlap gauge
    m.energies(i) = s.energy(labels[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < 3; ++i) {
    const VectorXd cv = cosc * v[static_cast<std::size_t>(i)];
    for (int j = 0; j < 3; ++j) m.A(j, i) = v[static_cast<std::size_t>(j)].dot(cv);
  }
  m.A = 0.5 * (m.A + m.A.transpose()).eval();
  const auto& cm = model.modes.at(sites.coupler);
  m.zpf_phi = cm.zpf_phi;
  m.coupler_ground_cos = cm.cos_phi(0, 0);
  std::array<Eigen::Index, 3> idx;
  for (int i = 0; i < 3; ++i) {
    idx[static_cast<std::size_t>(i)] = model.index_of(labels[static_cast<std::size_t>(i)]);
    m.bare_energies(i) = model.static_hamiltonian(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(i)]);
  }
  m.g_101_110 = model.static_hamiltonian(idx[0], idx[1]);
  m.g_101_200 = model.static_hamiltonian(idx[0], idx[2]);
  m.g_110_200 = model.static_hamiltonian(idx[1], idx[2]);
  return m;
}

/// Rotation indices (k_101, k_110, k_200).
inline constexpr std::array<int, 3> rotation_indices{2, -1, 0};

/// Fourier components H^(j), j in [-jmax, jmax], of the rotated three-level
/// Hamiltonian. All frequencies are linear (GHz).
struct RotatedFourier {
  int jmax = 0;
  std::vector<Matrix3cd> components;  // index j + jmax
  const Matrix3cd& operator[](int j) const { return components[static_cast<std::size_t>(j + jmax)]; }
  Matrix3cd& operator[](int j) { return components[static_cast<std::size_t>(j + jmax)]; }
};

inline RotatedFourier rotated_fourier(const ThreeLevelModel& m, const DriveCoefficients& dc, double omega_d) {
  RotatedFourier f;
  f.jmax = 6;
  f.components.assign(static_cast<std::size_t>(2 * f.jmax + 1), Matrix3cd::Zero());
  const Matrix3d ad = m.drive_matrix();
  for (int l = 0; l < 3; ++l) {
    f[0](l, l) += m.energies(l) - rotation_indices[static_cast<std::size_t>(l)] * omega_d;
    for (int k = 0; k < 3; ++k) {
      const int delta = rotation_indices[static_cast<std::size_t>(l)] - rotation_indices[static_cast<std::size_t>(k)];
      f[delta](l, k) += ad(l, k) * dc.alpha;
      f[delta + 2](l, k) += ad(l, k) * dc.beta / 2.0;
      f[delta - 2](l, k) += ad(l, k) * dc.beta / 2.0;
    }
  }
  return f;
}

/// Second-order term of the high-frequency expansion.
enum class SecondOrderForm {
  /// Van Vleck expansion: sum_{m!=0} [H_-m,[H_0,H_m]]/(2 m^2 w^2)
  /// + sum_{m!=0} sum_{m'!=0,m} [H_-m',[H_m'-m,H_m]]/(3 m m' w^2).
  VanVleck,
  /// (1/w^2) sum_{j>0} [[H_j,H_0],H_-j]/j^2 + h.c. with no 1/2 and no
  /// three-harmonic terms.
  NestedCommutator,
};

/// High-frequency effective Hamiltonian in the rotated frame, to first or
/// second order in 1/omega_D (GHz).
inline Matrix3cd effective_hamiltonian(const ThreeLevelModel& m, const DriveCoefficients& dc, double omega_d,
                                       int order, SecondOrderForm form = SecondOrderForm::VanVleck) {
  if (!(omega_d > 0.0)) throw Error(ErrorCode::InvalidSpec, "drive frequency must be positive");
  if (order != 1 && order != 2) throw Error(ErrorCode::InvalidSpec, "order must be 1 or 2");
  const auto f = rotated_fourier(m, dc, omega_d);
  auto comp = [&](int j) -> Matrix3cd { return std::abs(j) <= f.jmax ? f[j] : Matrix3cd::Zero(); };
  auto comm = [](const Matrix3cd& a, const Matrix3cd& b) -> Matrix3cd { return a * b - b * a; };
  Matrix3cd h = f[0];
  for (int j = 1; j <= f.jmax; ++j) h += comm(f[j], f[-j]) / (omega_d * j);
  if (order == 2) {
    const double w2 = omega_d * omega_d;
    if (form == SecondOrderForm::NestedCommutator) {
      Matrix3cd t = Matrix3cd::Zero();
      for (int j = 1; j <= f.jmax; ++j) t += comm(comm(f[j], f[0]), f[-j]) / (w2 * j * j);
      h += t + t.adjoint();
    } else {
      for (int a = -f.jmax; a <= f.jmax; ++a) {
        if (a == 0) continue;
        h += comm(comp(-a), comm(f[0], comp(a))) / (2.0 * a * a * w2);
        for (int b = -f.jmax; b <= f.jmax; ++b) {
          if (b == 0 || b == a) continue;
          h += comm(comp(-b), comm(comp(b - a), comp(a))) / (3.0 * a * b * w2);
        }
      }
    }
  }
  return 0.5 * (h + h.adjoint());
}

/// First-order micromotion amplitude max_t ||K(t)|| bound: sum_j ||H^(j)|| / (j w).
inline double kick_amplitude(const ThreeLevelModel& m, const DriveCoefficients& dc, double omega_d) {
  const auto f = rotated_fourier(m, dc, omega_d);
  double k = 0.0;
  for (int j = 1; j <= f.jmax; ++j) k += (f[j].norm() + f[-j].norm()) / (omega_d * j);
  return k;
}

/// Resonance of the first-order effective Hamiltonian (diagonal entries of
/// 101 and 200 equal), evaluated with the drive matrix s*A.
inline double analytic_drive_frequency(const ThreeLevelModel& m, const DriveCoefficients& dc) {
  if (dc.alpha == 0.0) throw Error(ErrorCode::DegenerateDenominator, "alpha must be nonzero");
  const Matrix3d a = m.drive_matrix();
  const double al = dc.alpha, be = dc.beta;
  const double x = (m.energies(2) - m.energies(0)) / al + a(2, 2) - a(0, 0);
  const double q = (9.0 * be * be + 10.0 * al * al) / (30.0 * al * al) * a(0, 1) * a(0, 1) +
                   (be * be + 8.0 * al * al) / (8.0 * al * al) * a(0, 2) * a(0, 2) +
                   (be * be - 6.0 * al * al) / (6.0 * al * al) * a(1, 2) * a(1, 2);
  const double disc = x * x + 8.0 * q;
  if (disc < 0.0) throw Error(ErrorCode::NegativeDiscriminant, "resonance condition has no real solution");
  // The branch -(alpha/4)(x - sqrt) is the positive root for alpha > 0;
  // the same root for alpha < 0 is -(alpha/4)(x + sqrt).
  return al > 0.0 ? -(al / 4.0) * (x - std::sqrt(disc)) : -(al / 4.0) * (x + std::sqrt(disc));
}

/// Exchange element between 101 and 200 of the first-order effective Hamiltonian (GHz).
inline double analytic_exchange(const ThreeLevelModel& m, const DriveCoefficients& dc, double omega_d) {
  const Matrix3d a = m.drive_matrix();
  return 2.0 * dc.alpha * dc.beta / (3.0 * omega_d) * a(0, 1) * a(1, 2) +
         (0.5 + dc.alpha * (a(2, 2) - a(0, 0)) / (4.0 * omega_d)) * dc.beta * a(0, 2);
}

/// Time of a full 101 -> 200 -> 101 oscillation, pi/|g| with g angular, i.e.
/// 1/(2|g|) for g in GHz. Result in ns.
inline double gate_time_from_exchange(double g_ghz) {
  if (g_ghz == 0.0 || !std::isfinite(g_ghz)) throw Error(ErrorCode::ZeroCoupling, "no parametric exchange");
  return units::pi / (units::two_pi * std::abs(g_ghz));
}

inline double analytic_gate_time(const ThreeLevelModel& m, const DriveCoefficients& dc, double omega_d) {
  return gate_time_from_exchange(analytic_exchange(m, dc, omega_d));
}

struct EffectiveGate {
  double omega_d = 0.0;  // GHz
  double g_eff = 0.0;    // GHz
  double t_gate = 0.0;   // ns
  Matrix3cd h_eff = Matrix3cd::Zero();
  double kick_amplitude = 0.0;
  std::array<int, 3> rotation = rotation_indices;
};

/// Resonant drive frequency and gate time of the effective Hamiltonian at the
/// given order. Order 1 uses the closed forms; order 2 solves the resonance
/// condition of the second-order effective Hamiltonian numerically, starting
/// from the first-order root.
inline EffectiveGate effective_gate(const ThreeLevelModel& m, const DriveCoefficients& dc, int order,
                                    SecondOrderForm form = SecondOrderForm::VanVleck) {
  EffectiveGate g;
  g.omega_d = analytic_drive_frequency(m, dc);
  if (order == 2) {
    auto mismatch = [&](double w) {
      const auto h = effective_hamiltonian(m, dc, w, 2, form);
      return h(0, 0).real() - h(2, 2).real();
    };
    // secant iteration on the diagonal mismatch
    double w0 = g.omega_d, w1 = g.omega_d * (1.0 + 1e-4);
    double f0 = mismatch(w0), f1 = mismatch(w1);
    for (int it = 0; it < 60 && std::abs(f1) > 1e-13; ++it) {
      if (f1 == f0) break;
      const double w2 = w1 - f1 * (w1 - w0) / (f1 - f0);
      w0 = w1;
      f0 = f1;
      w1 = w2;
      f1 = mismatch(w1);
    }
    if (!(w1 > 0.0) || std::abs(f1) > 1e-9) throw Error(ErrorCode::NoConvergence, "second-order resonance not found");
    g.omega_d = w1;
  }
  g.h_eff = effective_hamiltonian(m, dc, g.omega_d, order, form);
  g.g_eff = std::abs(g.h_eff(0, 2));
  g.t_gate = gate_time_from_exchange(g.g_eff);
  g.kick_amplitude = kick_amplitude(m, dc, g.omega_d);
  return g;
}

namespace detail {

using ode_state = std::vector<std::complex<double>>;

struct ThreeLevelRhs {
  Matrix3d diag;
  Matrix3d drive;  // s*A
  double alpha, beta, omega_d;
  void operator()(const ode_state& x, ode_state& dx, double t) const {
    const double u = alpha + beta * std::cos(2.0 * units::two_pi * omega_d * t);
    const Matrix3d h = diag + u * drive;
    const std::size_t cols = x.size() / 3;
    for (std::size_t c = 0; c < cols; ++c)
      for (int r = 0; r < 3; ++r) {
        std::complex<double> acc = 0.0;
        for (int k = 0; k < 3; ++k) acc += h(r, k) * x[3 * c + static_cast<std::size_t>(k)];
        dx[3 * c + static_cast<std::size_t>(r)] = std::complex<double>(0.0, -units::two_pi) * acc;
      }
  }
};

inline ThreeLevelRhs three_level_rhs(const ThreeLevelModel& m, const DriveCoefficients& dc, double omega_d) {
  ThreeLevelRhs r{Matrix3d::Zero(), m.drive_matrix(), dc.alpha, dc.beta, omega_d};
  // energies measured from E_200 keep the phases slow
  for (int i = 0; i < 3; ++i) r.diag(i, i) = m.energies(i) - m.energies(2);
  return r;
}

}  // namespace detail

/// U(t) of the three-level Hamiltonian in the lab frame (ns, GHz).
inline Matrix3cd propagate_three_level(const ThreeLevelModel& m, const DriveCoefficients& dc, double omega_d,
                                       double t_end, double rtol = 1e-10) {
  using namespace boost::numeric::odeint;
  auto rhs = detail::three_level_rhs(m, dc, omega_d);
  detail::ode_state x(9, 0.0);
  for (int i = 0; i < 3; ++i) x[static_cast<std::size_t>(4 * i)] = 1.0;
  auto stepper = make_controlled(rtol * 1e-2, rtol, runge_kutta_dopri5<detail::ode_state>());
  integrate_adaptive(stepper, rhs, x, 0.0, t_end, 1e-3);
  Matrix3cd u;
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) u(r, c) = x[3 * static_cast<std::size_t>(c) + static_cast<std::size_t>(r)];
  // undo the energy shift: global phase only
  return std::exp(std::complex<double>(0.0, -units::two_pi * m.energies(2) * t_end)) * u;
}

struct TransferPeak {
  double population = 0.0;  // max |<200|U|101>|^2
  double time = 0.0;        // ns
};

/// Largest 101 -> 200 transfer within [0, t_window].
inline TransferPeak peak_transfer(const ThreeLevelModel& m, const DriveCoefficients& dc, double omega_d,
                                  double t_window, double rtol = 1e-10) {
  using namespace boost::numeric::odeint;
  auto rhs = detail::three_level_rhs(m, dc, omega_d);
  const double dt = 0.02;
  const auto steps = static_cast<std::size_t>(std::ceil(t_window / dt));
  std::vector<detail::ode_state> states;
  std::vector<double> times;
  detail::ode_state x{1.0, 0.0, 0.0};
  auto stepper = make_dense_output(rtol * 1e-2, rtol, runge_kutta_dopri5<detail::ode_state>());
  integrate_n_steps(stepper, rhs, x, 0.0, dt, steps, [&](const detail::ode_state& s, double t) {
    states.push_back(s);
    times.push_back(t);
  });
  std::size_t best = 0;
  for (std::size_t i = 0; i < states.size(); ++i)
    if (std::norm(states[i][2]) > std::norm(states[best][2])) best = i;
  // golden-section refinement between the neighbouring samples
  const std::size_t i0 = best > 0 ? best - 1 : 0;
  const double a0 = times[i0], b0 = times[std::min(best + 1, times.size() - 1)];
  auto pop_at = [&](double t) {
    detail::ode_state y = states[i0];
    if (t > a0) {
      auto st = make_controlled(rtol * 1e-2, rtol, runge_kutta_dopri5<detail::ode_state>());
      integrate_adaptive(st, rhs, y, a0, t, 1e-3);
    }
    return std::norm(y[2]);
  };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = a0, b = b0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = pop_at(c), fd = pop_at(d);
  for (int it = 0; it < 50 && b - a > 1e-9; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = pop_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = pop_at(d);
    }
  }
  TransferPeak p{std::norm(states[best][2]), times[best]};
  const double tm = 0.5 * (a + b), pm = pop_at(tm);
  if (pm > p.population) p = {pm, tm};
  return p;
}

/// Drive frequency maximizing the peak 101 -> 200 transfer of the
/// three-level model, golden-section search to `tol` GHz.
inline double optimize_three_level_frequency(const ThreeLevelModel& m, const DriveCoefficients& dc, double lo,
                                             double hi, double t_window, double tol = 1e-6,
                                             double min_population = 0.5) {
  if (!(hi > lo)) throw Error(ErrorCode::InvalidSpec, "empty frequency bracket");
  auto f = [&](double w) { return peak_transfer(m, dc, w, t_window).population; };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double w = 0.5 * (a + b);
  const double edge = std::min(w - lo, hi - w);
  if (f(w) < min_population || edge < 2.0 * tol)
    throw Error(ErrorCode::NoResonanceInBracket, "no resonant transfer inside the frequency bracket");
  return w;
}

/// Drive amplitude whose first-order analytic gate time equals `target_ns`
/// (bisection on phi_AC in (0, 1.5]).
inline double amplitude_for_gate_time(const ThreeLevelModel& m, double ej_sum, double ej_diff, double target_ns) {
  auto tg = [&](double phi) {
    const auto dc = jacobi_anger_coefficients(ej_sum, ej_diff, phi);
    return analytic_gate_time(m, dc, analytic_drive_frequency(m, dc));
  };
  // bracket by geometric stepping from a very weak drive
  double lo = 1e-3;
  if (tg(lo) < target_ns) throw Error(ErrorCode::NoSignChange, "target gate time below the weakest drive");
  double hi = lo;
  while (true) {
    hi = std::min(1.5, hi * 1.25);
    double t = 0.0;
    try {
      t = tg(hi);
    } catch (const Error&) {
      t = 0.0;  // past the validity of the closed forms
    }
    if (t <= target_ns) break;
    lo = hi;
    if (hi >= 1.5) throw Error(ErrorCode::NoSignChange, "target gate time outside the reachable range");
  }
  for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    double t = 0.0;
    try {
      t = tg(mid);
    } catch (const Error&) {
      t = 0.0;
    }
    (t > target_ns ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace fluxtrans
