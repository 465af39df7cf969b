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

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "fluxtrans/circuit.hpp"
#include "fluxtrans/error.hpp"
#include "fluxtrans/linalg.hpp"
#include "fluxtrans/units.hpp"

namespace fluxtrans {

/// Charge and flux operators of one mode in a truncated oscillator basis.
struct ModeOperators {
  MatrixXcd n;
  MatrixXcd phi;
  MatrixXd n_squared;    // exact truncation of n^2 (not the square of truncated n)
  MatrixXd phi_squared;  // exact truncation of phi^2
  int levels = 0;
  double zpf_phi = 0.0;
  double charging_energy = 0.0;
  double stiffness = 0.0;
};

namespace detail {

inline MatrixXd annihilation(int levels) {
  MatrixXd a = MatrixXd::Zero(levels, levels);
  for (int k = 1; k < levels; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

}  // namespace detail

inline ModeOperators mode_operators(NodeKind /*kind*/, double charging_energy, double stiffness, int levels) {
  if (levels < 2) throw Error(ErrorCode::InvalidTruncation, "at least two levels are required");
  if (!(charging_energy > 0.0) || !(stiffness > 0.0))
    throw Error(ErrorCode::InvalidSpec, "mode operators need positive E_C and stiffness");
  ModeOperators m;
  m.levels = levels;
  m.charging_energy = charging_energy;
  m.stiffness = stiffness;
  const double ratio = std::pow(8.0 * charging_energy / stiffness, 0.25);
  m.zpf_phi = ratio / std::sqrt(2.0);
  const double n_scale = 1.0 / (ratio * std::sqrt(2.0));

  const MatrixXd a = detail::annihilation(levels);
  const MatrixXd x = a.transpose() + a;  // a^dagger + a
  const MatrixXd p = a.transpose() - a;  // a^dagger - a
  m.n = Complex(0.0, n_scale) * p.cast<Complex>();
  m.phi = (m.zpf_phi * x).cast<Complex>();

  const MatrixXd big = detail::annihilation(levels + 1);
  const MatrixXd xb = big.transpose() + big;
  const MatrixXd pb = big.transpose() - big;
  m.phi_squared = (m.zpf_phi * m.zpf_phi * (xb * xb)).topLeftCorner(levels, levels);
  m.n_squared = (-n_scale * n_scale * (pb * pb)).topLeftCorner(levels, levels);
  return m;
}

/// cos(phi) and sin(phi) of a Hermitian phase operator from one spectral decomposition.
struct TrigOperators {
  MatrixXcd cos;
  MatrixXcd sin;
};

inline TrigOperators trig_operators(const MatrixXcd& phi) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(phi);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "phase operator eigen-decomposition failed");
  const auto& v = es.eigenvectors();
  const VectorXd& l = es.eigenvalues();
  TrigOperators t;
  t.cos = v * l.array().cos().matrix().cast<Complex>().asDiagonal() * v.adjoint();
  t.sin = v * l.array().sin().matrix().cast<Complex>().asDiagonal() * v.adjoint();
  return t;
}

/// cos(phi - offset), evaluated exactly in the truncated basis.
inline MatrixXcd cosine_operator(const MatrixXcd& phi, double offset) {
  const auto t = trig_operators(phi);
  return std::cos(offset) * t.cos + std::sin(offset) * t.sin;
}

/// sin(phi - offset), evaluated exactly in the truncated basis.
inline MatrixXcd sine_operator(const MatrixXcd& phi, double offset) {
  const auto t = trig_operators(phi);
  return std::cos(offset) * t.sin - std::sin(offset) * t.cos;
}

/// Two-junction SQUID of a coupler. Junction k sees the phase
/// phi_c - 2 m_k phi_ext, so the loop encloses the phase 2 phi_ext and the
/// effective junction energy is E_sum sqrt(cos^2 x + d^2 sin^2 x).
struct SquidModel {
  double ej_upper = 0.0;
  double ej_lower = 0.0;
  CouplerGauge gauge;

  /// Z(x) with -Re[e^{i phi_c} Z(x)] equal to the SQUID potential.
  Complex junction_sum(double flux) const {
    return ej_upper * std::exp(Complex(0.0, -2.0 * gauge.m_upper * flux)) +
           ej_lower * std::exp(Complex(0.0, -2.0 * gauge.m_lower * flux));
  }
  double effective_ej(double flux) const { return std::abs(junction_sum(flux)); }
  double ej_sum() const { return ej_upper + ej_lower; }
  double ej_diff() const { return std::abs(ej_upper - ej_lower); }
  double asymmetry() const { return ej_diff() / ej_sum(); }
};

inline SquidModel squid_model(const NodeSpec& node, const CircuitSpec& spec) {
  auto g = spec.coupler_gauge.find(node.name);
  if (g == spec.coupler_gauge.end())
    throw Error(ErrorCode::GaugeMismatch, "coupler '" + node.name + "' has no gauge weights");
  return SquidModel{node.ej_upper, node.ej_lower, g->second};
}

/// Oscillator stiffness used for the basis of a node (E_L or E_J).
inline double node_stiffness(const NodeSpec& node, const CircuitSpec* spec = nullptr) {
  switch (node.kind) {
    case NodeKind::Fluxonium: return node.inductive_energy;
    case NodeKind::Transmon: return node.josephson_energy;
    case NodeKind::Coupler: {
      if (spec) return squid_model(node, *spec).effective_ej(node.external_flux);
      const double x = node.external_flux;
      return (node.ej_upper + node.ej_lower) *
             std::sqrt(std::pow(std::cos(x), 2) +
                       std::pow((node.ej_upper - node.ej_lower) / (node.ej_upper + node.ej_lower), 2) *
                           std::pow(std::sin(x), 2));
    }
  }
  return 0.0;
}

/// On-site Hamiltonian 4 E_C n^2 + potential for one node. Coupler nodes need
/// their gauge weights; the reference phase is chosen so the potential well
/// sits at phi_c = 0 for the node's own external flux.
inline MatrixXcd node_hamiltonian(const NodeSpec& node, const ModeOperators& ops,
                                  const std::optional<CouplerGauge>& gauge = std::nullopt) {
  MatrixXcd h = (4.0 * ops.charging_energy * ops.n_squared).cast<Complex>();
  const auto dim = ops.levels;
  switch (node.kind) {
    case NodeKind::Fluxonium: {
      const double x = node.external_flux;
      h += (0.5 * node.inductive_energy *
            (ops.phi_squared - 2.0 * x * ops.phi.real() + x * x * MatrixXd::Identity(dim, dim)))
               .cast<Complex>();
      h -= node.josephson_energy * cosine_operator(ops.phi, 0.0);
      break;
    }
    case NodeKind::Transmon:
      h -= node.josephson_energy * cosine_operator(ops.phi, 0.0);
      break;
    case NodeKind::Coupler: {
      if (!gauge) throw Error(ErrorCode::GaugeMismatch, "coupler '" + node.name + "' has no gauge weights");
      const SquidModel sq{node.ej_upper, node.ej_lower, *gauge};
      const double x = node.external_flux;
      const double theta0 = -std::arg(sq.junction_sum(x));
      const auto t = trig_operators(ops.phi);
      for (auto [ej, m] : {std::pair{sq.ej_upper, gauge->m_upper}, std::pair{sq.ej_lower, gauge->m_lower}}) {
        const double offset = 2.0 * m * x - theta0;
        h -= ej * (std::cos(offset) * t.cos + std::sin(offset) * t.sin);
      }
      break;
    }
  }
  return 0.5 * (h + h.adjoint());
}

/// Default oscillator-basis size used before projecting onto local eigenstates.
/// Transmon-like modes use moderate bases: the extended-phase oscillator basis
/// starts to resolve neighbouring cosine wells once it spans |phi| > 2 pi,
/// which produces spurious near-degenerate levels.
inline int default_bare_levels(NodeKind kind) {
  switch (kind) {
    case NodeKind::Fluxonium: return 50;
    case NodeKind::Transmon: return 30;
    case NodeKind::Coupler: return 12;
  }
  return 30;
}

/// Smallest truncation whose lowest `target_levels` eigenvalues and |<0|n|1>|
/// change by less than `tol` when ten more levels are added.
inline int converge_levels(const NodeSpec& node, double charging_energy, int target_levels, double tol = 1e-5,
                           const std::optional<CouplerGauge>& gauge = CouplerGauge{}) {
  if (target_levels < 2) throw Error(ErrorCode::InvalidTruncation, "target_levels must be at least 2");
  const double stiffness = node_stiffness(node);
  struct Probe {
    VectorXd e;
    double n01;
  };
  auto probe = [&](int levels) {
    const auto ops = mode_operators(node.kind, charging_energy, stiffness, levels);
    const MatrixXd h = node_hamiltonian(node, ops, gauge).real();
    const auto eig = symmetric_eigen(h);
    const MatrixXd nim = ops.n.imag();
    return Probe{eig.values.head(target_levels),
                 std::abs(eig.vectors.col(0).dot(nim * eig.vectors.col(1)))};
  };
  constexpr int kMax = 200;
  for (int levels = target_levels; levels + 10 <= kMax + 10 && levels <= kMax; ++levels) {
    const auto a = probe(levels);
    const auto b = probe(levels + 10);
    if ((a.e - b.e).cwiseAbs().maxCoeff() < tol && std::abs(a.n01 - b.n01) < tol) return levels;
  }
  throw Error(ErrorCode::NoConvergence, "node '" + node.name + "' did not converge within 200 levels");
}

/// A node after local diagonalization, restricted to its lowest eigenstates.
/// All matrices are real in this basis; the charge operator is n = i * n_imag.
struct LocalMode {
  NodeSpec node;
  int bare_levels = 0;
  int levels = 0;
  double charging_energy = 0.0;
  double zpf_phi = 0.0;
  VectorXd energies;  // GHz, lowest local eigenvalues
  MatrixXd n_imag;    // real antisymmetric
  MatrixXd phi;
  MatrixXd cos_phi;
  MatrixXd sin_phi;
  MatrixXd vectors;   // bare oscillator basis -> kept eigenbasis
};

inline LocalMode local_mode(const NodeSpec& node, double charging_energy, int bare_levels, int levels,
                            const CircuitSpec& spec) {
  if (levels < 2) throw Error(ErrorCode::InvalidTruncation, "node '" + node.name + "' needs at least 2 levels");
  if (bare_levels < levels) throw Error(ErrorCode::InvalidTruncation, "bare truncation below kept levels");
  std::optional<CouplerGauge> gauge;
  if (node.is_coupler()) {
    auto g = spec.coupler_gauge.find(node.name);
    if (g == spec.coupler_gauge.end())
      throw Error(ErrorCode::GaugeMismatch, "coupler '" + node.name + "' has no gauge weights");
    gauge = g->second;
  }
  const auto ops = mode_operators(node.kind, charging_energy, node_stiffness(node, node.is_coupler() ? &spec : nullptr),
                                  bare_levels);
  const MatrixXd h = node_hamiltonian(node, ops, gauge).real();
  auto eig = symmetric_eigen(h, levels);
  // deterministic sign: largest-magnitude component of each vector positive
  for (int k = 0; k < levels; ++k) {
    Eigen::Index imax;
    eig.vectors.col(k).cwiseAbs().maxCoeff(&imax);
    if (eig.vectors(imax, k) < 0) eig.vectors.col(k) *= -1.0;
  }
  LocalMode m;
  m.node = node;
  m.bare_levels = bare_levels;
  m.levels = levels;
  m.charging_energy = charging_energy;
  m.zpf_phi = ops.zpf_phi;
  m.energies = eig.values;
  m.vectors = eig.vectors;
  const auto& v = eig.vectors;
  m.n_imag = v.transpose() * ops.n.imag() * v;
  m.n_imag = 0.5 * (m.n_imag - m.n_imag.transpose()).eval();
  m.phi = v.transpose() * ops.phi.real() * v;
  const auto t = trig_operators(ops.phi);
  m.cos_phi = v.transpose() * t.cos.real() * v;
  m.sin_phi = v.transpose() * t.sin.real() * v;
  return m;
}

/// Truncation choices for assembling the full Hamiltonian.
struct QuantizationOptions {
  int default_levels = 5;
  std::map<std::string, int> levels;       // kept local eigenstates per node
  std::map<std::string, int> bare_levels;  // oscillator basis size per node
  double dimension_cap = 2e5;
  ReductionScheme reduction = ReductionScheme::Elimination;
  double cross_charge_factor = 8.0;  // H_ij = factor * E_C,ij n_i n_j for i < j

  int levels_for(const NodeSpec& n) const {
    auto it = levels.find(n.name);
    return it == levels.end() ? default_levels : it->second;
  }
  int bare_levels_for(const NodeSpec& n) const {
    auto it = bare_levels.find(n.name);
    return it == bare_levels.end() ? default_bare_levels(n.kind) : it->second;
  }
};

/// Drive operators of one coupler in the full basis. The SQUID potential at
/// flux x is -Re W(x) * cos_phi + Im W(x) * sin_phi, with W the junction sum
/// rotated so that W(reference_flux) is real and positive.
struct CouplerDrive {
  std::size_t node_index = 0;  // position in basis_order
  SquidModel squid;
  double reference_flux = 0.0;
  double reference_phase = 0.0;  // theta_0
  MatrixXd cos_phi;
  MatrixXd sin_phi;

  Complex rotated_sum(double flux) const {
    return std::exp(Complex(0.0, reference_phase)) * squid.junction_sum(flux);
  }
};

/// Full Hamiltonian in the tensor product of local eigenbases (real symmetric).
struct HamiltonianModel {
  CircuitSpec spec;
  ChargingEnergyMatrix charging;
  std::vector<LocalMode> modes;
  std::vector<int> node_dims;
  std::vector<std::string> basis_order;
  MatrixXd static_hamiltonian;  // at the fluxes stored in spec
  std::vector<CouplerDrive> couplers;

  Eigen::Index dimension() const { return static_hamiltonian.rows(); }

  /// First coupler's cos(phi_c) in the full basis.
  const MatrixXd& coupler_drive_operator(std::size_t k = 0) const { return couplers.at(k).cos_phi; }

  /// Static Hamiltonian with coupler fluxes moved to `coupler_fluxes` while the
  /// local bases are kept fixed (projected SQUID update).
  MatrixXd static_part(const std::vector<double>& coupler_fluxes) const {
    if (coupler_fluxes.size() != couplers.size())
      throw Error(ErrorCode::InvalidSpec, "one flux per coupler is required");
    MatrixXd h = static_hamiltonian;
    for (std::size_t k = 0; k < couplers.size(); ++k) {
      const auto& c = couplers[k];
      const Complex w = c.rotated_sum(coupler_fluxes[k]) - c.rotated_sum(c.reference_flux);
      h.noalias() -= w.real() * c.cos_phi;
      h.noalias() += w.imag() * c.sin_phi;
    }
    return h;
  }

  /// Multi-index (one entry per node) of a basis state.
  std::vector<int> label_of(Eigen::Index index) const {
    std::vector<int> lab(node_dims.size());
    for (std::size_t i = node_dims.size(); i-- > 0;) {
      lab[i] = static_cast<int>(index % node_dims[i]);
      index /= node_dims[i];
    }
    return lab;
  }
  Eigen::Index index_of(const std::vector<int>& label) const {
    if (label.size() != node_dims.size()) throw Error(ErrorCode::BadIndex, "label length does not match node count");
    Eigen::Index idx = 0;
    for (std::size_t i = 0; i < node_dims.size(); ++i) {
      if (label[i] < 0 || label[i] >= node_dims[i]) throw Error(ErrorCode::BadIndex, "label entry out of range");
      idx = idx * node_dims[i] + label[i];
    }
    return idx;
  }
};

namespace detail {

/// Kronecker product of a chain of square matrices.
inline MatrixXd kron_chain(const std::vector<MatrixXd>& factors) {
  MatrixXd out = MatrixXd::Ones(1, 1);
  for (const auto& f : factors) out = Eigen::kroneckerProduct(out, f).eval();
  return out;
}

}  // namespace detail

/// Assembles H = sum_i [4 E_C,ii n_i^2 + U_i] + sum_{i<j} 8 E_C,ij n_i n_j in
/// the product of local eigenbases.
inline HamiltonianModel assemble_hamiltonian(const CircuitSpec& spec, const ChargingEnergyMatrix& ec,
                                             const QuantizationOptions& opt = {}) {
  spec.validate();
  HamiltonianModel model;
  model.spec = spec;
  model.charging = ec;
  const auto nn = spec.nodes.size();
  if (static_cast<std::size_t>(ec.matrix.rows()) != nn)
    throw Error(ErrorCode::InvalidSpec, "charging matrix size does not match the node count");
  double dim = 1.0;
  for (std::size_t i = 0; i < nn; ++i) {
    const auto& node = spec.nodes[i];
    if (ec.node_order[i] != node.name)
      throw Error(ErrorCode::InvalidSpec, "charging matrix order differs from node order at '" + node.name + "'");
    const int lv = opt.levels_for(node);
    if (lv < 2) throw Error(ErrorCode::InvalidTruncation, "node '" + node.name + "' needs at least 2 levels");
    dim *= lv;
    model.node_dims.push_back(lv);
    model.basis_order.push_back(node.name);
  }
  if (dim > opt.dimension_cap) throw Error(ErrorCode::DimensionOverflow, "Hilbert-space dimension exceeds the cap");
  for (std::size_t i = 0; i < nn; ++i) {
    const auto& node = spec.nodes[i];
    model.modes.push_back(local_mode(node, ec.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)),
                                     std::max(opt.bare_levels_for(node), model.node_dims[i]), model.node_dims[i], spec));
  }
  const auto d = static_cast<Eigen::Index>(dim);
  MatrixXd h = MatrixXd::Zero(d, d);
  // on-site energies are diagonal in the product basis
  for (Eigen::Index k = 0; k < d; ++k) {
    const auto lab = model.label_of(k);
    double e = 0.0;
    for (std::size_t i = 0; i < nn; ++i) e += model.modes[i].energies(lab[i]);
    h(k, k) = e;
  }
  auto identities = [&]() {
    std::vector<MatrixXd> f;
    for (auto di : model.node_dims) f.push_back(MatrixXd::Identity(di, di));
    return f;
  };
  for (std::size_t i = 0; i < nn; ++i) {
    for (std::size_t j = i + 1; j < nn; ++j) {
      const double eij = ec.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (eij == 0.0) continue;
      auto f = identities();
      f[i] = model.modes[i].n_imag;
      f[j] = model.modes[j].n_imag;
      // n_i n_j = (i N_i)(i N_j) = -N_i N_j
      h.noalias() -= opt.cross_charge_factor * eij * detail::kron_chain(f);
    }
  }
  if (symmetry_defect(h) > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::InvalidSpec, "assembled Hamiltonian is not symmetric");
  model.static_hamiltonian = 0.5 * (h + h.transpose());

  for (std::size_t i = 0; i < nn; ++i) {
    const auto& node = spec.nodes[i];
    if (!node.is_coupler()) continue;
    CouplerDrive c;
    c.node_index = i;
    c.squid = squid_model(node, spec);
    c.reference_flux = node.external_flux;
    c.reference_phase = -std::arg(c.squid.junction_sum(node.external_flux));
    auto f = identities();
    f[i] = model.modes[i].cos_phi;
    c.cos_phi = detail::kron_chain(f);
    f[i] = model.modes[i].sin_phi;
    c.sin_phi = detail::kron_chain(f);
    model.couplers.push_back(std::move(c));
  }
  return model;
}

/// Convenience: circuit algebra followed by assembly.
inline HamiltonianModel build_model(const CircuitSpec& spec, const QuantizationOptions& opt = {}) {
  return assemble_hamiltonian(spec, circuit_charging_energies(spec, opt.reduction), opt);
}

}  // namespace fluxtrans
