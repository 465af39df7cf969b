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
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "fluxtrans/error.hpp"
#include "fluxtrans/linalg.hpp"
#include "fluxtrans/units.hpp"

namespace fluxtrans {

enum class NodeKind { Fluxonium, Transmon, Coupler };

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Fluxonium: return "fluxonium";
    case NodeKind::Transmon: return "transmon";
    case NodeKind::Coupler: return "coupler";
  }
  return "?";
}

/// One circuit element. A coupler is a two-island SQUID element: its shunt
/// capacitance joins the islands and each island has `ground_capacitance`.
struct NodeSpec {
  std::string name;
  NodeKind kind = NodeKind::Transmon;
  double shunt_capacitance = 0.0;   // fF
  double ground_capacitance = 0.0;  // fF, coupler only
  double josephson_energy = 0.0;    // GHz, fluxonium and transmon
  double inductive_energy = 0.0;    // GHz, fluxonium only
  double ej_upper = 0.0;            // GHz, coupler only
  double ej_lower = 0.0;            // GHz, coupler only
  double external_flux = 0.0;       // rad, fluxonium and coupler

  bool is_coupler() const { return kind == NodeKind::Coupler; }
  double ej_sum() const { return ej_upper + ej_lower; }
  double ej_diff() const { return std::abs(ej_upper - ej_lower); }
};

/// Attachment point of a coupling capacitor. For couplers `island` selects
/// island 1 or 2; it must be 0 for single-island nodes.
struct Terminal {
  std::string node;
  int island = 0;
};

struct CouplingSpec {
  Terminal a;
  Terminal b;
  double capacitance = 0.0;  // fF
};

/// Irrotational-gauge weights of a coupler's two junctions.
struct CouplerGauge {
  double m_upper = 0.5;
  double m_lower = -0.5;
};

struct CircuitSpec {
  std::vector<NodeSpec> nodes;
  std::vector<CouplingSpec> couplings;
  std::map<std::string, CouplerGauge> coupler_gauge;

  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].name == name) return i;
    return std::nullopt;
  }

  std::size_t index_of(const std::string& name) const {
    auto i = find(name);
    if (!i) throw Error(ErrorCode::InvalidSpec, "unknown node '" + name + "'");
    return *i;
  }

  const NodeSpec& node(const std::string& name) const { return nodes[index_of(name)]; }
  NodeSpec& node(const std::string& name) { return nodes[index_of(name)]; }

  /// Checks the type invariants; throws InvalidSpec on violation.
  void validate() const;
};

inline void CircuitSpec::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidSpec, m); };
  if (nodes.empty()) fail("circuit has no nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.name.empty()) fail("node without a name");
    for (std::size_t j = 0; j < i; ++j)
      if (nodes[j].name == n.name) fail("duplicate node name '" + n.name + "'");
    if (!(n.shunt_capacitance > 0.0)) fail("node '" + n.name + "': shunt capacitance must be positive");
    switch (n.kind) {
      case NodeKind::Fluxonium:
        if (!(n.josephson_energy > 0.0) || !(n.inductive_energy > 0.0))
          fail("fluxonium '" + n.name + "' needs positive E_J and E_L");
        break;
      case NodeKind::Transmon:
        if (!(n.josephson_energy > 0.0)) fail("transmon '" + n.name + "' needs positive E_J");
        break;
      case NodeKind::Coupler: {
        if (!(n.ground_capacitance > 0.0)) fail("coupler '" + n.name + "' needs positive ground capacitance");
        if (!(n.ej_upper > 0.0) || !(n.ej_lower > 0.0)) fail("coupler '" + n.name + "' needs two positive E_J");
        auto g = coupler_gauge.find(n.name);
        if (g != coupler_gauge.end()) {
          if (std::abs(g->second.m_upper - g->second.m_lower - 1.0) > 1e-12 || !(g->second.m_upper > 0.0) ||
              !(g->second.m_upper < 1.0))
            fail("coupler '" + n.name + "': gauge weights need m_u - m_l = 1 and 0 < m_u < 1");
        }
        break;
      }
    }
  }
  for (const auto& c : couplings) {
    if (!(c.capacitance >= 0.0) || !std::isfinite(c.capacitance)) fail("coupling capacitance must be non-negative");
    for (const Terminal* t : {&c.a, &c.b}) {
      auto idx = find(t->node);
      if (!idx) fail("coupling references unknown node '" + t->node + "'");
      const bool cpl = nodes[*idx].is_coupler();
      if (cpl && t->island != 1 && t->island != 2) fail("coupling to coupler '" + t->node + "' needs island 1 or 2");
      if (!cpl && t->island != 0) fail("island index given for non-coupler node '" + t->node + "'");
    }
    if (c.a.node == c.b.node) fail("coupling connects node '" + c.a.node + "' to itself");
  }
  // connectivity over the coupling graph
  std::vector<std::vector<std::size_t>> adj(nodes.size());
  for (const auto& c : couplings) {
    auto a = index_of(c.a.node), b = index_of(c.b.node);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(nodes.size(), false);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = true;
  while (!q.empty()) {
    auto v = q.front();
    q.pop();
    for (auto w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        q.push(w);
      }
  }
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (!seen[i]) fail("coupling graph is not connected (node '" + nodes[i].name + "')");
}

/// Capacitance matrix with one row per circuit island (fF).
struct CapacitanceMatrix {
  MatrixXd matrix;
  std::vector<std::string> node_order;
};

/// Inverse capacitance matrix scaled by e^2/2h (GHz).
struct ChargingEnergyMatrix {
  MatrixXd matrix;
  std::vector<std::string> node_order;

  double operator()(Eigen::Index i, Eigen::Index j) const { return matrix(i, j); }
};

inline std::string island_name(const NodeSpec& n, int island) {
  return n.is_coupler() ? n.name + "." + std::to_string(island) : n.name;
}

/// Assembles the island capacitance matrix from the circuit graph: each
/// diagonal entry collects every capacitor touching the island, each
/// off-diagonal entry is minus the capacitance joining the two islands.
inline CapacitanceMatrix build_capacitance_matrix(const CircuitSpec& spec) {
  spec.validate();
  CapacitanceMatrix out;
  std::map<std::string, Eigen::Index> row;
  for (const auto& n : spec.nodes) {
    if (n.is_coupler()) {
      for (int k = 1; k <= 2; ++k) {
        row[island_name(n, k)] = static_cast<Eigen::Index>(out.node_order.size());
        out.node_order.push_back(island_name(n, k));
      }
    } else {
      row[n.name] = static_cast<Eigen::Index>(out.node_order.size());
      out.node_order.push_back(n.name);
    }
  }
  const auto dim = static_cast<Eigen::Index>(out.node_order.size());
  MatrixXd c = MatrixXd::Zero(dim, dim);
  auto add_branch = [&](Eigen::Index i, Eigen::Index j, double cap) {
    c(i, i) += cap;
    c(j, j) += cap;
    c(i, j) -= cap;
    c(j, i) -= cap;
  };
  for (const auto& n : spec.nodes) {
    if (n.is_coupler()) {
      const auto i1 = row[island_name(n, 1)], i2 = row[island_name(n, 2)];
      c(i1, i1) += n.ground_capacitance;
      c(i2, i2) += n.ground_capacitance;
      add_branch(i1, i2, n.shunt_capacitance);
    } else {
      const auto i = row[n.name];
      c(i, i) += n.shunt_capacitance;
    }
  }
  for (const auto& cp : spec.couplings) {
    const auto& na = spec.node(cp.a.node);
    const auto& nb = spec.node(cp.b.node);
    add_branch(row[island_name(na, cp.a.island)], row[island_name(nb, cp.b.island)], cp.capacitance);
  }
  Eigen::LLT<MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NonPositiveDefinite, "capacitance matrix is not positive definite");
  out.matrix = std::move(c);
  return out;
}

/// How the free sum mode of each coupler is removed.
enum class ReductionScheme {
  /// Change of coordinates Phi_c1 = (Phi_+ + Phi_-)/2, Phi_c2 = (Phi_+ - Phi_-)/2
  /// (C' = M^T C M) followed by exact elimination of the conserved Phi_+
  /// charge (Schur complement). Preserves the kinetic energy on the retained
  /// modes.
  Elimination,
  /// C' = T C T^T with T the +/- sum/difference matrix, restricted to the
  /// retained rows without elimination.
  Restriction,
};

/// Replaces each coupler's two island rows by the single difference mode.
inline CapacitanceMatrix reduce_coupler_modes(const CapacitanceMatrix& c, const CircuitSpec& spec,
                                              ReductionScheme scheme = ReductionScheme::Elimination) {
  const auto n = c.matrix.rows();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  std::vector<std::string> names;
  for (const auto& node : spec.nodes) {
    if (!node.is_coupler()) continue;
    auto pos = [&](const std::string& s) -> Eigen::Index {
      for (std::size_t i = 0; i < c.node_order.size(); ++i)
        if (c.node_order[i] == s) return static_cast<Eigen::Index>(i);
      throw Error(ErrorCode::InvalidSpec, "coupler island '" + s + "' missing from capacitance matrix");
    };
    const auto i1 = pos(island_name(node, 1)), i2 = pos(island_name(node, 2));
    if (i2 != i1 + 1) throw Error(ErrorCode::InvalidSpec, "coupler '" + node.name + "' islands are not adjacent rows");
    pairs.emplace_back(i1, i2);
    names.push_back(node.name);
  }
  if (pairs.empty()) return c;

  // Columns of `basis` express old island fluxes in the new coordinates.
  // Retained coordinates first, then the dropped sum modes.
  const auto n_drop = static_cast<Eigen::Index>(pairs.size());
  const auto n_keep = n - n_drop;
  MatrixXd basis = MatrixXd::Zero(n, n);
  std::vector<std::string> order;
  Eigen::Index col = 0, drop_col = n_keep;
  std::size_t p = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p < pairs.size() && i == pairs[p].first) {
      const double s = scheme == ReductionScheme::Elimination ? 0.5 : 1.0;
      basis(i, col) = s;
      basis(i + 1, col) = -s;
      basis(i, drop_col) = s;
      basis(i + 1, drop_col) = s;
      order.push_back(names[p]);
      ++col;
      ++drop_col;
      ++i;
      ++p;
    } else {
      basis(i, col++) = 1.0;
      order.push_back(c.node_order[static_cast<std::size_t>(i)]);
    }
  }
  const MatrixXd ct = basis.transpose() * c.matrix * basis;
  const MatrixXd crr = ct.topLeftCorner(n_keep, n_keep);
  const MatrixXd crp = ct.topRightCorner(n_keep, n_drop);
  const MatrixXd cpp = ct.bottomRightCorner(n_drop, n_drop);

  CapacitanceMatrix out;
  out.node_order = std::move(order);
  if (scheme == ReductionScheme::Restriction) {
    out.matrix = crr;
    return out;
  }
  Eigen::LLT<MatrixXd> llt(cpp);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NonPositiveDefinite, "sum-mode block not positive definite");
  out.matrix = crr - crp * llt.solve(crp.transpose());
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();

  // The eliminated modes carry no charge, so the retained inverse-capacitance
  // block of the transformed matrix must coincide with the reduced inverse.
  const MatrixXd full_inv = ct.inverse();
  const MatrixXd residual = out.matrix * full_inv.topLeftCorner(n_keep, n_keep) - MatrixXd::Identity(n_keep, n_keep);
  if (residual.cwiseAbs().maxCoeff() > 1e-9) throw Error(ErrorCode::FreeModeCoupled, "dropped sum mode remains coupled");
  return out;
}

inline ChargingEnergyMatrix charging_energy_matrix(const CapacitanceMatrix& c) {
  const auto n = c.matrix.rows();
  Eigen::LLT<MatrixXd> llt(c.matrix);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularMatrix, "capacitance matrix cannot be inverted");
  MatrixXd inv = llt.solve(MatrixXd::Identity(n, n));
  if (!inv.allFinite()) throw Error(ErrorCode::SingularMatrix, "capacitance inverse is not finite");
  ChargingEnergyMatrix out;
  out.matrix = units::charging_constant * 0.5 * (inv + inv.transpose());
  out.node_order = c.node_order;
  return out;
}

/// Full pipeline: graph assembly, coupler reduction, inversion.
inline ChargingEnergyMatrix circuit_charging_energies(const CircuitSpec& spec,
                                                      ReductionScheme scheme = ReductionScheme::Elimination) {
  return charging_energy_matrix(reduce_coupler_modes(build_capacitance_matrix(spec), spec, scheme));
}

}  // namespace fluxtrans
