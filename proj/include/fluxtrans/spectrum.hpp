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
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "fluxtrans/error.hpp"
#include "fluxtrans/linalg.hpp"
#include "fluxtrans/parallel.hpp"
#include "fluxtrans/quantization.hpp"
#include "fluxtrans/units.hpp"

namespace fluxtrans {

/// Bare product-state label, one excitation number per node in basis order.
using Label = std::vector<int>;

inline std::string label_string(const Label& l) {
  std::string s;
  for (int v : l) s += (v < 10 ? std::to_string(v) : "(" + std::to_string(v) + ")");
  return s;
}

/// Label with the given node excitations and every other node in its ground state.
inline Label make_label(std::size_t nodes, const std::map<std::size_t, int>& excitations) {
  Label l(nodes, 0);
  for (auto [i, v] : excitations) {
    if (i >= nodes) throw Error(ErrorCode::BadIndex, "node index out of range");
    l[i] = v;
  }
  return l;
}

struct DressedSpectrum {
  std::vector<int> node_dims;
  VectorXd eigenvalues;   // ascending, GHz
  MatrixXd eigenvectors;  // columns, product-basis components
  std::map<Label, Eigen::Index> column;
  std::map<Label, double> energies;
  std::map<Label, double> overlaps;

  bool has(const Label& l) const { return column.count(l) != 0; }
  Eigen::Index index(const Label& l) const {
    auto it = column.find(l);
    if (it == column.end()) throw Error(ErrorCode::MissingLabel, "state |" + label_string(l) + "> not labeled");
    return it->second;
  }
  double energy(const Label& l) const { return eigenvalues(index(l)); }
  double overlap(const Label& l) const { return overlaps.at(l); }
  VectorXd state(const Label& l) const { return eigenvectors.col(index(l)); }
  Eigen::Index bare_index(const Label& l) const {
    Eigen::Index idx = 0;
    for (std::size_t i = 0; i < node_dims.size(); ++i) idx = idx * node_dims[i] + l[i];
    return idx;
  }
  Label bare_label(Eigen::Index idx) const {
    Label lab(node_dims.size());
    for (std::size_t i = node_dims.size(); i-- > 0;) {
      lab[i] = static_cast<int>(idx % node_dims[i]);
      idx /= node_dims[i];
    }
    return lab;
  }
};

namespace detail {

/// Minimum-cost assignment of every row to a distinct column (rows <= cols).
inline std::vector<int> hungarian(const MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows()), m = static_cast<int>(cost.cols());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<bool> used(m + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace detail

struct SpectrumOptions {
  int count = 0;                 // eigenpairs to compute, 0 = all
  std::vector<Label> required;   // labels checked for ambiguity
  double ambiguity_tolerance = 1e-6;
};

/// Labels dressed eigenstates of a real symmetric Hamiltonian by maximal bare
/// overlap: global greedy assignment on descending overlap, then an optimal
/// assignment for the states left over.
inline DressedSpectrum label_spectrum(const SymmetricEigen& eig, const std::vector<int>& node_dims,
                                      const SpectrumOptions& opt = {}) {
  DressedSpectrum s;
  s.node_dims = node_dims;
  s.eigenvalues = eig.values;
  s.eigenvectors = eig.vectors;
  const Eigen::Index dim = eig.vectors.rows(), m = eig.vectors.cols();
  const MatrixXd prob = eig.vectors.array().square().matrix();

  struct Candidate {
    double p;
    Eigen::Index state, bare;
  };
  std::vector<Candidate> cand;
  const int per_state = static_cast<int>(std::min<Eigen::Index>(dim, 12));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
  for (Eigen::Index n = 0; n < m; ++n) {
    for (Eigen::Index k = 0; k < dim; ++k) order[static_cast<std::size_t>(k)] = k;
    std::partial_sort(order.begin(), order.begin() + per_state, order.end(),
                      [&](Eigen::Index a, Eigen::Index b) { return prob(a, n) > prob(b, n); });
    for (int r = 0; r < per_state; ++r) cand.push_back({prob(order[r], n), n, order[r]});
  }
  std::stable_sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
    if (a.p != b.p) return a.p > b.p;
    if (a.state != b.state) return a.state < b.state;
    return a.bare < b.bare;
  });
  std::vector<Eigen::Index> state_to_bare(static_cast<std::size_t>(m), -1);
  std::vector<bool> bare_used(static_cast<std::size_t>(dim), false);
  for (const auto& c : cand) {
    if (state_to_bare[static_cast<std::size_t>(c.state)] >= 0 || bare_used[static_cast<std::size_t>(c.bare)]) continue;
    state_to_bare[static_cast<std::size_t>(c.state)] = c.bare;
    bare_used[static_cast<std::size_t>(c.bare)] = true;
  }
  // repair: optimal assignment of the remaining states among unused bare labels
  std::vector<Eigen::Index> left_states, free_bare;
  for (Eigen::Index n = 0; n < m; ++n)
    if (state_to_bare[static_cast<std::size_t>(n)] < 0) left_states.push_back(n);
  if (!left_states.empty()) {
    std::vector<bool> in_free(static_cast<std::size_t>(dim), false);
    for (auto n : left_states)
      for (Eigen::Index k = 0; k < dim; ++k)
        if (!bare_used[static_cast<std::size_t>(k)] && prob(k, n) > 1e-12 && !in_free[static_cast<std::size_t>(k)]) {
          in_free[static_cast<std::size_t>(k)] = true;
          free_bare.push_back(k);
        }
    for (Eigen::Index k = 0; k < dim && free_bare.size() < left_states.size(); ++k)
      if (!bare_used[static_cast<std::size_t>(k)] && !in_free[static_cast<std::size_t>(k)]) {
        in_free[static_cast<std::size_t>(k)] = true;
        free_bare.push_back(k);
      }
    MatrixXd cost(static_cast<Eigen::Index>(left_states.size()), static_cast<Eigen::Index>(free_bare.size()));
    for (std::size_t r = 0; r < left_states.size(); ++r)
      for (std::size_t c = 0; c < free_bare.size(); ++c)
        cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = -prob(free_bare[c], left_states[r]);
    const auto assign = detail::hungarian(cost);
    for (std::size_t r = 0; r < left_states.size(); ++r) {
      const auto k = free_bare[static_cast<std::size_t>(assign[r])];
      state_to_bare[static_cast<std::size_t>(left_states[r])] = k;
      bare_used[static_cast<std::size_t>(k)] = true;
    }
  }
  for (Eigen::Index n = 0; n < m; ++n) {
    const auto k = state_to_bare[static_cast<std::size_t>(n)];
    const Label lab = s.bare_label(k);
    if (s.eigenvectors(k, n) < 0) s.eigenvectors.col(n) *= -1.0;  // real positive bare overlap
    s.column[lab] = n;
    s.energies[lab] = s.eigenvalues(n);
    s.overlaps[lab] = prob(k, n);
  }
  for (const auto& req : opt.required) {
    if (!s.has(req)) throw Error(ErrorCode::MissingLabel, "required state |" + label_string(req) + "> not found");
    const auto k = s.bare_index(req);
    double best = -1.0, second = -1.0;
    for (Eigen::Index n = 0; n < m; ++n) {
      const double p = prob(k, n);
      if (p > best) {
        second = best;
        best = p;
      } else if (p > second) {
        second = p;
      }
    }
    if (best - second < opt.ambiguity_tolerance)
      throw Error(ErrorCode::AmbiguousLabel, "state |" + label_string(req) + "> is too strongly hybridized to label");
  }
  return s;
}

inline DressedSpectrum dressed_spectrum(const MatrixXd& h, const std::vector<int>& node_dims,
                                        const SpectrumOptions& opt = {}) {
  return label_spectrum(symmetric_eigen(h, opt.count), node_dims, opt);
}

inline DressedSpectrum dressed_spectrum(const HamiltonianModel& model, const SpectrumOptions& opt = {}) {
  return dressed_spectrum(model.static_hamiltonian, model.node_dims, opt);
}

/// Indices of the qubit (non-coupler) nodes in basis order.
inline std::vector<std::size_t> qubit_nodes(const CircuitSpec& spec) {
  std::vector<std::size_t> q;
  for (std::size_t i = 0; i < spec.nodes.size(); ++i)
    if (!spec.nodes[i].is_coupler()) q.push_back(i);
  return q;
}

/// Computational labels over the given qubit nodes, in binary order with the
/// first qubit most significant.
inline std::vector<Label> computational_labels(std::size_t nodes, const std::vector<std::size_t>& qubits) {
  std::vector<Label> out;
  const std::size_t nq = qubits.size();
  for (std::size_t b = 0; b < (std::size_t{1} << nq); ++b) {
    Label l(nodes, 0);
    for (std::size_t q = 0; q < nq; ++q) l[qubits[q]] = static_cast<int>((b >> (nq - 1 - q)) & 1U);
    out.push_back(l);
  }
  return out;
}

/// zeta = E_11 - E_10 - E_01 + E_00 for qubits a and b, in kHz.
inline double zz_crosstalk(const DressedSpectrum& s, std::size_t qubit_a, std::size_t qubit_b) {
  const auto n = s.node_dims.size();
  const double e11 = s.energy(make_label(n, {{qubit_a, 1}, {qubit_b, 1}}));
  const double e10 = s.energy(make_label(n, {{qubit_a, 1}}));
  const double e01 = s.energy(make_label(n, {{qubit_b, 1}}));
  const double e00 = s.energy(make_label(n, {}));
  return ((e11 - e10) - (e01 - e00)) * units::ghz_to_khz;
}

/// Two-node-qubit convenience for a (qubit, coupler, qubit) cell.
inline double zz_crosstalk(const DressedSpectrum& s) {
  if (s.node_dims.size() != 3) throw Error(ErrorCode::BadIndex, "pair must be given for chains longer than one cell");
  return zz_crosstalk(s, 0, 2);
}

/// Three-body coefficient E_111 - E_110 - E_101 - E_011 + E_100 + E_010 + E_001 - E_000 in Hz.
inline double zzz_interaction(const DressedSpectrum& s, std::size_t q1, std::size_t q2, std::size_t q3) {
  const auto n = s.node_dims.size();
  double acc = 0.0;
  for (int b = 0; b < 8; ++b) {
    const int x = (b >> 2) & 1, y = (b >> 1) & 1, z = b & 1;
    const int weight = x + y + z;
    const double sign = ((3 - weight) % 2 == 0) ? 1.0 : -1.0;
    acc += sign * s.energy(make_label(n, {{q1, x}, {q2, y}, {q3, z}}));
  }
  return acc * units::ghz_to_hz;
}

/// epsilon = 1 - |<l|l>_0|^2 for each computational label.
inline std::map<Label, double> delocalization(const DressedSpectrum& s, const std::vector<std::size_t>& qubits) {
  std::map<Label, double> out;
  for (const auto& l : computational_labels(s.node_dims.size(), qubits)) {
    s.index(l);
    out[l] = 1.0 - s.overlap(l);
  }
  return out;
}

/// Default number of eigenpairs for static analysis: everything for small
/// systems, a low-energy window for long chains.
inline int default_eigen_count(const HamiltonianModel& m) {
  return m.dimension() <= 400 ? 0 : static_cast<int>(std::min<Eigen::Index>(m.dimension(), 160));
}

/// ZZ values for every qubit pair of a model at its stored fluxes.
struct PairZZ {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<double> zeta_khz;
};

inline PairZZ pairwise_zz(const DressedSpectrum& s, const std::vector<std::size_t>& qubits) {
  PairZZ out;
  for (std::size_t a = 0; a < qubits.size(); ++a)
    for (std::size_t b = a + 1; b < qubits.size(); ++b) {
      out.pairs.emplace_back(qubits[a], qubits[b]);
      out.zeta_khz.push_back(zz_crosstalk(s, qubits[a], qubits[b]));
    }
  return out;
}

/// Static-analysis recipe: rebuilds the model from scratch for each parameter
/// point so local bases follow the flux.
struct StaticProblem {
  CircuitSpec spec;
  QuantizationOptions quantization;
  int eigen_count = -1;  // -1 = default for the model size

  DressedSpectrum spectrum_at(const CircuitSpec& s) const {
    const auto model = build_model(s, quantization);
    SpectrumOptions so;
    so.count = eigen_count < 0 ? default_eigen_count(model) : eigen_count;
    return dressed_spectrum(model, so);
  }
};

inline CircuitSpec with_coupler_fluxes(CircuitSpec spec, const std::vector<double>& fluxes) {
  std::size_t k = 0;
  for (auto& n : spec.nodes)
    if (n.is_coupler()) {
      if (k >= fluxes.size()) throw Error(ErrorCode::InvalidSpec, "missing coupler flux");
      n.external_flux = fluxes[k++];
    }
  if (k != fluxes.size()) throw Error(ErrorCode::InvalidSpec, "more fluxes than couplers");
  return spec;
}

struct ZZSweepPoint {
  std::vector<double> fluxes;
  std::vector<double> zeta_khz;  // per qubit pair
  int dominant_pair = -1;        // index of the nearest-neighbour pair with largest |zeta|
};

struct ZZSweep {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<ZZSweepPoint> points;
};

/// ZZ on a grid of coupler fluxes. `grids[k]` is the flux grid of coupler k;
/// the sweep covers their Cartesian product (first coupler slowest).
inline ZZSweep zz_flux_sweep(const StaticProblem& problem, const std::vector<std::vector<double>>& grids,
                             int threads = 1) {
  std::size_t ncpl = 0;
  for (const auto& n : problem.spec.nodes) ncpl += n.is_coupler() ? 1 : 0;
  if (grids.size() != ncpl) throw Error(ErrorCode::InvalidSpec, "one flux grid per coupler is required");
  const auto qubits = qubit_nodes(problem.spec);
  ZZSweep out;
  for (std::size_t a = 0; a < qubits.size(); ++a)
    for (std::size_t b = a + 1; b < qubits.size(); ++b) out.pairs.emplace_back(qubits[a], qubits[b]);
  std::size_t total = ncpl == 0 ? 0 : 1;
  for (const auto& g : grids) total *= g.size();
  out.points.resize(total);
  // nearest neighbours are consecutive qubits in the chain
  std::vector<int> neighbour_pairs;
  for (std::size_t p = 0; p < out.pairs.size(); ++p) {
    auto ia = std::find(qubits.begin(), qubits.end(), out.pairs[p].first) - qubits.begin();
    auto ib = std::find(qubits.begin(), qubits.end(), out.pairs[p].second) - qubits.begin();
    if (ib - ia == 1) neighbour_pairs.push_back(static_cast<int>(p));
  }
  parallel_for(total, threads, [&](std::size_t idx) {
    std::vector<double> fl(ncpl);
    std::size_t rem = idx;
    for (std::size_t k = ncpl; k-- > 0;) {
      fl[k] = grids[k][rem % grids[k].size()];
      rem /= grids[k].size();
    }
    const auto s = problem.spectrum_at(with_coupler_fluxes(problem.spec, fl));
    ZZSweepPoint pt;
    pt.fluxes = fl;
    pt.zeta_khz = pairwise_zz(s, qubits).zeta_khz;
    double best = -1.0;
    for (int p : neighbour_pairs)
      if (std::abs(pt.zeta_khz[static_cast<std::size_t>(p)]) > best) {
        best = std::abs(pt.zeta_khz[static_cast<std::size_t>(p)]);
        pt.dominant_pair = p;
      }
    out.points[idx] = std::move(pt);
  });
  return out;
}

/// Bisection root of a scalar function on [lo, hi] until |f| < target.
inline double bisect_root(const std::function<double(double)>& f, double lo, double hi, double target,
                          int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (std::abs(flo) < target) return lo;
  if (std::abs(fhi) < target) return hi;
  if ((flo > 0) == (fhi > 0)) throw Error(ErrorCode::NoSignChange, "function does not change sign on the bracket");
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) < target || hi - lo < 1e-14) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Coupler flux at which zeta between `pair` vanishes, |zeta| < 0.01 kHz.
inline double find_zero_zz_flux(const StaticProblem& problem, double lo, double hi, std::size_t coupler = 0,
                                std::pair<std::size_t, std::size_t> pair = {0, 2}, double target_khz = 0.01) {
  std::vector<double> base;
  for (const auto& n : problem.spec.nodes)
    if (n.is_coupler()) base.push_back(n.external_flux);
  if (coupler >= base.size()) throw Error(ErrorCode::BadIndex, "coupler index out of range");
  auto zeta = [&](double x) {
    auto fl = base;
    fl[coupler] = x;
    return zz_crosstalk(problem.spectrum_at(with_coupler_fluxes(problem.spec, fl)), pair.first, pair.second);
  };
  return bisect_root(zeta, lo, hi, target_khz);
}

/// Minimum of |zeta| over coupler flux in a window: sign change gives a
/// bisected root, otherwise a golden-section minimum of |zeta|.
struct FluxReadjustment {
  double flux = 0.0;
  double zeta_khz = 0.0;
  bool root_found = false;
};

inline FluxReadjustment readjust_flux(const std::function<double(double)>& zeta, double center, double half_width,
                                      int coarse_points = 13, double target_khz = 0.01) {
  std::vector<double> xs(static_cast<std::size_t>(coarse_points)), zs(xs.size());
  for (int i = 0; i < coarse_points; ++i) {
    xs[static_cast<std::size_t>(i)] = center - half_width + 2.0 * half_width * i / (coarse_points - 1);
    zs[static_cast<std::size_t>(i)] = zeta(xs[static_cast<std::size_t>(i)]);
  }
  // sign changes nearest to the center first
  std::vector<std::size_t> brackets;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if ((zs[i] > 0) != (zs[i + 1] > 0)) brackets.push_back(i);
  std::sort(brackets.begin(), brackets.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(xs[a] + xs[a + 1] - 2 * center) < std::abs(xs[b] + xs[b + 1] - 2 * center);
  });
  if (!brackets.empty()) {
    const auto i = brackets.front();
    const double root = bisect_root(zeta, xs[i], xs[i + 1], target_khz);
    return {root, zeta(root), true};
  }
  std::size_t imin = 0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (std::abs(zs[i]) < std::abs(zs[imin])) imin = i;
  double a = xs[imin > 0 ? imin - 1 : 0], b = xs[std::min(imin + 1, xs.size() - 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = std::abs(zeta(c)), fd = std::abs(zeta(d));
  for (int it = 0; it < 40 && b - a > 1e-7; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = std::abs(zeta(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = std::abs(zeta(d));
    }
  }
  FluxReadjustment best{xs[imin], zs[imin], false};
  const double xm = 0.5 * (a + b);
  const double zm = zeta(xm);
  if (std::abs(zm) < std::abs(best.zeta_khz)) best = {xm, zm, false};
  return best;
}

struct RobustnessPoint {
  double delta_ej = 0.0;
  double delta_ec = 0.0;
  double zeta_sweet_khz = 0.0;    // at the nominal coupler flux
  double zeta_readjusted_khz = 0.0;
  double readjusted_flux = 0.0;
  bool root_found = false;
};

/// Scales both junctions of a coupler by (1 + delta_ej) and its on-site
/// charging energy by (1 + delta_ec).
inline HamiltonianModel perturbed_coupler_model(const StaticProblem& problem, const std::string& coupler,
                                                double delta_ej, double delta_ec, double flux) {
  CircuitSpec s = problem.spec;
  auto& c = s.node(coupler);
  c.ej_upper *= 1.0 + delta_ej;
  c.ej_lower *= 1.0 + delta_ej;
  c.external_flux = flux;
  auto ec = circuit_charging_energies(s, problem.quantization.reduction);
  const auto i = static_cast<Eigen::Index>(s.index_of(coupler));
  ec.matrix(i, i) *= 1.0 + delta_ec;
  return assemble_hamiltonian(s, ec, problem.quantization);
}

/// Fabrication-error maps: zeta at the nominal flux and the smallest |zeta|
/// reachable by moving the coupler flux inside `half_width` of it.
inline std::vector<RobustnessPoint> robustness_scan(const StaticProblem& problem, const std::vector<double>& delta_ej,
                                                    const std::vector<double>& delta_ec, double half_width = 0.3,
                                                    int threads = 1, std::pair<std::size_t, std::size_t> pair = {0, 2}) {
  std::string coupler;
  double nominal = 0.0;
  for (const auto& n : problem.spec.nodes)
    if (n.is_coupler()) {
      coupler = n.name;
      nominal = n.external_flux;
      break;
    }
  if (coupler.empty()) throw Error(ErrorCode::InvalidSpec, "robustness scan needs a coupler");
  std::vector<RobustnessPoint> out(delta_ej.size() * delta_ec.size());
  parallel_for(out.size(), threads, [&](std::size_t idx) {
    const double dj = delta_ej[idx / delta_ec.size()], dc = delta_ec[idx % delta_ec.size()];
    auto zeta = [&](double x) {
      const auto m = perturbed_coupler_model(problem, coupler, dj, dc, x);
      SpectrumOptions so;
      so.count = problem.eigen_count < 0 ? default_eigen_count(m) : problem.eigen_count;
      return zz_crosstalk(dressed_spectrum(m, so), pair.first, pair.second);
    };
    RobustnessPoint p;
    p.delta_ej = dj;
    p.delta_ec = dc;
    p.zeta_sweet_khz = zeta(nominal);
    const auto r = readjust_flux(zeta, nominal, half_width);
    p.root_found = r.root_found;
    p.readjusted_flux = r.flux;
    p.zeta_readjusted_khz = r.zeta_khz;
    if (std::abs(p.zeta_sweet_khz) < std::abs(p.zeta_readjusted_khz)) {
      p.zeta_readjusted_khz = p.zeta_sweet_khz;
      p.readjusted_flux = nominal;
    }
    out[idx] = p;
  });
  return out;
}

}  // namespace fluxtrans
