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

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "fluxtrans/error.hpp"
#include "fluxtrans/linalg.hpp"
#include "fluxtrans/pulse.hpp"
#include "fluxtrans/quantization.hpp"
#include "fluxtrans/spectrum.hpp"
#include "fluxtrans/units.hpp"

namespace fluxtrans {

/// How a flux excursion enters the coupler potential.
enum class DriveForm {
  /// -(E_eff(x) - E_eff(x0)) cos(phi_c): the junction pair acts as one
  /// junction of energy E_eff(x) whose well stays at phi_c = 0.
  EffectiveJunction,
  /// -Re[(W(x) - W(x0)) e^{i phi_c}] with the gauge-weighted junction sum W;
  /// includes the flux-dependent displacement of the potential well.
  Irrotational,
};

struct PropagationOptions {
  double rtol = 1e-9;
  DriveForm drive = DriveForm::EffectiveJunction;
  std::size_t coupler = 0;      // driven coupler
  int max_states = 0;           // dressed states kept, 0 = all
  double energy_cutoff = 0.0;   // GHz above the ground state, 0 = no cutoff
  bool track_populations = true;
  long max_steps = 20000000;
  std::vector<double> sample_times;  // optional population snapshots (ns)
};

/// Static dressed basis and drive operators, shared by all propagations of a model.
struct DressedFrame {
  VectorXd energies;  // relative to the ground state, GHz
  DressedSpectrum spectrum;
  MatrixXd cos_d;     // cos(phi_c) in the dressed basis
  MatrixXd sin_d;
  CouplerDrive coupler;
  Eigen::Index dimension() const { return energies.size(); }
};

inline DressedFrame make_frame(const HamiltonianModel& model, const PropagationOptions& opt = {}) {
  if (opt.coupler >= model.couplers.size()) throw Error(ErrorCode::BadIndex, "driven coupler index out of range");
  int count = opt.max_states > 0 && opt.max_states < model.dimension() ? opt.max_states : 0;
  auto eig = symmetric_eigen(model.static_hamiltonian, count);
  Eigen::Index keep = eig.values.size();
  if (opt.energy_cutoff > 0.0) {
    keep = 0;
    while (keep < eig.values.size() && eig.values(keep) - eig.values(0) <= opt.energy_cutoff) ++keep;
    if (keep < 2) throw Error(ErrorCode::InvalidTruncation, "energy cutoff keeps fewer than two states");
    eig.values.conservativeResize(keep);
    eig.vectors.conservativeResize(Eigen::NoChange, keep);
  }
  DressedFrame f;
  f.spectrum = label_spectrum(eig, model.node_dims);
  const MatrixXd& v = f.spectrum.eigenvectors;  // sign-fixed
  f.energies = eig.values.array() - eig.values(0);
  f.coupler = model.couplers[opt.coupler];
  f.cos_d = v.transpose() * (f.coupler.cos_phi * v);
  f.sin_d = v.transpose() * (f.coupler.sin_phi * v);
  f.cos_d = 0.5 * (f.cos_d + f.cos_d.transpose()).eval();
  f.sin_d = 0.5 * (f.sin_d + f.sin_d.transpose()).eval();
  return f;
}

/// Coefficients (c, s) of the drive term c * cos(phi_c) + s * sin(phi_c) at flux x.
inline std::pair<double, double> drive_coefficients(const CouplerDrive& cd, DriveForm form, double x) {
  if (form == DriveForm::EffectiveJunction) {
    return {-(cd.squid.effective_ej(x) - cd.squid.effective_ej(cd.reference_flux)), 0.0};
  }
  const Complex w = cd.rotated_sum(x) - cd.rotated_sum(cd.reference_flux);
  return {-w.real(), w.imag()};
}

/// Interaction-picture state after a propagation.
struct Trajectory {
  std::vector<Eigen::Index> inputs;  // dressed indices of the initial states
  MatrixXcd amplitudes;              // M x k, interaction picture at the final time
  MatrixXd average_populations;      // M x k, time averages over the gate
  std::vector<MatrixXd> samples;     // populations at the requested sample times
  long steps = 0;
  long rejected = 0;
};

namespace detail {

using ode_vector = std::vector<std::complex<double>>;

struct InteractionRhs {
  const DressedFrame* frame;
  const PulseSpec* pulse;
  DriveForm form;
  Eigen::Index m, k;
  bool populations;
  mutable MatrixXd stacked, product;
  mutable VectorXd cph, sph;

  void operator()(const ode_vector& x, ode_vector& dx, double t) const {
    const auto [c, s] = drive_coefficients(frame->coupler, form, flux_waveform(*pulse, t));
    const std::complex<double>* xp = x.data();
    std::complex<double>* dp = dx.data();
    cph = (units::two_pi * t * frame->energies).array().cos();
    sph = (units::two_pi * t * frame->energies).array().sin();
    // z = exp(-i 2 pi E t) y, stored as [Re z | Im z]
    stacked.resize(m, 2 * k);
    for (Eigen::Index col = 0; col < k; ++col)
      for (Eigen::Index r = 0; r < m; ++r) {
        const auto y = xp[col * m + r];
        stacked(r, col) = cph(r) * y.real() + sph(r) * y.imag();
        stacked(r, k + col) = cph(r) * y.imag() - sph(r) * y.real();
      }
    product.noalias() = c * (frame->cos_d * stacked);
    if (s != 0.0) product.noalias() += s * (frame->sin_d * stacked);
    // dy = -i 2 pi exp(i 2 pi E t) w
    for (Eigen::Index col = 0; col < k; ++col)
      for (Eigen::Index r = 0; r < m; ++r) {
        const double wr = product(r, col), wi = product(r, k + col);
        const double er = cph(r) * wr - sph(r) * wi;
        const double ei = cph(r) * wi + sph(r) * wr;
        dp[col * m + r] = std::complex<double>(units::two_pi * ei, -units::two_pi * er);
      }
    if (populations) {
      const Eigen::Index off = m * k;
      for (Eigen::Index i = 0; i < m * k; ++i) dp[off + i] = std::norm(xp[i]);
    }
  }
};

}  // namespace detail

/// Propagates the given dressed input states under the pulse. The equations
/// are solved in the interaction picture of the static dressed Hamiltonian
/// with an embedded Runge-Kutta-Fehlberg 7(8) pair and step rejection.
inline Trajectory propagate_states(const DressedFrame& frame, const PulseSpec& pulse,
                                   const std::vector<Eigen::Index>& inputs, const PropagationOptions& opt = {}) {
  using namespace boost::numeric::odeint;
  pulse.validate();
  const Eigen::Index m = frame.dimension(), k = static_cast<Eigen::Index>(inputs.size());
  for (auto i : inputs)
    if (i < 0 || i >= m) throw Error(ErrorCode::BadIndex, "input state index outside the dressed basis");
  const bool pops = opt.track_populations;
  detail::InteractionRhs rhs{&frame, &pulse, opt.drive, m, k, pops, {}, {}, {}, {}};
  detail::ode_vector x(static_cast<std::size_t>(m * k * (pops ? 2 : 1)), 0.0);
  for (Eigen::Index c = 0; c < k; ++c) x[static_cast<std::size_t>(c * m + inputs[static_cast<std::size_t>(c)])] = 1.0;

  Trajectory out;
  out.inputs = inputs;
  auto stepper = make_controlled(opt.rtol * 1e-2, opt.rtol, runge_kutta_fehlberg78<detail::ode_vector>());
  double t = 0.0, dt = 1e-3;
  std::vector<double> stops = opt.sample_times;
  std::sort(stops.begin(), stops.end());
  stops.push_back(pulse.gate_time);
  for (double stop : stops) {
    stop = std::min(stop, pulse.gate_time);
    while (t < stop - 1e-13) {
      double h = std::min(dt, stop - t);
      const double h_try = h;
      const auto res = stepper.try_step(rhs, x, t, h);
      if (res == success) {
        ++out.steps;
        // keep the proposed step unless it was clipped at a stop
        dt = (h_try < dt) ? std::max(dt, h) : h;
      } else {
        ++out.rejected;
        dt = h;
        if (dt < 1e-12) throw Error(ErrorCode::StepFailure, "integrator step size underflow");
      }
      if (out.steps + out.rejected > opt.max_steps) throw Error(ErrorCode::StepFailure, "integrator step budget exceeded");
    }
    if (!opt.sample_times.empty() && stop < pulse.gate_time + 1e-13) {
      MatrixXd snap(m, k);
      for (Eigen::Index c = 0; c < k; ++c)
        for (Eigen::Index r = 0; r < m; ++r) snap(r, c) = std::norm(x[static_cast<std::size_t>(c * m + r)]);
      out.samples.push_back(std::move(snap));
    }
  }
  if (!opt.sample_times.empty()) out.samples.pop_back();  // the final stop is not a requested sample
  out.amplitudes.resize(m, k);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index r = 0; r < m; ++r) out.amplitudes(r, c) = x[static_cast<std::size_t>(c * m + r)];
  if (pops) {
    out.average_populations.resize(m, k);
    for (Eigen::Index c = 0; c < k; ++c)
      for (Eigen::Index r = 0; r < m; ++r)
        out.average_populations(r, c) = x[static_cast<std::size_t>(m * k + c * m + r)].real() / pulse.gate_time;
  }
  const MatrixXcd gram = out.amplitudes.adjoint() * out.amplitudes - MatrixXcd::Identity(k, k);
  if (gram.cwiseAbs().maxCoeff() > std::max(1e-6, 1e3 * opt.rtol)) throw Error(ErrorCode::UnitarityLoss, "propagated states lost orthonormality");
  return out;
}

/// Full propagator U(T) in the lab frame, expressed in the dressed basis.
inline MatrixXcd propagate(const DressedFrame& frame, const PulseSpec& pulse, PropagationOptions opt = {}) {
  opt.track_populations = false;
  std::vector<Eigen::Index> all(static_cast<std::size_t>(frame.dimension()));
  for (Eigen::Index i = 0; i < frame.dimension(); ++i) all[static_cast<std::size_t>(i)] = i;
  auto tr = propagate_states(frame, pulse, all, opt);
  const VectorXcd phase = (Complex(0.0, -units::two_pi * pulse.gate_time) * frame.energies.cast<Complex>()).array().exp();
  const MatrixXcd u = phase.asDiagonal() * tr.amplitudes;
  if (unitarity_defect(u) > std::max(1e-6, 1e3 * opt.rtol)) throw Error(ErrorCode::UnitarityLoss, "propagator is not unitary");
  return u;
}

/// Controlled-Z on n qubits acting on the first two (diag with -1 on |11...>).
inline MatrixXcd cz_target(int qubits = 2) {
  const Eigen::Index dim = Eigen::Index{1} << qubits;
  MatrixXcd t = MatrixXcd::Identity(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const bool q1 = (b >> (qubits - 1)) & 1, q2 = (b >> (qubits - 2)) & 1;
    if (q1 && q2) t(b, b) = -1.0;
  }
  return t;
}

/// epsilon = 1 - |Tr(U^dagger U_target)| / d.
inline double gate_infidelity(const MatrixXcd& u, const MatrixXcd& target) {
  if (u.rows() != target.rows() || u.cols() != target.cols())
    throw Error(ErrorCode::InvalidSpec, "process and target dimensions differ");
  return 1.0 - std::abs((u.adjoint() * target).trace()) / static_cast<double>(u.rows());
}

/// Single-qubit Z corrections: the phase of |0...0> is removed and each
/// qubit's angle is read off the diagonal element with only that qubit excited.
struct VirtualZ {
  MatrixXcd corrected;
  std::vector<double> angles;  // per qubit, rad
};

inline VirtualZ apply_virtual_z(const MatrixXcd& p) {
  const Eigen::Index dim = p.rows();
  int nq = 0;
  while ((Eigen::Index{1} << nq) < dim) ++nq;
  if ((Eigen::Index{1} << nq) != dim) throw Error(ErrorCode::InvalidSpec, "process matrix is not a qubit operator");
  VirtualZ v;
  const double g = std::arg(p(0, 0));
  for (int q = 0; q < nq; ++q) {
    const Eigen::Index b = Eigen::Index{1} << (nq - 1 - q);
    v.angles.push_back(std::arg(p(b, b)) - g);
  }
  VectorXcd corr(dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    double ph = g;
    for (int q = 0; q < nq; ++q)
      if ((b >> (nq - 1 - q)) & 1) ph += v.angles[static_cast<std::size_t>(q)];
    corr(b) = std::exp(Complex(0.0, -ph));
  }
  v.corrected = corr.asDiagonal() * p;
  return v;
}

struct ProcessResult {
  std::optional<MatrixXcd> full_unitary;
  MatrixXcd process_matrix;  // after frame removal and virtual-Z correction
  MatrixXcd raw_process;     // after frame removal only
  double infidelity = 0.0;
  std::vector<Label> computational;                  // input labels, binary order
  std::vector<std::map<Label, double>> leakage_by_input;
  std::map<Label, double> leakage;                   // averaged over inputs
  std::vector<std::map<Label, double>> avg_population;  // per input
  std::vector<double> phase_corrections;
  Trajectory trajectory;
};

/// Computational block of the interaction-picture propagator (frame removed).
inline MatrixXcd process_matrix(const Trajectory& tr, const DressedSpectrum& s, const std::vector<Label>& comp) {
  const auto k = static_cast<Eigen::Index>(comp.size());
  MatrixXcd p(k, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto in = s.index(comp[static_cast<std::size_t>(c)]);
    auto it = std::find(tr.inputs.begin(), tr.inputs.end(), in);
    if (it == tr.inputs.end()) throw Error(ErrorCode::MissingLabel, "input state was not propagated");
    const auto col = it - tr.inputs.begin();
    for (Eigen::Index r = 0; r < k; ++r) p(r, c) = tr.amplitudes(s.index(comp[static_cast<std::size_t>(r)]), col);
  }
  return p;
}

/// Computational block of a lab-frame propagator in the dressed basis, with
/// free evolution at each computational energy removed.
inline MatrixXcd process_matrix(const MatrixXcd& u, const DressedFrame& f, const std::vector<Label>& comp,
                                double gate_time) {
  const auto k = static_cast<Eigen::Index>(comp.size());
  MatrixXcd p(k, k);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index r = 0; r < k; ++r) {
      const auto ir = f.spectrum.index(comp[static_cast<std::size_t>(r)]);
      const auto ic = f.spectrum.index(comp[static_cast<std::size_t>(c)]);
      p(r, c) = std::exp(Complex(0.0, units::two_pi * f.energies(ir) * gate_time)) * u(ir, ic);
    }
  return p;
}

/// Final populations outside the computational subspace, per input.
inline std::vector<std::map<Label, double>> leakage_populations(const Trajectory& tr, const DressedSpectrum& s,
                                                                const std::vector<Label>& comp,
                                                                double floor = 0.0) {
  std::vector<bool> is_comp(static_cast<std::size_t>(tr.amplitudes.rows()), false);
  for (const auto& l : comp) is_comp[static_cast<std::size_t>(s.index(l))] = true;
  std::map<Eigen::Index, Label> label_of;
  for (const auto& [l, c] : s.column) label_of[c] = l;
  std::vector<std::map<Label, double>> out(tr.inputs.size());
  for (std::size_t c = 0; c < tr.inputs.size(); ++c)
    for (Eigen::Index r = 0; r < tr.amplitudes.rows(); ++r) {
      if (is_comp[static_cast<std::size_t>(r)]) continue;
      const double p = std::norm(tr.amplitudes(r, static_cast<Eigen::Index>(c)));
      if (p > floor) out[c][label_of.at(r)] = p;
    }
  return out;
}

/// Total decay rate (kHz) of a product state: sum over excited nodes of the
/// rate listed for that node's level with every other node in the ground state.
inline std::optional<double> state_decay_rate(const Label& l, const std::map<Label, double>& rates) {
  double total = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (l[i] == 0) continue;
    Label single(l.size(), 0);
    single[i] = l[i];
    auto it = rates.find(single);
    if (it == rates.end()) return std::nullopt;
    total += it->second;
  }
  return total;
}

/// Exposure-time estimate sum_s Gamma_s * pbar_s * t_gate for one input.
/// States whose rate cannot be composed raise MissingRate when their average
/// population exceeds `population_floor`.
inline double decoherence_error(const std::map<Label, double>& avg_population, const std::map<Label, double>& rates_khz,
                                double gate_time_ns, double population_floor = 1e-4) {
  double eps = 0.0;
  for (const auto& [l, p] : avg_population) {
    const auto g = state_decay_rate(l, rates_khz);
    if (!g) {
      if (p > population_floor) throw Error(ErrorCode::MissingRate, "no decay rate for populated state |" + label_string(l) + ">");
      continue;
    }
    eps += *g * 1e3 * p * gate_time_ns * 1e-9;
  }
  return eps;
}

/// Average of the single-input estimates over all computational inputs.
inline double decoherence_error(const std::vector<std::map<Label, double>>& avg_population,
                                const std::map<Label, double>& rates_khz, double gate_time_ns,
                                double population_floor = 1e-4) {
  if (avg_population.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& m : avg_population) acc += decoherence_error(m, rates_khz, gate_time_ns, population_floor);
  return acc / static_cast<double>(avg_population.size());
}

/// Partial trace over the last qubit of an 8x8 process, normalized by 1/2.
/// Declared here for the three-qubit gate path; gate_metrics.hpp exposes the
/// general form.
inline MatrixXcd trace_out_last_qubit(const MatrixXcd& u8) {
  MatrixXcd r = MatrixXcd::Zero(4, 4);
  for (Eigen::Index a = 0; a < 4; ++a)
    for (Eigen::Index b = 0; b < 4; ++b) r(a, b) = 0.5 * (u8(2 * a, 2 * b) + u8(2 * a + 1, 2 * b + 1));
  return r;
}

/// Full gate simulation: propagate computational inputs, extract the process,
/// correct single-qubit phases and score against CZ on the first two qubits.
/// `qubits` lists the qubit nodes with the gate pair first.
inline ProcessResult simulate_gate(const DressedFrame& frame, const PulseSpec& pulse, const std::vector<std::size_t>& qubits,
                                   const PropagationOptions& opt = {}) {
  ProcessResult res;
  const std::size_t nodes = frame.spectrum.node_dims.size();
  res.computational = computational_labels(nodes, qubits);
  std::vector<Eigen::Index> inputs;
  for (const auto& l : res.computational) inputs.push_back(frame.spectrum.index(l));
  res.trajectory = propagate_states(frame, pulse, inputs, opt);
  res.raw_process = process_matrix(res.trajectory, frame.spectrum, res.computational);
  auto vz = apply_virtual_z(res.raw_process);
  res.process_matrix = vz.corrected;
  res.phase_corrections = vz.angles;
  if (qubits.size() == 2) {
    res.infidelity = gate_infidelity(res.process_matrix, cz_target(2));
  } else if (qubits.size() == 3) {
    res.infidelity = gate_infidelity(trace_out_last_qubit(res.process_matrix), cz_target(2));
  } else {
    throw Error(ErrorCode::InvalidSpec, "gate simulation supports two or three qubits");
  }
  res.leakage_by_input = leakage_populations(res.trajectory, frame.spectrum, res.computational, 1e-12);
  for (const auto& m : res.leakage_by_input)
    for (const auto& [l, p] : m) res.leakage[l] += p / static_cast<double>(res.leakage_by_input.size());
  if (opt.track_populations) {
    std::map<Eigen::Index, Label> label_of;
    for (const auto& [l, c] : frame.spectrum.column) label_of[c] = l;
    for (std::size_t c = 0; c < inputs.size(); ++c) {
      std::map<Label, double> avg;
      for (Eigen::Index r = 0; r < frame.dimension(); ++r) {
        const double p = res.trajectory.average_populations(r, static_cast<Eigen::Index>(c));
        if (p > 1e-12) avg[label_of.at(r)] = p;
      }
      res.avg_population.push_back(std::move(avg));
    }
  }
  return res;
}

}  // namespace fluxtrans
