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
#include <numeric>
#include <random>
#include <vector>

#include "fluxtrans/drive_model.hpp"
#include "fluxtrans/error.hpp"
#include "fluxtrans/linalg.hpp"
#include "fluxtrans/parallel.hpp"
#include "fluxtrans/propagation.hpp"
#include "fluxtrans/pulse.hpp"

namespace fluxtrans {

struct Box {
  VectorXd lower, upper;
  Eigen::Index size() const { return lower.size(); }
  bool contains(const VectorXd& x) const {
    return ((x.array() >= lower.array()) && (x.array() <= upper.array())).all();
  }
  void validate() const {
    if (lower.size() != upper.size()) throw Error(ErrorCode::InvalidSpec, "bound vectors differ in length");
    if (!(lower.array() <= upper.array()).all()) throw Error(ErrorCode::InvalidSpec, "empty parameter interval");
  }
};

struct TracePoint {
  VectorXd params;
  double value = 0.0;
  double best = 0.0;  // best value seen so far, including this point
};

struct NelderMeadOptions {
  int budget = 400;
  double initial_step = 0.1;  // simplex edge as a fraction of each interval
  double xtol = 1e-7;         // simplex diameter in unit-cube coordinates
  double ftol = 1e-12;        // absolute spread of simplex values
  int restarts = 1;           // fresh simplices built around the incumbent
};

struct MinimizeResult {
  VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  bool budget_exhausted = false;
  std::vector<TracePoint> trace;
};

namespace detail {

/// Folds a unit-cube coordinate back into [0, 1] by mirror reflection.
inline double reflect_unit(double u) {
  if (!std::isfinite(u)) return 0.5;
  u = std::fmod(std::abs(u), 2.0);
  return u > 1.0 ? 2.0 - u : u;
}

}  // namespace detail

/// Bounded Nelder-Mead. Free coordinates are mapped to the unit cube and
/// trial points leaving it are mirrored back inside; coordinates whose
/// interval is a single point are held fixed.
inline MinimizeResult nelder_mead(const std::function<double(const VectorXd&)>& f, const VectorXd& x0, const Box& box,
                                  const NelderMeadOptions& opt = {}) {
  box.validate();
  if (x0.size() != box.size()) throw Error(ErrorCode::InvalidSpec, "start point and bounds differ in length");
  if (!box.contains(x0)) throw Error(ErrorCode::InvalidSpec, "start point outside bounds");
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < box.size(); ++i)
    if (box.upper(i) > box.lower(i)) free.push_back(i);
  const auto n = static_cast<Eigen::Index>(free.size());

  auto to_x = [&](const VectorXd& u) {
    VectorXd x = x0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto i = free[static_cast<std::size_t>(j)];
      x(i) = box.lower(i) + detail::reflect_unit(u(j)) * (box.upper(i) - box.lower(i));
    }
    return x;
  };
  MinimizeResult res;
  auto eval = [&](const VectorXd& u) {
    const VectorXd x = to_x(u);
    double v = f(x);
    if (!std::isfinite(v)) v = std::numeric_limits<double>::max();
    ++res.evaluations;
    if (v < res.value) {
      res.value = v;
      res.x = x;
    }
    res.trace.push_back({x, v, res.value});
    return v;
  };
  auto exhausted = [&] { return res.evaluations >= opt.budget; };

  VectorXd u0(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto i = free[static_cast<std::size_t>(j)];
    u0(j) = (x0(i) - box.lower(i)) / (box.upper(i) - box.lower(i));
  }
  eval(u0);
  if (n == 0) return res;

  for (int round = 0; round <= opt.restarts && !exhausted(); ++round) {
    VectorXd start(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto i = free[static_cast<std::size_t>(j)];
      start(j) = (res.x(i) - box.lower(i)) / (box.upper(i) - box.lower(i));
    }
    std::vector<VectorXd> simplex{start};
    std::vector<double> values{res.value};
    for (Eigen::Index j = 0; j < n && !exhausted(); ++j) {
      VectorXd v = start;
      // step inward when the incumbent sits near the upper face
      v(j) += (start(j) + opt.initial_step <= 1.0) ? opt.initial_step : -opt.initial_step;
      simplex.push_back(v);
      values.push_back(eval(v));
    }
    if (exhausted()) break;
    std::vector<std::size_t> order(simplex.size());
    while (!exhausted()) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
      const auto best = order.front(), worst = order.back(), second = order[order.size() - 2];
      double diameter = 0.0;
      for (const auto& v : simplex) diameter = std::max(diameter, (v - simplex[best]).cwiseAbs().maxCoeff());
      if (diameter < opt.xtol || values[worst] - values[best] < opt.ftol) break;

      VectorXd centroid = VectorXd::Zero(n);
      for (auto i : order)
        if (i != worst) centroid += simplex[i];
      centroid /= static_cast<double>(n);
      const VectorXd xr = centroid + (centroid - simplex[worst]);
      const double fr = eval(xr);
      if (fr < values[best]) {
        const VectorXd xe = centroid + 2.0 * (centroid - simplex[worst]);
        const double fe = exhausted() ? std::numeric_limits<double>::max() : eval(xe);
        if (fe < fr) {
          simplex[worst] = xe;
          values[worst] = fe;
        } else {
          simplex[worst] = xr;
          values[worst] = fr;
        }
        continue;
      }
      if (fr < values[second]) {
        simplex[worst] = xr;
        values[worst] = fr;
        continue;
      }
      if (exhausted()) break;
      const bool outside = fr < values[worst];
      const VectorXd xc = outside ? VectorXd(centroid + 0.5 * (xr - centroid))
                                  : VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
      const double fc = eval(xc);
      if (fc < std::min(fr, values[worst])) {
        simplex[worst] = xc;
        values[worst] = fc;
        continue;
      }
      for (auto i : order) {
        if (i == best || exhausted()) continue;
        simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
        values[i] = eval(simplex[i]);
      }
    }
  }
  res.budget_exhausted = exhausted();
  return res;
}

/// Runs Nelder-Mead from several starts. Start 0 is x0; further starts are
/// drawn uniformly within `spread` (fraction of each interval) around x0 using
/// a generator seeded with `seed + start`. Starts may run in parallel; each
/// gets the full budget.
inline MinimizeResult multistart(const std::function<double(const VectorXd&)>& f, const VectorXd& x0, const Box& box,
                                 int starts, std::uint64_t seed, double spread, const NelderMeadOptions& opt,
                                 int threads = 1) {
  starts = std::max(1, starts);
  std::vector<VectorXd> origins{x0};
  for (int s = 1; s < starts; ++s) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(s));
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    VectorXd x = x0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double w = box.upper(i) - box.lower(i);
      x(i) = std::clamp(x0(i) + spread * w * uni(rng), box.lower(i), box.upper(i));
    }
    origins.push_back(x);
  }
  std::vector<MinimizeResult> runs(origins.size());
  parallel_for(origins.size(), threads, [&](std::size_t s) { runs[s] = nelder_mead(f, origins[s], box, opt); });
  MinimizeResult out;
  double best = std::numeric_limits<double>::infinity();
  for (auto& r : runs) {
    out.evaluations += r.evaluations;
    out.budget_exhausted = out.budget_exhausted || r.budget_exhausted;
    for (auto& p : r.trace) {
      best = std::min(best, p.value);
      out.trace.push_back({p.params, p.value, best});
    }
    if (r.value < out.value) {
      out.value = r.value;
      out.x = r.x;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pulse optimization

/// Pulse optimization problem on a fixed dressed frame.
struct OptimizationProblem {
  const DressedFrame* frame = nullptr;
  std::vector<std::size_t> qubits;  // gate pair first
  double gate_time = 0.0;
  int tone_count = 1;
  PulseSpec seed;
  Box bounds;  // (frequency, amplitude, ramp) per tone
  int budget = 400;
  int starts = 1;
  std::uint64_t rng_seed = 1;
  double search_rtol = 1e-7;
  double final_rtol = 1e-9;
  PropagationOptions propagation;
  int threads = 1;
};

struct OptimizationResult {
  PulseSpec best_pulse;
  double best_infidelity = 1.0;    // re-evaluated at the final tolerance
  double search_infidelity = 1.0;  // value found at the search tolerance
  double seed_infidelity = 1.0;
  int evaluations = 0;
  bool budget_exhausted = false;
  std::uint64_t rng_seed = 0;
  std::vector<TracePoint> trace;
  ProcessResult process;  // final high-tolerance simulation
};

inline VectorXd pulse_parameters(const PulseSpec& p) {
  VectorXd v(3 * static_cast<Eigen::Index>(p.tones.size()));
  for (std::size_t i = 0; i < p.tones.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(3 * i);
    v(k) = p.tones[i].frequency;
    v(k + 1) = p.tones[i].amplitude;
    v(k + 2) = p.tones[i].ramp;
  }
  return v;
}

inline PulseSpec pulse_from_parameters(const PulseSpec& base, const VectorXd& v) {
  PulseSpec p = base;
  p.tones.resize(static_cast<std::size_t>(v.size() / 3));
  for (std::size_t i = 0; i < p.tones.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(3 * i);
    p.tones[i].frequency = v(k);
    p.tones[i].amplitude = v(k + 1);
    p.tones[i].ramp = v(k + 2);
  }
  return p;
}

/// Default search box: frequency within +-5% of the seed, amplitude in
/// [0, 0.6] rad, ramp in [1, T/2] ns; a second tone's amplitude is capped at
/// a tenth of the first tone's seed amplitude.
inline Box default_bounds(const PulseSpec& seed) {
  const auto n = static_cast<Eigen::Index>(3 * seed.tones.size());
  Box b{VectorXd(n), VectorXd(n)};
  for (std::size_t i = 0; i < seed.tones.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(3 * i);
    const double f = seed.tones[i].frequency;
    b.lower(k) = 0.95 * f;
    b.upper(k) = 1.05 * f;
    b.lower(k + 1) = 0.0;
    b.upper(k + 1) = i == 0 ? 0.6 : 0.1 * seed.tones[0].amplitude;
    b.lower(k + 2) = std::min(1.0, 0.5 * seed.gate_time);
    b.upper(k + 2) = 0.5 * seed.gate_time;
  }
  return b;
}

inline OptimizationProblem make_problem(const DressedFrame& frame, std::vector<std::size_t> qubits, const PulseSpec& seed) {
  seed.validate();
  OptimizationProblem p;
  p.frame = &frame;
  p.qubits = std::move(qubits);
  p.gate_time = seed.gate_time;
  p.tone_count = static_cast<int>(seed.tones.size());
  p.seed = seed;
  p.bounds = default_bounds(seed);
  p.budget = p.tone_count == 1 ? 400 : 1200;
  p.starts = 1;
  return p;
}

/// Closed-system CZ infidelity of a pulse after virtual-Z correction.
inline double objective(const DressedFrame& frame, const std::vector<std::size_t>& qubits, const PulseSpec& pulse,
                        PropagationOptions opt = {}) {
  opt.track_populations = false;
  return simulate_gate(frame, pulse, qubits, opt).infidelity;
}

inline OptimizationResult run_optimization(const OptimizationProblem& p) {
  if (!p.frame) throw Error(ErrorCode::InvalidSpec, "optimization problem has no model");
  if (static_cast<int>(p.seed.tones.size()) != p.tone_count)
    throw Error(ErrorCode::InvalidSpec, "seed tone count does not match the problem");
  p.bounds.validate();
  const VectorXd x0 = pulse_parameters(p.seed);
  if (x0.size() != p.bounds.size() || !p.bounds.contains(x0))
    throw Error(ErrorCode::InvalidSpec, "seed pulse outside the search bounds");
  PropagationOptions search = p.propagation;
  search.rtol = p.search_rtol;
  auto f = [&](const VectorXd& x) {
    try {
      return objective(*p.frame, p.qubits, pulse_from_parameters(p.seed, x), search);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::StepFailure || e.code() == ErrorCode::UnitarityLoss || e.code() == ErrorCode::BadRamp)
        return 1.0;
      throw;
    }
  };
  NelderMeadOptions nm;
  nm.budget = std::max(1, p.budget / std::max(1, p.starts));
  auto r = multistart(f, x0, p.bounds, p.starts, p.rng_seed, 0.25, nm, p.threads);

  OptimizationResult out;
  out.rng_seed = p.rng_seed;
  out.evaluations = r.evaluations;
  out.budget_exhausted = r.budget_exhausted;
  out.trace = std::move(r.trace);
  out.search_infidelity = r.value;
  out.seed_infidelity = out.trace.empty() ? r.value : out.trace.front().value;
  out.best_pulse = pulse_from_parameters(p.seed, r.x);
  PropagationOptions fin = p.propagation;
  fin.rtol = p.final_rtol;
  out.process = simulate_gate(*p.frame, out.best_pulse, p.qubits, fin);
  out.best_infidelity = out.process.infidelity;
  return out;
}

inline OptimizationResult optimize_single_tone(const OptimizationProblem& p) {
  if (p.tone_count != 1) throw Error(ErrorCode::InvalidSpec, "single-tone optimization needs one tone");
  return run_optimization(p);
}

/// Two-tone optimization seeded from a single-tone optimum. The second tone
/// starts at `second_amplitude` (rad) for each frequency in
/// `second_frequencies`. Each frequency seed is one start and receives an
/// equal share of the budget; the best run over all seeds is returned.
inline OptimizationResult optimize_two_tone(OptimizationProblem p, const PulseSpec& single_optimum,
                                            const std::vector<double>& second_frequencies,
                                            double second_amplitude = 1e-3) {
  if (single_optimum.tones.size() != 1) throw Error(ErrorCode::InvalidSpec, "two-tone seed needs a single-tone optimum");
  if (second_frequencies.empty()) throw Error(ErrorCode::InvalidSpec, "no second-tone frequency seeds");
  p.tone_count = 2;
  const int total_budget = p.budget;
  p.budget = std::max(1, total_budget / static_cast<int>(second_frequencies.size()));
  p.starts = 1;
  const Box user_bounds = p.bounds;
  OptimizationResult best;
  best.best_infidelity = std::numeric_limits<double>::infinity();
  std::vector<TracePoint> trace;
  int evaluations = 0;
  bool exhausted = false;
  double seed_value = 0.0;
  for (std::size_t s = 0; s < second_frequencies.size(); ++s) {
    p.seed = single_optimum;
    ToneSpec second{0.0, second_frequencies[s], single_optimum.tones[0].ramp, 0.0};
    p.seed.tones.push_back(second);
    Box b = default_bounds(p.seed);
    // first tone keeps its window around the original seed when provided
    if (user_bounds.size() >= 3) {
      b.lower.head(3) = user_bounds.lower.head(3);
      b.upper.head(3) = user_bounds.upper.head(3);
    }
    if (user_bounds.size() == 6) {
      b.lower(4) = user_bounds.lower(4);
      b.upper(4) = user_bounds.upper(4);
    }
    p.seed.tones[1].amplitude = std::clamp(second_amplitude, b.lower(4), b.upper(4));
    p.bounds = b;
    p.rng_seed += s;
    auto r = run_optimization(p);
    evaluations += r.evaluations;
    exhausted = exhausted || r.budget_exhausted;
    if (s == 0) seed_value = r.seed_infidelity;
    for (auto& t : r.trace) trace.push_back(t);
    if (r.best_infidelity < best.best_infidelity) best = std::move(r);
  }
  double running = std::numeric_limits<double>::infinity();
  for (auto& t : trace) t.best = running = std::min(running, t.value);
  best.trace = std::move(trace);
  best.evaluations = evaluations;
  best.budget_exhausted = exhausted;
  best.seed_infidelity = seed_value;
  return best;
}

// ---------------------------------------------------------------------------
// Seeding from the three-level theory

/// Everything needed to drive the CZ pair of a chain.
struct GateSetup {
  GateSites sites;
  std::size_t coupler_index = 0;     // index into HamiltonianModel::couplers
  std::vector<std::size_t> qubits;   // gate pair in chain order, then spectators
  ThreeLevelModel three_level;
  double ej_sum = 0.0;
  double ej_diff = 0.0;
};

inline GateSetup gate_setup(const HamiltonianModel& model, const DressedSpectrum& s) {
  GateSetup g;
  g.sites = default_gate_sites(model.spec);
  bool found = false;
  for (std::size_t k = 0; k < model.couplers.size(); ++k)
    if (model.couplers[k].node_index == g.sites.coupler) {
      g.coupler_index = k;
      found = true;
    }
  if (!found) throw Error(ErrorCode::InvalidSpec, "gate coupler has no drive operator");
  g.qubits = {std::min(g.sites.fluxonium, g.sites.transmon), std::max(g.sites.fluxonium, g.sites.transmon)};
  for (auto q : qubit_nodes(model.spec))
    if (q != g.sites.fluxonium && q != g.sites.transmon) g.qubits.push_back(q);
  g.three_level = numerical_A_matrix(model, s, g.sites, g.coupler_index);
  const auto& c = model.spec.nodes[g.sites.coupler];
  g.ej_sum = c.ej_sum();
  g.ej_diff = c.ej_diff();
  return g;
}

/// Single-tone seed: amplitude from the first-order gate time at
/// `gate_time`, frequency from the first-order resonance condition.
inline PulseSpec analytic_seed(const GateSetup& g, double gate_time, double ramp, double dc_offset) {
  const double phi = amplitude_for_gate_time(g.three_level, g.ej_sum, g.ej_diff, gate_time);
  const auto dc = jacobi_anger_coefficients(g.ej_sum, g.ej_diff, phi);
  PulseSpec p;
  p.dc_offset = dc_offset;
  p.gate_time = gate_time;
  p.tones.push_back({phi, analytic_drive_frequency(g.three_level, dc), std::min(ramp, 0.5 * gate_time), 0.0});
  return p;
}

/// Second-tone frequency seeds: half the |101>-|110> and |110>-|200> gaps,
/// and the first tone's own frequency.
inline std::vector<double> second_tone_frequencies(const GateSetup& g, double first_frequency) {
  const auto& e = g.three_level.energies;
  return {0.5 * std::abs(e(1) - e(0)), 0.5 * std::abs(e(2) - e(1)), first_frequency};
}

}  // namespace fluxtrans
