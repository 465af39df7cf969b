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


// Acceptance checks. Usage: fluxtrans_acceptance [criterion ...]; with no
// arguments every criterion runs. Each criterion prints one PASS or FAIL line.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "fluxtrans/blas_guard.hpp"
#include "fluxtrans/fluxtrans.hpp"

using namespace fluxtrans;

namespace {

const std::filesystem::path kConfigs = std::filesystem::path(FLUXTRANS_SOURCE_DIR) / "configs";

struct Outcome {
  bool pass = false;
  std::string detail;
};

CircuitSpec circuit_file(const std::string& name) { return parse_circuit(read_json(kConfigs / "circuits" / name)); }

std::string fmt(double v) { return format_number(v); }

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

/// Model, spectrum and drive frame of a chain prepared for CZ pulses.
struct GateBench {
  HamiltonianModel model;
  DressedSpectrum spectrum;
  GateSetup setup;
  PropagationOptions propagation;
  DressedFrame frame;
};

GateBench gate_bench(const CircuitSpec& spec, double energy_cutoff) {
  GateBench b;
  b.model = build_model(spec);
  SpectrumOptions so;
  so.count = default_eigen_count(b.model);
  b.spectrum = dressed_spectrum(b.model, so);
  b.setup = gate_setup(b.model, b.spectrum);
  b.propagation.coupler = b.setup.coupler_index;
  b.propagation.energy_cutoff = energy_cutoff;
  b.frame = make_frame(b.model, b.propagation);
  return b;
}

/// Single-tone search from the analytic seed: 400 evaluations at rtol 1e-7,
/// best pulse re-simulated at rtol 1e-9.
OptimizationResult single_tone(const GateBench& b, double gate_time) {
  const double dc = b.model.spec.nodes[b.setup.sites.coupler].external_flux;
  auto p = make_problem(b.frame, b.setup.qubits, analytic_seed(b.setup, gate_time, 2.0, dc));
  p.propagation = b.propagation;
  p.budget = 400;
  p.search_rtol = 1e-7;
  p.final_rtol = 1e-9;
  p.rng_seed = 1;
  return optimize_single_tone(p);
}

/// Two-tone refinement of a single-tone optimum: 1200 evaluations shared
/// over the second-tone frequency seeds.
OptimizationResult two_tone(const GateBench& b, const OptimizationResult& single) {
  const double dc = b.model.spec.nodes[b.setup.sites.coupler].external_flux;
  const auto seed = analytic_seed(b.setup, single.best_pulse.gate_time, 2.0, dc);
  auto p = make_problem(b.frame, b.setup.qubits, seed);
  p.propagation = b.propagation;
  p.budget = 1200;
  p.search_rtol = 1e-7;
  p.final_rtol = 1e-9;
  p.rng_seed = 1;
  const auto& best = single.best_pulse;
  return optimize_two_tone(p, best, second_tone_frequencies(b.setup, best.tones[0].frequency));
}

/// Measured single-node rates. Higher coupler and transmon levels are not
/// measured; they use the oscillator scaling Gamma_n = n Gamma_1.
std::map<Label, double> cell_rates() {
  json r{{"100", 4}, {"200", 22}};
  for (int n = 1; n <= 4; ++n) {
    r["0" + std::to_string(n) + "0"] = 40 * n;
    r["00" + std::to_string(n)] = 25 * n;
  }
  return parse_rates(r, 3);
}

Outcome criterion1() {
  const auto spec = circuit_file("ft_cell.json");
  const auto ec = circuit_charging_energies(spec);
  const auto s = dressed_spectrum(build_model(spec));
  const double e0 = s.energy({0, 0, 0});
  const double ec_t = ec(2, 2);
  const double f01_f = s.energy({1, 0, 0}) - e0;
  const double anh_f = (s.energy({2, 0, 0}) - s.energy({1, 0, 0})) - f01_f;
  const double f01_t = s.energy({0, 0, 1}) - e0;
  const bool ok = within(ec_t, 0.194, 0.05) && within(f01_f, 0.300, 0.10) && within(anh_f, 3.7, 0.10) &&
                  within(f01_t, 4.4, 0.05);
  return {ok, "EC_transmon=" + fmt(ec_t) + " GHz (0.194 +-5%), fluxonium f01=" + fmt(f01_f) +
                  " GHz (0.300 +-10%), fluxonium anharmonicity=" + fmt(anh_f) + " GHz (3.7 +-10%), transmon f01=" +
                  fmt(f01_t) + " GHz (4.4 +-5%)"};
}

Outcome criterion2() {
  const auto spec = circuit_file("ft_cell.json");
  const auto s = dressed_spectrum(build_model(spec));
  const double zeta = zz_crosstalk(s, 0, 2);
  double worst = 0.0;
  std::string worst_label;
  for (const auto& [l, e] : delocalization(s, {0, 2}))
    if (e >= worst) {
      worst = e;
      worst_label = label_string(l);
    }
  const bool ok = std::abs(zeta) < 1.0 && worst < 0.01;
  return {ok, "|zeta|=" + fmt(std::abs(zeta)) + " kHz (< 1 kHz), max delocalization=" + fmt(worst) + " at |" +
                  worst_label + "> (< 0.01)"};
}

Outcome criterion3() {
  StaticProblem p{circuit_file("ft_cell.json"), {}, -1};
  const std::vector<double> grid{-0.03, -0.015, 0.0, 0.015, 0.03};
  const auto pts = robustness_scan(p, grid, grid, 0.3, 1, {0, 2});
  double worst = 0.0;
  int not_better = 0;
  for (const auto& r : pts) {
    worst = std::max(worst, std::abs(r.zeta_readjusted_khz));
    if (std::abs(r.zeta_readjusted_khz) > std::abs(r.zeta_sweet_khz)) ++not_better;
  }
  const bool ok = worst < 0.1 && not_better == 0;
  return {ok, "max over 5x5 grid of min|zeta|=" + fmt(worst) + " kHz (< 0.1 kHz), points where readjusted exceeds sweet spot=" +
                  std::to_string(not_better) + " (0)"};
}

Outcome criterion4() {
  const auto spec = circuit_file("ft_cell.json");
  const auto model = build_model(spec);
  const auto setup = gate_setup(model, dressed_spectrum(model));
  const auto& m = setup.three_level;
  const double phi = amplitude_for_gate_time(m, setup.ej_sum, setup.ej_diff, 200.0);
  const auto dc = jacobi_anger_coefficients(setup.ej_sum, setup.ej_diff, phi);
  const auto e1 = effective_gate(m, dc, 1);
  const auto e2 = effective_gate(m, dc, 2);
  const double wopt = optimize_three_level_frequency(m, dc, 0.99 * e1.omega_d, 1.01 * e1.omega_d, 0.75 * e1.t_gate);
  const double topt = 2.0 * peak_transfer(m, dc, wopt, 0.75 * e1.t_gate).time;
  const double dw1 = std::abs(e1.omega_d - wopt) / wopt, dw2 = std::abs(e2.omega_d - wopt) / wopt;
  const double dt1 = std::abs(e1.t_gate - topt) / topt, dt2 = std::abs(e2.t_gate - topt) / topt;
  const bool ok = dw1 <= 0.005 && dw2 < dw1 && dt1 <= 0.25 && dt2 <= 0.10;
  return {ok, "phi_AC=" + fmt(phi) + " rad, omega deviation first/second order=" + fmt(dw1) + "/" + fmt(dw2) +
                  " (<= 0.005, second < first), t_gate deviation first/second order=" + fmt(dt1) + "/" + fmt(dt2) +
                  " (<= 0.25 / <= 0.10), numerical full oscillation=" + fmt(topt) + " ns"};
}

Outcome criterion5() {
  const auto b = gate_bench(circuit_file("ft_cell.json"), 0.0);
  const auto r = single_tone(b, 40.0);
  const auto& t = r.best_pulse.tones[0];
  return {r.best_infidelity < 1e-3, "40 ns single-tone infidelity=" + fmt(r.best_infidelity) + " (< 1e-3), states=" +
                                        std::to_string(b.frame.dimension()) + ", evaluations=" +
                                        std::to_string(r.evaluations) + ", f=" + fmt(t.frequency) +
                                        " GHz, a=" + fmt(t.amplitude) + " rad, ramp=" + fmt(t.ramp) + " ns"};
}

Outcome criterion6() {
  const auto b = gate_bench(circuit_file("ft_cell.json"), 0.0);
  const auto one = single_tone(b, 30.0);
  const auto two = two_tone(b, one);
  const double ratio = one.best_infidelity / two.best_infidelity;
  return {ratio >= 100.0, "30 ns single-tone=" + fmt(one.best_infidelity) + ", two-tone=" + fmt(two.best_infidelity) +
                              ", ratio=" + fmt(ratio) + " (>= 100)"};
}

Outcome criterion7() {
  const auto b = gate_bench(circuit_file("ft_cell.json"), 0.0);
  const auto one = single_tone(b, 40.0);
  const auto two = two_tone(b, one);
  const auto rates = cell_rates();
  const double eps = decoherence_error(two.process.avg_population, rates, 40.0);
  const bool ok = eps >= 1e-4 && eps <= 1e-3 && eps > two.best_infidelity;
  return {ok, "40 ns decoherence estimate=" + fmt(eps) + " (in [1e-4, 1e-3]), two-tone closed-system infidelity=" +
                  fmt(two.best_infidelity) + " (below the estimate)"};
}

Outcome criterion8() {
  const auto spec = circuit_file("ftf_chain.json");
  auto chain = gate_bench(spec, 15.0);
  const auto q = qubit_nodes(spec);
  const double z13 = zz_crosstalk(chain.spectrum, q[0], q[2]) * 1e3;
  const double zzz = zzz_interaction(chain.spectrum, q[0], q[1], q[2]);
  const auto spect = single_tone(chain, 40.0);
  const auto iso = single_tone(gate_bench(circuit_file("ft_cell.json"), 15.0), 40.0);
  const bool ok = std::abs(z13) < 1.0 && std::abs(zzz) < 1.0 && spect.best_infidelity <= 10.0 * iso.best_infidelity;
  return {ok, "|zeta_13|=" + fmt(std::abs(z13)) + " Hz (< 1 Hz), |zeta_ZZZ|=" + fmt(std::abs(zzz)) +
                  " Hz (< 1 Hz), 40 ns infidelity with spectator=" + fmt(spect.best_infidelity) + " vs isolated=" +
                  fmt(iso.best_infidelity) + " (within 10x), chain states=" + std::to_string(chain.frame.dimension())};
}

Outcome criterion9() {
  const std::string cmd = std::string("\"") + FLUXTRANS_TEST_BINARY + "\" \"[property]\" --reporter compact";
  const int rc = std::system(cmd.c_str());
  return {rc == 0, "property suites (unitarity, Pauli weight sum, charging inversion, commutator, phase-grid oracle, "
                   "uncoupled ZZ and delocalization, infidelity reference cases, drive coefficient parity): exit code " +
                       std::to_string(rc)};
}

struct Criterion {
  Outcome (*run)();
  double seconds;  // runtime budget
};

const Criterion kCriteria[] = {{criterion1, 60},   {criterion2, 60},    {criterion3, 1800},
                               {criterion4, 300},  {criterion5, 7200},  {criterion6, 21600},
                               {criterion7, 7200}, {criterion8, 28800}, {criterion9, 300}};

}  // namespace

int main(int argc, char** argv) {
  fluxtrans::ensure_reliable_blas_kernel(argv);
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (int k = 1; k <= 9; ++k) which.push_back(k);
  int failures = 0;
  for (int k : which) {
    if (k < 1 || k > 9) {
      std::cerr << "unknown criterion " << k << "\n";
      return 2;
    }
    const auto& c = kCriteria[k - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.seconds;
    const bool pass = o.pass && in_time;
    std::ostringstream line;
    line << "criterion " << k << ": " << (pass ? "PASS" : "FAIL") << ": " << o.detail << "; runtime " << fmt(secs)
         << " s (budget " << fmt(c.seconds) << " s)";
    std::cout << line.str() << std::endl;
    if (!pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
