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

// Command-line front end: binds JSON run configurations to the library and
// writes delimiter-separated data files with a metadata header.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fluxtrans/blas_guard.hpp"
#include "fluxtrans/fluxtrans.hpp"

namespace fs = std::filesystem;
using namespace fluxtrans;

namespace {

struct GlobalOptions {
  std::string config;
  std::string out = "out";
  int threads = 1;
  std::optional<std::uint64_t> seed;
  std::string levels;
};

/// Parses "--levels 4" or "--levels q1=5,c_a=3".
void apply_levels(const std::string& s, QuantizationOptions& q) {
  if (s.empty()) return;
  if (s.find('=') == std::string::npos) {
    q.default_levels = std::stoi(s);
    return;
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::Config, "--levels entries look like name=count");
    q.levels[item.substr(0, eq)] = std::stoi(item.substr(eq + 1));
  }
}

struct Context {
  GlobalOptions g;
  RunConfig rc;
  std::string hash;
  fs::path out;

  DsvTable table(const std::string& command, std::vector<std::string> columns) const {
    DsvTable t(std::move(columns));
    t.meta("command", command);
    t.meta("config", rc.source.filename().string());
    t.meta("config_hash", hash);
    t.meta("rng_seed", std::to_string(rc.rng_seed));
    t.meta("versions", library_versions());
    return t;
  }
  void write(const DsvTable& t, const std::string& name) const {
    t.write(out / name);
    std::cout << "wrote " << (out / name).string() << "\n";
  }
};

Context make_context(const GlobalOptions& g) {
  Context c{g, load_config(g.config), {}, g.out};
  if (g.seed) c.rc.rng_seed = *g.seed;
  apply_levels(g.levels, c.rc.quantization);
  // the hash covers the resolved document together with command-line overrides
  json keyed = c.rc.document;
  keyed["rng_seed"] = c.rc.rng_seed;
  keyed["levels_override"] = g.levels;
  c.hash = fnv1a_hex(keyed.dump());
  if (c.rc.document.contains("threads") && g.threads == 1) c.g.threads = c.rc.document.at("threads").get<int>();
  fs::create_directories(c.out);
  return c;
}

std::string pair_name(const CircuitSpec& s, std::pair<std::size_t, std::size_t> p) {
  return s.nodes[p.first].name + "-" + s.nodes[p.second].name;
}

std::vector<double> flux_grid(const json& j, const std::string& where) {
  auto g = parse_grid(j, where);
  return g;
}

// ---------------------------------------------------------------------------

int cmd_spectrum(const Context& c) {
  const json& blk = c.rc.document.value("spectrum", json::object());
  const int count = blk.value("count", 20);
  const auto model = build_model(c.rc.circuit, c.rc.quantization);
  SpectrumOptions so;
  so.count = default_eigen_count(model);
  const auto s = dressed_spectrum(model, so);
  const auto& spec = c.rc.circuit;

  auto t = c.table("spectrum", {"index", "label", "energy_ghz", "relative_ghz", "bare_overlap"});
  std::map<Eigen::Index, Label> label_of;
  for (const auto& [l, k] : s.column) label_of[k] = l;
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(count, s.eigenvalues.size()); ++k) {
    const auto it = label_of.find(k);
    const std::string lab = it == label_of.end() ? "?" : label_string(it->second);
    const double ov = it == label_of.end() ? 0.0 : s.overlaps.at(it->second);
    t.row({DsvTable::cell(static_cast<long>(k)), lab, DsvTable::cell(s.eigenvalues(k)),
           DsvTable::cell(s.eigenvalues(k) - s.eigenvalues(0)), DsvTable::cell(ov)});
  }
  c.write(t, "spectrum.csv");

  auto sum = c.table("spectrum", {"quantity", "value", "unit"});
  const auto ec = circuit_charging_energies(spec, c.rc.quantization.reduction);
  for (std::size_t i = 0; i < spec.nodes.size(); ++i)
    for (std::size_t j = i; j < spec.nodes.size(); ++j)
      sum.row({"EC_" + spec.nodes[i].name + (i == j ? "" : "_" + spec.nodes[j].name),
               DsvTable::cell(ec.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))), "GHz"});
  for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
    const auto& e = model.modes[i].energies;
    sum.row({"f01_local_" + spec.nodes[i].name, DsvTable::cell(e(1) - e(0)), "GHz"});
    if (e.size() > 2) sum.row({"anharmonicity_local_" + spec.nodes[i].name, DsvTable::cell(e(2) - 2 * e(1) + e(0)), "GHz"});
  }
  const auto qubits = qubit_nodes(spec);
  for (auto q : qubits) {
    const auto nodes = spec.nodes.size();
    const auto e0 = s.energy(Label(nodes, 0));
    sum.row({"f01_dressed_" + spec.nodes[q].name, DsvTable::cell(s.energy(make_label(nodes, {{q, 1}})) - e0), "GHz"});
    if (spec.nodes[q].kind == NodeKind::Fluxonium && s.has(make_label(nodes, {{q, 2}})))
      sum.row({"f12_dressed_" + spec.nodes[q].name,
               DsvTable::cell(s.energy(make_label(nodes, {{q, 2}})) - s.energy(make_label(nodes, {{q, 1}}))), "GHz"});
  }
  const auto zz = pairwise_zz(s, qubits);
  for (std::size_t k = 0; k < zz.pairs.size(); ++k)
    sum.row({"zeta_" + pair_name(spec, zz.pairs[k]), DsvTable::cell(zz.zeta_khz[k]), "kHz"});
  if (qubits.size() == 3)
    sum.row({"zeta_zzz", DsvTable::cell(zzz_interaction(s, qubits[0], qubits[1], qubits[2])), "Hz"});
  for (const auto& [l, e] : delocalization(s, qubits)) sum.row({"delocalization_" + label_string(l), DsvTable::cell(e), "1"});
  c.write(sum, "spectrum_summary.csv");
  std::cout << sum.str();
  return 0;
}

int cmd_zz_map(const Context& c) {
  const json& blk = c.rc.block("zz_map");
  StaticProblem p{c.rc.circuit, c.rc.quantization, blk.value("eigen_count", -1)};
  std::vector<std::vector<double>> grids;
  std::vector<std::string> cols;
  const bool in_pi = blk.value("units", std::string("rad")) == "pi";
  for (const auto& n : c.rc.circuit.nodes) {
    if (!n.is_coupler()) continue;
    if (!blk.contains("grids") || !blk.at("grids").contains(n.name))
      throw Error(ErrorCode::Config, "zz_map.grids needs an entry for coupler " + n.name);
    auto g = flux_grid(blk.at("grids").at(n.name), "zz_map.grids." + n.name);
    if (in_pi)
      for (auto& x : g) x *= units::pi;
    grids.push_back(g);
    cols.push_back("flux_" + n.name);
  }
  const auto sweep = zz_flux_sweep(p, grids, c.g.threads);
  for (const auto& pr : sweep.pairs) cols.push_back("zeta_khz_" + pair_name(c.rc.circuit, pr));
  cols.push_back("dominant_pair");
  auto t = c.table("zz-map", cols);
  for (const auto& pt : sweep.points) {
    std::vector<std::string> row;
    for (double x : pt.fluxes) row.push_back(DsvTable::cell(x));
    for (double z : pt.zeta_khz) row.push_back(DsvTable::cell(z));
    row.push_back(pt.dominant_pair < 0 ? "none" : pair_name(c.rc.circuit, sweep.pairs[static_cast<std::size_t>(pt.dominant_pair)]));
    t.row(row);
  }
  c.write(t, "zz_map.csv");
  return 0;
}

int cmd_robustness(const Context& c) {
  const json& blk = c.rc.block("robustness");
  StaticProblem p{c.rc.circuit, c.rc.quantization, blk.value("eigen_count", -1)};
  const auto dej = parse_grid(blk.at("delta_ej"), "robustness.delta_ej");
  const auto dec = parse_grid(blk.at("delta_ec"), "robustness.delta_ec");
  const double hw = blk.value("half_width", 0.3);
  const auto q = qubit_nodes(c.rc.circuit);
  const auto pts = robustness_scan(p, dej, dec, hw, c.g.threads, {q.front(), q.back()});
  auto t = c.table("robustness", {"delta_ej", "delta_ec", "zeta_sweet_khz", "zeta_readjusted_khz", "readjusted_flux", "root_found"});
  for (const auto& r : pts)
    t.row({DsvTable::cell(r.delta_ej), DsvTable::cell(r.delta_ec), DsvTable::cell(r.zeta_sweet_khz),
           DsvTable::cell(r.zeta_readjusted_khz), DsvTable::cell(r.readjusted_flux), r.root_found ? "1" : "0"});
  c.write(t, "robustness.csv");
  return 0;
}

// ---------------------------------------------------------------------------
// Gate commands

struct GateSession {
  HamiltonianModel model;
  DressedSpectrum spectrum;
  GateSetup setup;
  PropagationOptions propagation;
  std::optional<DressedFrame> frame;

  const DressedFrame& dressed_frame() {
    if (!frame) frame = make_frame(model, propagation);
    return *frame;
  }
};

GateSession make_session(const Context& c, const json& blk, const std::string& where) {
  GateSession s{build_model(c.rc.circuit, c.rc.quantization), {}, {}, {}, {}};
  SpectrumOptions so;
  so.count = default_eigen_count(s.model);
  s.spectrum = dressed_spectrum(s.model, so);
  s.setup = gate_setup(s.model, s.spectrum);
  s.propagation = parse_propagation(blk.value("propagation", json::object()), where + ".propagation");
  s.propagation.coupler = s.setup.coupler_index;
  return s;
}

/// Explicit tones, or {"seed": "analytic", "ramp": tau} for the first-order seed.
PulseSpec pulse_from_block(const json& j, const GateSession& s, const CircuitSpec& spec, const std::string& where) {
  const double dc = spec.nodes[s.setup.sites.coupler].external_flux;
  const double t = j.at("gate_time").get<double>();
  if (j.contains("tones")) {
    PulseSpec p;
    p.gate_time = t;
    p.dc_offset = dc;
    std::size_t i = 0;
    for (const auto& tj : j.at("tones")) p.tones.push_back(parse_tone(tj, where + ".tones[" + std::to_string(i++) + "]"));
    p.validate();
    return p;
  }
  return analytic_seed(s.setup, t, j.value("ramp", 2.0), dc);
}

std::map<Label, double> config_rates(const Context& c) {
  if (!c.rc.has("rates_khz")) return {};
  return parse_rates(c.rc.block("rates_khz"), c.rc.circuit.nodes.size());
}

/// Decoherence estimate as a table cell; "nan" with a warning when a populated
/// state has no listed rate.
std::string decoherence_cell(const ProcessResult& r, const std::map<Label, double>& rates, double gate_time) {
  try {
    return DsvTable::cell(decoherence_error(r.avg_population, rates, gate_time));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MissingRate) throw;
    std::cerr << "warning: decoherence estimate skipped: " << e.what() << "\n";
    return "nan";
  }
}

void write_process(const Context& c, const ProcessResult& r, const std::string& name) {
  auto t = c.table("gate", {"row", "col", "re", "im", "abs"});
  for (Eigen::Index i = 0; i < r.process_matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < r.process_matrix.cols(); ++j) {
      const auto z = r.process_matrix(i, j);
      t.row({label_string(r.computational[static_cast<std::size_t>(i)]), label_string(r.computational[static_cast<std::size_t>(j)]),
             DsvTable::cell(z.real()), DsvTable::cell(z.imag()), DsvTable::cell(std::abs(z))});
    }
  c.write(t, name);
}

void write_leakage(const Context& c, const ProcessResult& r, const std::string& name) {
  auto t = c.table("gate", {"input", "state", "population"});
  for (std::size_t k = 0; k < r.leakage_by_input.size(); ++k) {
    std::vector<std::pair<double, Label>> v;
    for (const auto& [l, p] : r.leakage_by_input[k]) v.push_back({p, l});
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    for (const auto& [p, l] : v)
      if (p > 1e-10) t.row({label_string(r.computational[k]), label_string(l), DsvTable::cell(p)});
  }
  c.write(t, name);
}

int cmd_gate_analyze(const Context& c) {
  const json& blk = c.rc.block("gate");
  auto s = make_session(c, blk, "gate");
  const auto& m = s.setup.three_level;
  std::vector<double> amplitudes;
  if (blk.contains("amplitudes")) amplitudes = blk.at("amplitudes").get<std::vector<double>>();
  if (blk.contains("target_gate_times"))
    for (double t : blk.at("target_gate_times").get<std::vector<double>>())
      amplitudes.push_back(amplitude_for_gate_time(m, s.setup.ej_sum, s.setup.ej_diff, t));
  auto t = c.table("gate analyze", {"phi_ac", "alpha", "beta", "omega1_ghz", "t1_ns", "omega2_ghz", "t2_ns", "omega_opt_ghz",
                                    "t_opt_ns", "peak_population", "dev_omega1", "dev_omega2", "dev_t1", "dev_t2"});
  for (double phi : amplitudes) {
    const auto dc = jacobi_anger_coefficients(s.setup.ej_sum, s.setup.ej_diff, phi);
    const auto e1 = effective_gate(m, dc, 1);
    const auto e2 = effective_gate(m, dc, 2);
    const double wopt = optimize_three_level_frequency(m, dc, 0.99 * e1.omega_d, 1.01 * e1.omega_d, 0.75 * e1.t_gate);
    const auto pk = peak_transfer(m, dc, wopt, 0.75 * e1.t_gate);
    const double topt = 2.0 * pk.time;
    t.row({DsvTable::cell(phi), DsvTable::cell(dc.alpha), DsvTable::cell(dc.beta), DsvTable::cell(e1.omega_d),
           DsvTable::cell(e1.t_gate), DsvTable::cell(e2.omega_d), DsvTable::cell(e2.t_gate), DsvTable::cell(wopt),
           DsvTable::cell(topt), DsvTable::cell(pk.population), DsvTable::cell(std::abs(e1.omega_d - wopt) / wopt),
           DsvTable::cell(std::abs(e2.omega_d - wopt) / wopt), DsvTable::cell(std::abs(e1.t_gate - topt) / topt),
           DsvTable::cell(std::abs(e2.t_gate - topt) / topt)});
  }
  c.write(t, "gate_analysis.csv");
  auto a = c.table("gate analyze", {"row", "col", "A_numerical", "A_perturbative"});
  const auto ap = perturbative_A_matrix(m.bare_energies, m.g_101_110, m.g_101_200, m.g_110_200, m.zpf_phi);
  const char* names[] = {"101", "110", "200"};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a.row({names[i], names[j], DsvTable::cell(m.A(i, j)), DsvTable::cell(ap(i, j))});
  c.write(a, "a_matrix.csv");
  std::cout << t.str();
  return 0;
}

int cmd_gate_simulate(const Context& c) {
  const json& blk = c.rc.block("gate");
  auto s = make_session(c, blk, "gate");
  if (!blk.contains("pulse")) throw Error(ErrorCode::Config, "gate.pulse is required for simulate");
  const auto pulse = pulse_from_block(blk.at("pulse"), s, c.rc.circuit, "gate.pulse");
  auto popt = s.propagation;
  const double dt = blk.value("sample_interval", 0.0);
  if (dt > 0)
    for (double t = dt; t < pulse.gate_time; t += dt) popt.sample_times.push_back(t);
  const auto& frame = s.dressed_frame();
  const auto r = simulate_gate(frame, pulse, s.setup.qubits, popt);
  write_process(c, r, "process.csv");
  write_leakage(c, r, "leakage.csv");

  auto sum = c.table("gate simulate", {"quantity", "value"});
  sum.row({"gate_time_ns", DsvTable::cell(pulse.gate_time)});
  for (std::size_t k = 0; k < pulse.tones.size(); ++k) {
    const auto& tn = pulse.tones[k];
    const std::string p = "tone" + std::to_string(k + 1) + "_";
    sum.row({p + "frequency_ghz", DsvTable::cell(tn.frequency)});
    sum.row({p + "amplitude_rad", DsvTable::cell(tn.amplitude)});
    sum.row({p + "ramp_ns", DsvTable::cell(tn.ramp)});
  }
  sum.row({"dressed_states", DsvTable::cell(static_cast<long>(frame.dimension()))});
  sum.row({"infidelity", DsvTable::cell(r.infidelity)});
  for (std::size_t q = 0; q < r.phase_corrections.size(); ++q)
    sum.row({"virtual_z_" + c.rc.circuit.nodes[s.setup.qubits[q]].name, DsvTable::cell(r.phase_corrections[q])});
  const auto rates = config_rates(c);
  if (!rates.empty()) sum.row({"decoherence_error", decoherence_cell(r, rates, pulse.gate_time)});
  c.write(sum, "gate_summary.csv");
  std::cout << sum.str();

  if (!popt.sample_times.empty()) {
    // populations of the |11..> input over time, for states that ever exceed 1e-4
    const auto in = static_cast<Eigen::Index>(r.computational.size() >= 4 ? (r.computational.size() == 4 ? 3 : 6) : 0);
    std::map<Eigen::Index, Label> label_of;
    for (const auto& [l, k] : frame.spectrum.column) label_of[k] = l;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < frame.dimension(); ++k) {
      double mx = std::norm(r.trajectory.amplitudes(k, in));
      for (const auto& snap : r.trajectory.samples) mx = std::max(mx, snap(k, in));
      if (mx > 1e-4) keep.push_back(k);
    }
    std::vector<std::string> cols{"time_ns", "flux_rad"};
    for (auto k : keep) cols.push_back("p_" + label_string(label_of.at(k)));
    auto ts = c.table("gate simulate", cols);
    ts.meta("input", label_string(r.computational[static_cast<std::size_t>(in)]));
    auto emit = [&](double t, auto pop) {
      std::vector<std::string> row{DsvTable::cell(t), DsvTable::cell(flux_waveform(pulse, t))};
      for (auto k : keep) row.push_back(DsvTable::cell(pop(k)));
      ts.row(row);
    };
    emit(0.0, [&](Eigen::Index k) { return k == r.trajectory.inputs[static_cast<std::size_t>(in)] ? 1.0 : 0.0; });
    for (std::size_t i = 0; i < r.trajectory.samples.size(); ++i)
      emit(popt.sample_times[i], [&](Eigen::Index k) { return r.trajectory.samples[i](k, in); });
    emit(pulse.gate_time, [&](Eigen::Index k) { return std::norm(r.trajectory.amplitudes(k, in)); });
    c.write(ts, "populations.csv");
  }
  return 0;
}

json pulse_json(const PulseSpec& p) {
  json tones = json::array();
  for (const auto& t : p.tones)
    tones.push_back({{"amplitude", t.amplitude}, {"frequency", t.frequency}, {"ramp", t.ramp}, {"phase", t.phase}});
  return {{"gate_time", p.gate_time}, {"dc_offset", p.dc_offset}, {"tones", tones}};
}

void write_trace(const Context& c, const OptimizationResult& r, const std::string& name) {
  std::vector<std::string> cols{"evaluation"};
  const auto n = r.trace.empty() ? 0 : r.trace.front().params.size();
  for (Eigen::Index k = 0; k < n; ++k) {
    const char* what[] = {"frequency", "amplitude", "ramp"};
    cols.push_back(std::string(what[k % 3]) + std::to_string(k / 3 + 1));
  }
  cols.push_back("infidelity");
  cols.push_back("best");
  auto t = c.table("optimize", cols);
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    std::vector<std::string> row{DsvTable::cell(static_cast<long>(i))};
    for (Eigen::Index k = 0; k < n; ++k) row.push_back(DsvTable::cell(r.trace[i].params(k)));
    row.push_back(DsvTable::cell(r.trace[i].value));
    row.push_back(DsvTable::cell(r.trace[i].best));
    t.row(row);
  }
  c.write(t, name);
}

struct OptimizeSettings {
  int budget_single = 400;
  int budget_two = 1200;
  double search_rtol = 1e-7;
  double final_rtol = 1e-9;
  double ramp = 2.0;
  bool two_tone = false;
};

OptimizeSettings optimize_settings(const json& blk) {
  OptimizeSettings o;
  o.budget_single = blk.value("budget_single", o.budget_single);
  o.budget_two = blk.value("budget_two", o.budget_two);
  o.search_rtol = blk.value("search_rtol", o.search_rtol);
  o.final_rtol = blk.value("final_rtol", o.final_rtol);
  o.ramp = blk.value("ramp", o.ramp);
  o.two_tone = blk.value("two_tone", o.two_tone);
  return o;
}

struct GatePoint {
  OptimizationResult single;
  std::optional<OptimizationResult> two;
};

GatePoint optimize_gate(const Context& c, GateSession& s, double gate_time, const OptimizeSettings& o) {
  const auto& frame = s.dressed_frame();
  const double dc = c.rc.circuit.nodes[s.setup.sites.coupler].external_flux;
  const auto seed = analytic_seed(s.setup, gate_time, o.ramp, dc);
  auto p = make_problem(frame, s.setup.qubits, seed);
  p.propagation = s.propagation;
  p.budget = o.budget_single;
  p.search_rtol = o.search_rtol;
  p.final_rtol = o.final_rtol;
  p.rng_seed = c.rc.rng_seed;
  p.threads = c.g.threads;
  GatePoint gp{optimize_single_tone(p), std::nullopt};
  if (o.two_tone) {
    auto p2 = p;
    p2.budget = o.budget_two;
    const auto& best = gp.single.best_pulse;
    p2.bounds = default_bounds(seed);
    gp.two = optimize_two_tone(p2, best, second_tone_frequencies(s.setup, best.tones[0].frequency));
  }
  return gp;
}

int cmd_optimize(const Context& c) {
  const json& blk = c.rc.block("optimize");
  auto s = make_session(c, blk, "optimize");
  const auto o = optimize_settings(blk);
  const auto times = blk.at("gate_times").get<std::vector<double>>();
  const auto rates = config_rates(c);
  auto t = c.table("optimize", {"gate_time_ns", "tones", "seed_infidelity", "infidelity", "decoherence_error", "evaluations",
                                "budget_exhausted", "frequency1", "amplitude1", "ramp1", "frequency2", "amplitude2", "ramp2"});
  json pulses = json::array();
  for (double T : times) {
    const auto gp = optimize_gate(c, s, T, o);
    auto add = [&](const OptimizationResult& r, const std::string& tag) {
      const auto& ps = r.best_pulse;
      std::vector<std::string> row{DsvTable::cell(T), DsvTable::cell(static_cast<long>(ps.tones.size())),
                                   DsvTable::cell(r.seed_infidelity), DsvTable::cell(r.best_infidelity),
                                   rates.empty() ? "nan" : decoherence_cell(r.process, rates, T),
                                   DsvTable::cell(static_cast<long>(r.evaluations)), r.budget_exhausted ? "1" : "0"};
      for (std::size_t k = 0; k < 2; ++k) {
        if (k < ps.tones.size()) {
          row.push_back(DsvTable::cell(ps.tones[k].frequency));
          row.push_back(DsvTable::cell(ps.tones[k].amplitude));
          row.push_back(DsvTable::cell(ps.tones[k].ramp));
        } else {
          row.insert(row.end(), {"", "", ""});
        }
      }
      t.row(row);
      pulses.push_back(pulse_json(ps));
      const std::string stem = "T" + format_number(T) + "_" + tag;
      write_trace(c, r, "trace_" + stem + ".csv");
      write_leakage(c, r.process, "leakage_" + stem + ".csv");
    };
    add(gp.single, "single");
    if (gp.two) add(*gp.two, "two");
  }
  c.write(t, "optimize.csv");
  std::ofstream(c.out / "best_pulses.json") << pulses.dump(2) << "\n";
  std::cout << t.str();
  return 0;
}

int cmd_spectator(const Context& c) {
  const json& blk = c.rc.block("spectator");
  auto s = make_session(c, blk, "spectator");
  const auto& spec = c.rc.circuit;
  const auto q = qubit_nodes(spec);
  if (q.size() != 3) throw Error(ErrorCode::Config, "spectator analysis needs a three-qubit chain");
  auto sum = c.table("spectator", {"quantity", "value", "unit"});
  const auto zz = pairwise_zz(s.spectrum, q);
  for (std::size_t k = 0; k < zz.pairs.size(); ++k)
    sum.row({"zeta_" + pair_name(spec, zz.pairs[k]), DsvTable::cell(zz.zeta_khz[k] * 1e3), "Hz"});
  sum.row({"zeta_zzz", DsvTable::cell(zzz_interaction(s.spectrum, q[0], q[1], q[2])), "Hz"});

  if (blk.value("simulate", true)) {
    const auto o = optimize_settings(blk);
    const double T = blk.value("gate_time", 40.0);
    OptimizationResult r;
    if (blk.contains("pulse")) {
      const auto p = pulse_from_block(blk.at("pulse"), s, spec, "spectator.pulse");
      r.best_pulse = p;
      auto fin = s.propagation;
      fin.rtol = o.final_rtol;
      r.process = simulate_gate(s.dressed_frame(), p, s.setup.qubits, fin);
      r.best_infidelity = r.process.infidelity;
    } else {
      r = optimize_gate(c, s, T, o).single;
      write_trace(c, r, "trace_spectator.csv");
    }
    sum.row({"dressed_states", DsvTable::cell(static_cast<long>(s.dressed_frame().dimension())), "1"});
    sum.row({"infidelity_traced", DsvTable::cell(r.best_infidelity), "1"});
    const auto& ps = r.best_pulse.tones[0];
    sum.row({"frequency", DsvTable::cell(ps.frequency), "GHz"});
    sum.row({"amplitude", DsvTable::cell(ps.amplitude), "rad"});
    sum.row({"ramp", DsvTable::cell(ps.ramp), "ns"});
    write_process(c, r.process, "process_8x8.csv");
    const auto w = pauli_error_weights(r.process.process_matrix, spectator_target());
    auto pt = c.table("spectator", {"rank", "pauli", "weight"});
    long rank = 0;
    for (const auto& [name, val] : ranked_weights(w)) pt.row({DsvTable::cell(++rank), name, DsvTable::cell(val)});
    c.write(pt, "pauli_weights.csv");
    sum.row({"pauli_weight_total", DsvTable::cell(w.total()), "1"});
  }
  c.write(sum, "spectator_summary.csv");
  std::cout << sum.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  fluxtrans::ensure_reliable_blas_kernel(argv);
  CLI::App app{"fluxtrans: fluxonium-transmon-coupler circuits, ZZ analysis and parametric CZ pulses"};
  app.require_subcommand(1);
  GlobalOptions g;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", g.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", g.out, "output directory");
    sub->add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", g.seed, "random seed (overrides the config)");
    sub->add_option("--levels", g.levels, "kept levels: N, or name=N[,name=N...]");
  };
  auto* spectrum = app.add_subcommand("spectrum", "dressed spectrum, ZZ and delocalization at the design point");
  auto* zzmap = app.add_subcommand("zz-map", "ZZ over a grid of coupler fluxes");
  auto* robust = app.add_subcommand("robustness", "ZZ under coupler fabrication errors, with flux readjustment");
  auto* gate = app.add_subcommand("gate", "three-level analysis or full gate simulation");
  auto* optimize = app.add_subcommand("optimize", "optimize single- or two-tone CZ pulses over gate times");
  auto* spectator = app.add_subcommand("spectator", "three-qubit chain: ZZ, ZZZ, gate with spectator, Pauli errors");
  for (auto* s : {spectrum, zzmap, robust, optimize}) add_common(s);
  gate->require_subcommand(1);
  auto* analyze = gate->add_subcommand("analyze", "three-level drive-model predictions");
  auto* simulate = gate->add_subcommand("simulate", "propagate one pulse in the full model");
  add_common(analyze);
  add_common(simulate);
  auto* sp_analyze = spectator->add_subcommand("analyze", "ZZ, ZZZ and gate with a spectator");
  add_common(sp_analyze);
  spectator->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);
  try {
    const auto start = std::chrono::steady_clock::now();
    const auto ctx = make_context(g);
    int rc = 0;
    if (spectrum->parsed()) rc = cmd_spectrum(ctx);
    else if (zzmap->parsed()) rc = cmd_zz_map(ctx);
    else if (robust->parsed()) rc = cmd_robustness(ctx);
    else if (analyze->parsed()) rc = cmd_gate_analyze(ctx);
    else if (simulate->parsed()) rc = cmd_gate_simulate(ctx);
    else if (optimize->parsed()) rc = cmd_optimize(ctx);
    else if (sp_analyze->parsed()) rc = cmd_spectator(ctx);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "elapsed " << secs << " s\n";
    return rc;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
