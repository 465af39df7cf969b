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
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fluxtrans/circuit.hpp"
#include "fluxtrans/error.hpp"
#include "fluxtrans/propagation.hpp"
#include "fluxtrans/pulse.hpp"
#include "fluxtrans/quantization.hpp"
#include "fluxtrans/spectrum.hpp"
#include "fluxtrans/units.hpp"

namespace fluxtrans {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void config_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::Config, where + ": " + what);
}

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) config_error(where, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) config_error(where, "unknown key '" + k + "'");
  }
}

inline double number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) config_error(where, "missing '" + key + "'");
  if (!j.at(key).is_number()) config_error(where + "." + key, "expected a number");
  return j.at(key).get<double>();
}

inline double number_or(const json& j, const std::string& key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return number(j, key, where);
}

inline int integer_or(const json& j, const std::string& key, int fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) config_error(where + "." + key, "expected an integer");
  return j.at(key).get<int>();
}

inline std::string string_or(const json& j, const std::string& key, const std::string& fallback,
                             const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) config_error(where + "." + key, "expected a string");
  return j.at(key).get<std::string>();
}

/// Flux given either in radians ("flux") or in units of pi ("flux_pi").
inline double flux_value(const json& j, const std::string& where, double fallback) {
  if (j.contains("flux") && j.contains("flux_pi")) config_error(where, "give either 'flux' or 'flux_pi'");
  if (j.contains("flux")) return number(j, "flux", where);
  if (j.contains("flux_pi")) return units::pi * number(j, "flux_pi", where);
  return fallback;
}

inline Terminal parse_terminal(const json& j, const std::string& where) {
  if (!j.is_string()) config_error(where, "expected a terminal name such as \"q1\" or \"c.2\"");
  const auto s = j.get<std::string>();
  const auto dot = s.rfind('.');
  if (dot == std::string::npos) return {s, 0};
  const auto island = s.substr(dot + 1);
  if (island != "1" && island != "2") config_error(where, "coupler island must be .1 or .2");
  return {s.substr(0, dot), std::stoi(island)};
}

}  // namespace detail

inline CircuitSpec parse_circuit(const json& j) {
  using namespace detail;
  check_keys(j, "circuit", {"nodes", "couplings", "gauge", "description"});
  if (!j.contains("nodes") || !j.at("nodes").is_array()) config_error("circuit", "missing 'nodes' array");
  CircuitSpec spec;
  std::size_t i = 0;
  for (const auto& n : j.at("nodes")) {
    const std::string where = "circuit.nodes[" + std::to_string(i++) + "]";
    NodeSpec node;
    if (!n.contains("name") || !n.at("name").is_string()) config_error(where, "missing 'name'");
    node.name = n.at("name").get<std::string>();
    const auto kind = string_or(n, "kind", "", where);
    if (kind == "fluxonium") {
      check_keys(n, where, {"name", "kind", "C", "EJ", "EL", "flux", "flux_pi"});
      node.kind = NodeKind::Fluxonium;
      node.shunt_capacitance = number(n, "C", where);
      node.josephson_energy = number(n, "EJ", where);
      node.inductive_energy = number(n, "EL", where);
      node.external_flux = flux_value(n, where, units::pi);
    } else if (kind == "transmon") {
      check_keys(n, where, {"name", "kind", "C", "EJ"});
      node.kind = NodeKind::Transmon;
      node.shunt_capacitance = number(n, "C", where);
      node.josephson_energy = number(n, "EJ", where);
    } else if (kind == "coupler") {
      check_keys(n, where, {"name", "kind", "C", "Cg", "EJ_upper", "EJ_lower", "flux", "flux_pi"});
      node.kind = NodeKind::Coupler;
      node.shunt_capacitance = number(n, "C", where);
      node.ground_capacitance = number(n, "Cg", where);
      node.ej_upper = number(n, "EJ_upper", where);
      node.ej_lower = number(n, "EJ_lower", where);
      node.external_flux = flux_value(n, where, units::pi / 2.0);
    } else {
      config_error(where + ".kind", "expected fluxonium, transmon or coupler");
    }
    spec.nodes.push_back(node);
  }
  i = 0;
  if (j.contains("couplings")) {
    for (const auto& c : j.at("couplings")) {
      const std::string where = "circuit.couplings[" + std::to_string(i++) + "]";
      check_keys(c, where, {"a", "b", "C"});
      if (!c.contains("a") || !c.contains("b")) config_error(where, "missing terminal");
      spec.couplings.push_back({parse_terminal(c.at("a"), where + ".a"), parse_terminal(c.at("b"), where + ".b"),
                                number(c, "C", where)});
    }
  }
  for (const auto& n : spec.nodes)
    if (n.is_coupler()) spec.coupler_gauge[n.name] = CouplerGauge{};
  if (j.contains("gauge")) {
    for (const auto& [name, g] : j.at("gauge").items()) {
      const std::string where = "circuit.gauge." + name;
      check_keys(g, where, {"m_upper", "m_lower"});
      spec.coupler_gauge[name] = CouplerGauge{number(g, "m_upper", where), number(g, "m_lower", where)};
    }
  }
  spec.validate();
  return spec;
}

inline json circuit_to_json(const CircuitSpec& spec) {
  json nodes = json::array();
  for (const auto& n : spec.nodes) {
    json o{{"name", n.name}};
    switch (n.kind) {
      case NodeKind::Fluxonium:
        o["kind"] = "fluxonium";
        o["C"] = n.shunt_capacitance;
        o["EJ"] = n.josephson_energy;
        o["EL"] = n.inductive_energy;
        o["flux"] = n.external_flux;
        break;
      case NodeKind::Transmon:
        o["kind"] = "transmon";
        o["C"] = n.shunt_capacitance;
        o["EJ"] = n.josephson_energy;
        break;
      case NodeKind::Coupler:
        o["kind"] = "coupler";
        o["C"] = n.shunt_capacitance;
        o["Cg"] = n.ground_capacitance;
        o["EJ_upper"] = n.ej_upper;
        o["EJ_lower"] = n.ej_lower;
        o["flux"] = n.external_flux;
        break;
    }
    nodes.push_back(o);
  }
  auto term = [](const Terminal& t) { return t.island == 0 ? t.node : t.node + "." + std::to_string(t.island); };
  json couplings = json::array();
  for (const auto& c : spec.couplings) couplings.push_back({{"a", term(c.a)}, {"b", term(c.b)}, {"C", c.capacitance}});
  json gauge = json::object();
  for (const auto& [k, g] : spec.coupler_gauge) gauge[k] = {{"m_upper", g.m_upper}, {"m_lower", g.m_lower}};
  return {{"nodes", nodes}, {"couplings", couplings}, {"gauge", gauge}};
}

inline QuantizationOptions parse_quantization(const json& j) {
  using namespace detail;
  QuantizationOptions q;
  if (j.is_null()) return q;
  check_keys(j, "quantization", {"levels", "node_levels", "bare_levels", "dimension_cap", "reduction", "cross_charge_factor"});
  q.default_levels = integer_or(j, "levels", q.default_levels, "quantization");
  if (j.contains("node_levels"))
    for (const auto& [k, v] : j.at("node_levels").items()) q.levels[k] = v.get<int>();
  if (j.contains("bare_levels"))
    for (const auto& [k, v] : j.at("bare_levels").items()) q.bare_levels[k] = v.get<int>();
  q.dimension_cap = number_or(j, "dimension_cap", q.dimension_cap, "quantization");
  const auto red = string_or(j, "reduction", "elimination", "quantization");
  if (red == "elimination")
    q.reduction = ReductionScheme::Elimination;
  else if (red == "restriction")
    q.reduction = ReductionScheme::Restriction;
  else
    config_error("quantization.reduction", "expected elimination or restriction");
  q.cross_charge_factor = number_or(j, "cross_charge_factor", q.cross_charge_factor, "quantization");
  return q;
}

inline ToneSpec parse_tone(const json& j, const std::string& where) {
  using namespace detail;
  check_keys(j, where, {"amplitude", "frequency", "ramp", "phase"});
  return {number(j, "amplitude", where), number(j, "frequency", where), number_or(j, "ramp", 0.0, where),
          number_or(j, "phase", 0.0, where)};
}

inline PropagationOptions parse_propagation(const json& j, const std::string& where) {
  using namespace detail;
  PropagationOptions o;
  o.rtol = number_or(j, "rtol", o.rtol, where);
  o.energy_cutoff = number_or(j, "energy_cutoff", o.energy_cutoff, where);
  o.max_states = integer_or(j, "max_states", o.max_states, where);
  const auto drive = string_or(j, "drive", "effective_junction", where);
  if (drive == "effective_junction")
    o.drive = DriveForm::EffectiveJunction;
  else if (drive == "irrotational")
    o.drive = DriveForm::Irrotational;
  else
    config_error(where + ".drive", "expected effective_junction or irrotational");
  return o;
}

/// Decay rates keyed by product-state label, in kHz.
inline std::map<Label, double> parse_rates(const json& j, std::size_t nodes) {
  std::map<Label, double> out;
  for (const auto& [k, v] : j.items()) {
    if (k.size() != nodes) detail::config_error("rates_khz." + k, "label length does not match the node count");
    Label l;
    for (char c : k) {
      if (c < '0' || c > '9') detail::config_error("rates_khz." + k, "labels are digit strings");
      l.push_back(c - '0');
    }
    if (!v.is_number()) detail::config_error("rates_khz." + k, "expected a number");
    out[l] = v.get<double>();
  }
  return out;
}

/// A run configuration: the resolved JSON document plus its source location.
struct RunConfig {
  json document;
  std::filesystem::path source;
  CircuitSpec circuit;
  QuantizationOptions quantization;
  std::uint64_t rng_seed = 1;

  bool has(const std::string& block) const { return document.contains(block); }
  const json& block(const std::string& name) const {
    if (!document.contains(name)) detail::config_error(source.string(), "missing '" + name + "' block");
    return document.at(name);
  }
};

inline json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::Config, "cannot open " + p.string());
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, p.string() + ": " + e.what());
  }
}

/// Loads a configuration. A string-valued "circuit" entry names a circuit
/// file relative to the configuration; it is inlined so the resolved
/// document fully describes the run.
inline RunConfig load_config(const std::filesystem::path& path) {
  RunConfig rc;
  rc.source = path;
  rc.document = read_json(path);
  if (!rc.document.is_object()) detail::config_error(path.string(), "top level must be an object");
  detail::check_keys(rc.document, path.string(),
                     {"description", "circuit", "quantization", "spectrum", "zz_map", "robustness", "gate", "optimize",
                      "spectator", "rates_khz", "rng_seed", "threads"});
  if (!rc.document.contains("circuit")) detail::config_error(path.string(), "missing 'circuit'");
  if (rc.document.at("circuit").is_string()) {
    const auto ref = path.parent_path() / rc.document.at("circuit").get<std::string>();
    rc.document["circuit"] = read_json(ref);
  }
  rc.circuit = parse_circuit(rc.document.at("circuit"));
  rc.quantization = parse_quantization(rc.document.value("quantization", json()));
  if (rc.document.contains("rng_seed")) rc.rng_seed = rc.document.at("rng_seed").get<std::uint64_t>();
  return rc;
}

/// Evenly spaced grid [lo, hi] with n points, given as [lo, hi, n].
inline std::vector<double> parse_grid(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) detail::config_error(where, "expected [start, stop, count]");
  const double lo = j[0].get<double>(), hi = j[1].get<double>();
  const int n = j[2].get<int>();
  if (n < 0) detail::config_error(where, "negative point count");
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return g;
}

}  // namespace fluxtrans
