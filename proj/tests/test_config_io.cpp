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

#include <filesystem>

#include "fixtures.hpp"
#include "fluxtrans/config.hpp"
#include "fluxtrans/io.hpp"

using namespace fluxtrans;
using Catch::Approx;

namespace {

const std::filesystem::path kConfigs = std::filesystem::path(FLUXTRANS_SOURCE_DIR) / "configs";

}  // namespace

TEST_CASE("every shipped configuration loads", "[config_io]") {
  int count = 0;
  for (const auto& e : std::filesystem::directory_iterator(kConfigs)) {
    if (e.path().extension() != ".json") continue;
    INFO(e.path().string());
    CHECK_NOTHROW(load_config(e.path()));
    ++count;
  }
  CHECK(count >= 10);
}

TEST_CASE("the cell circuit file matches the reference cell", "[config_io]") {
  const auto spec = parse_circuit(read_json(kConfigs / "circuits" / "ft_cell.json"));
  const auto ref = testing::ft_cell();
  REQUIRE(spec.nodes.size() == ref.nodes.size());
  for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
    CHECK(spec.nodes[i].name == ref.nodes[i].name);
    CHECK(spec.nodes[i].kind == ref.nodes[i].kind);
    CHECK(spec.nodes[i].shunt_capacitance == Approx(ref.nodes[i].shunt_capacitance));
    CHECK(spec.nodes[i].ground_capacitance == Approx(ref.nodes[i].ground_capacitance));
    CHECK(spec.nodes[i].josephson_energy == Approx(ref.nodes[i].josephson_energy));
    CHECK(spec.nodes[i].inductive_energy == Approx(ref.nodes[i].inductive_energy));
    CHECK(spec.nodes[i].ej_upper == Approx(ref.nodes[i].ej_upper));
    CHECK(spec.nodes[i].ej_lower == Approx(ref.nodes[i].ej_lower));
    CHECK(spec.nodes[i].external_flux == Approx(ref.nodes[i].external_flux));
  }
  REQUIRE(spec.couplings.size() == ref.couplings.size());
  for (std::size_t i = 0; i < ref.couplings.size(); ++i)
    CHECK(spec.couplings[i].capacitance == Approx(ref.couplings[i].capacitance));
  // serialization round trip
  const auto again = parse_circuit(circuit_to_json(spec));
  CHECK(circuit_to_json(again) == circuit_to_json(spec));
}

TEST_CASE("configuration errors are reported", "[config_io]") {
  auto j = read_json(kConfigs / "circuits" / "ft_cell.json");
  j["nodes"][0]["bogus"] = 1.0;
  CHECK_THROWS_AS(parse_circuit(j), Error);
  CHECK_THROWS_AS(load_config(kConfigs / "does_not_exist.json"), Error);
  CHECK_THROWS_AS(parse_grid(json::array({0.0, 1.0}), "grid"), Error);
  const auto g = parse_grid(json::array({0.0, 1.0, 5}), "grid");
  REQUIRE(g.size() == 5);
  CHECK(g[2] == Approx(0.5));
  CHECK(g.back() == 1.0);
}

TEST_CASE("FNV-1a reference vectors", "[config_io]") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("delimited tables carry metadata and fixed formatting", "[config_io]") {
  DsvTable t({"label", "value"});
  t.meta("command", "spectrum");
  t.meta("scale", 0.5);
  t.row({"000", DsvTable::cell(0.1)});
  t.row({"001", DsvTable::cell(1.0 / 3.0)});
  CHECK(t.str() == "# command: spectrum\n# scale: 0.5\nlabel,value\n000,0.1\n001,0.333333333333\n");
  CHECK_THROWS_AS(t.row({"x"}), Error);
}
