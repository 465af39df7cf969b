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

#include "fluxtrans/circuit.hpp"
#include "fluxtrans/units.hpp"

namespace fluxtrans::testing {

/// Fluxonium - coupler - transmon cell with the reference parameters.
inline CircuitSpec ft_cell() {
  CircuitSpec s;
  s.nodes.push_back({"q1", NodeKind::Fluxonium, 18.0, 0.0, 6.1, 1.6, 0.0, 0.0, units::pi});
  s.nodes.push_back({"c", NodeKind::Coupler, 22.0, 38.0, 0.0, 0.0, 12.822, 7.5, units::pi / 2});
  s.nodes.push_back({"q2", NodeKind::Transmon, 87.8, 0.0, 13.6, 0.0, 0.0, 0.0, 0.0});
  s.couplings.push_back({{"q1", 0}, {"c", 1}, 6.0});
  s.couplings.push_back({{"c", 2}, {"q2", 0}, 15.5});
  s.coupler_gauge["c"] = {};
  return s;
}

/// Same cell with both coupling capacitors removed.
inline CircuitSpec uncoupled_cell() {
  auto s = ft_cell();
  for (auto& c : s.couplings) c.capacitance = 0.0;
  return s;
}

}  // namespace fluxtrans::testing
