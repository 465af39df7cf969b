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

// Unit system: energies in GHz (h = 1), times in ns, capacitances in fF,
// fluxes as reduced phases in radians.

namespace fluxtrans::units {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double elementary_charge = 1.602176634e-19;  // C, exact SI
inline constexpr double planck = 6.62607015e-34;              // J s, exact SI

/// e^2 / (2h) expressed in GHz * fF.
inline constexpr double charging_constant =
    elementary_charge * elementary_charge / (2.0 * planck) / 1e-15 / 1e9;

inline constexpr double ghz_to_khz = 1e6;
inline constexpr double ghz_to_hz = 1e9;

}  // namespace fluxtrans::units
