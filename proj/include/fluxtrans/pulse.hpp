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
#include <vector>

#include "fluxtrans/error.hpp"
#include "fluxtrans/units.hpp"

namespace fluxtrans {

/// One flux-modulation tone with a flattop Gaussian envelope.
struct ToneSpec {
  double amplitude = 0.0;  // rad
  double frequency = 0.0;  // GHz (linear)
  double ramp = 0.0;       // ns
  double phase = 0.0;      // rad
};

struct PulseSpec {
  double dc_offset = units::pi / 2.0;
  std::vector<ToneSpec> tones;
  double gate_time = 0.0;  // ns

  void validate() const {
    if (!(gate_time > 0.0)) throw Error(ErrorCode::InvalidSpec, "gate time must be positive");
    if (tones.empty() || tones.size() > 2) throw Error(ErrorCode::InvalidSpec, "a pulse carries one or two tones");
    if (!(dc_offset >= 0.0 && dc_offset < units::two_pi)) throw Error(ErrorCode::InvalidSpec, "dc offset outside [0, 2pi)");
    for (const auto& t : tones) {
      if (!(t.amplitude >= 0.0)) throw Error(ErrorCode::InvalidSpec, "tone amplitude must be non-negative");
      if (!(t.frequency > 0.0)) throw Error(ErrorCode::InvalidSpec, "tone frequency must be positive");
      if (!(t.ramp >= 0.0) || 2.0 * t.ramp > gate_time) throw Error(ErrorCode::BadRamp, "ramp longer than half the gate");
    }
  }
};

/// Ramp width as a multiple of the Gaussian standard deviation.
inline constexpr double ramp_sigmas = 2.5;

/// Flattop Gaussian: Gaussian rise centred at t = tau with sigma = tau/2.5,
/// unit plateau on [tau, T - tau], mirrored fall.
inline double flattop_gaussian(double t, double gate_time, double tau) {
  if (2.0 * tau > gate_time) throw Error(ErrorCode::BadRamp, "ramp longer than half the gate");
  if (tau <= 0.0) return (t >= 0.0 && t <= gate_time) ? 1.0 : 0.0;
  const double sigma = tau / ramp_sigmas;
  double dt = 0.0;
  if (t < tau)
    dt = t - tau;
  else if (t > gate_time - tau)
    dt = t - (gate_time - tau);
  return std::exp(-dt * dt / (2.0 * sigma * sigma));
}

inline double tone_value(const ToneSpec& tone, double gate_time, double t) {
  return flattop_gaussian(t, gate_time, tone.ramp) * tone.amplitude *
         std::cos(units::two_pi * tone.frequency * t + tone.phase);
}

/// Coupler flux at time t.
inline double flux_waveform(const PulseSpec& p, double t) {
  double x = p.dc_offset;
  for (const auto& tone : p.tones) x += tone_value(tone, p.gate_time, t);
  return x;
}

}  // namespace fluxtrans
