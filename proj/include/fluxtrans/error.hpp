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

#include <stdexcept>
#include <string>

namespace fluxtrans {

enum class ErrorCode {
  InvalidSpec,
  NonPositiveDefinite,
  FreeModeCoupled,
  SingularMatrix,
  InvalidTruncation,
  GaugeMismatch,
  DimensionOverflow,
  NoConvergence,
  AmbiguousLabel,
  MissingLabel,
  NoSignChange,
  ExpansionDomain,
  DegenerateDenominator,
  NegativeDiscriminant,
  ZeroCoupling,
  NoResonanceInBracket,
  BadRamp,
  StepFailure,
  UnitarityLoss,
  MissingRate,
  BadIndex,
  Config,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::NonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorCode::FreeModeCoupled: return "FreeModeCoupled";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::InvalidTruncation: return "InvalidTruncation";
    case ErrorCode::GaugeMismatch: return "GaugeMismatch";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::AmbiguousLabel: return "AmbiguousLabel";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::ExpansionDomain: return "ExpansionDomain";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::NegativeDiscriminant: return "NegativeDiscriminant";
    case ErrorCode::ZeroCoupling: return "ZeroCoupling";
    case ErrorCode::NoResonanceInBracket: return "NoResonanceInBracket";
    case ErrorCode::BadRamp: return "BadRamp";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::UnitarityLoss: return "UnitarityLoss";
    case ErrorCode::MissingRate: return "MissingRate";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fluxtrans
