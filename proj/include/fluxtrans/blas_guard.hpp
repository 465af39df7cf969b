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

#include <unistd.h>

#include <cstdlib>
#include <iostream>

#include "fluxtrans/linalg.hpp"

namespace fluxtrans {

/// Restarts the current process with OPENBLAS_CORETYPE=Haswell when the
/// auto-selected OpenBLAS kernel produces wrong results on this CPU. The
/// kernel is chosen when the library loads, so the setting only takes effect
/// in a fresh process. Does nothing when the variable is already set or the
/// probe passes. Results are correct either way; the restart only avoids the
/// slower fallback solver.
inline void ensure_reliable_blas_kernel(char** argv) {
  if (std::getenv("OPENBLAS_CORETYPE") != nullptr) return;
  if (lapack_eigensolver_is_reliable()) return;
  ::setenv("OPENBLAS_CORETYPE", "Haswell", 1);
  ::execv("/proc/self/exe", argv);
  std::cerr << "warning: BLAS kernel check failed and re-exec was not possible; using the fallback eigensolver\n";
}

}  // namespace fluxtrans
