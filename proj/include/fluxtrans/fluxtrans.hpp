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
#include "fluxtrans/config.hpp"
#include "fluxtrans/drive_model.hpp"
#include "fluxtrans/error.hpp"
#include "fluxtrans/gate_metrics.hpp"
#include "fluxtrans/io.hpp"
#include "fluxtrans/linalg.hpp"
#include "fluxtrans/optimizer.hpp"
#include "fluxtrans/parallel.hpp"
#include "fluxtrans/propagation.hpp"
#include "fluxtrans/pulse.hpp"
#include "fluxtrans/quantization.hpp"
#include "fluxtrans/spectrum.hpp"
#include "fluxtrans/units.hpp"
