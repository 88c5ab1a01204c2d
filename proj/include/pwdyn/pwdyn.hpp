// Copyright 2026 The pwdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header for the whole library.

#pragma once

#include "pwdyn/dense_engine.hpp"
#include "pwdyn/errors.hpp"
#include "pwdyn/experiments.hpp"
#include "pwdyn/gate_analysis.hpp"
#include "pwdyn/io.hpp"
#include "pwdyn/lattice.hpp"
#include "pwdyn/mc_engine.hpp"
#include "pwdyn/mean_field.hpp"
#include "pwdyn/mps_engine.hpp"
#include "pwdyn/parallel.hpp"
#include "pwdyn/rng.hpp"
#include "pwdyn/transfer_matrix.hpp"
