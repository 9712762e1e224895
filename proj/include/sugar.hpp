// Copyright 2026 The SUGAR Authors.
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

// Umbrella header.

#pragma once

#include "sugar/bench.hpp"
#include "sugar/block_error.hpp"
#include "sugar/error.hpp"
#include "sugar/gcn.hpp"
#include "sugar/graph.hpp"
#include "sugar/io.hpp"
#include "sugar/matrix.hpp"
#include "sugar/multilevel.hpp"
#include "sugar/partition.hpp"
#include "sugar/report.hpp"
#include "sugar/rng.hpp"
#include "sugar/synth.hpp"
#include "sugar/trainer.hpp"
#include "sugar/verifier.hpp"
