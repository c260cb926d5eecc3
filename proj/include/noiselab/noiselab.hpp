// Copyright 2026 The noise-lab Authors.
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

#ifndef NOISELAB_NOISELAB_HPP_
#define NOISELAB_NOISELAB_HPP_

#include "noiselab/efron_stein.hpp"
#include "noiselab/error.hpp"
#include "noiselab/noise.hpp"
#include "noiselab/rng.hpp"
#include "noiselab/space.hpp"
#include "noiselab/towers.hpp"
#include "noiselab/zp_walk.hpp"

#endif  // NOISELAB_NOISELAB_HPP_
