/* Copyright 2026 The edgenas Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace edgenas {

// mt19937_64 output is fully specified by the standard, unlike the library
// distributions, so all draws go through the helpers below to stay
// reproducible across standard library implementations.
using Rng = std::mt19937_64;

// Independent generator for (seed, stream); streams are used to make the
// i-th draw of a sequence a pure function of (seed, i).
Rng stream_rng(std::uint64_t seed, std::uint64_t stream);

// Uniform integer in [0, n). n must be > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

// Uniform real in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

double uniform_real(Rng& rng, double lo, double hi);

double standard_normal(Rng& rng);

// FNV-1a; stable hash used to derive per-item seeds.
std::uint64_t stable_hash(std::string_view bytes, std::uint64_t basis = 14695981039346656037ull);

}  // namespace edgenas
