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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgenas/random.hpp"

namespace edgenas {

// Identifies one dimension of the configuration grid.
enum class Param { kBlock, kK1, kK2, kK3, kK4, kFc1, kDo1, kFc2, kDo2 };

inline constexpr std::array<Param, 9> kAllParams = {Param::kBlock, Param::kK1,  Param::kK2,
                                                    Param::kK3,    Param::kK4,  Param::kFc1,
                                                    Param::kDo1,   Param::kFc2, Param::kDo2};

// "Block", "K1", ..., "DO2".
const char* param_label(Param p);
// "block", "k1", ..., "do2" (keys of the space file).
const char* param_key(Param p);
bool is_dropout(Param p);

// Integer grid lo, lo + step, ..., hi. Dropout probabilities are stored in
// hundredths so grid membership is exact.
struct ParamSpec {
  std::string name;
  int lo = 0;
  int hi = 0;
  int step = 1;
  // Minimum Block value for which the parameter exists.
  std::optional<int> active_when;

  int grid_size() const { return (hi - lo) / step + 1; }
  bool on_grid(int value) const { return value >= lo && value <= hi && (value - lo) % step == 0; }
  int value_at(int position) const { return lo + position * step; }
  int position_of(int value) const { return (value - lo) / step; }
  std::vector<int> grid() const;
  // "6..16 step 2", or "0.10..0.30 step 0.01" for dropout.
  std::string describe_grid(bool hundredths) const;
};

// One point of the grid. Inactive kernel counts are absent, never zero.
struct Configuration {
  int block = 2;
  int k1 = 0;
  int k2 = 0;
  std::optional<int> k3;
  std::optional<int> k4;
  int fc1 = 0;
  int do1 = 0;  // hundredths
  int fc2 = 0;
  int do2 = 0;  // hundredths
  int output_classes = 7;

  bool operator==(const Configuration&) const = default;

  std::optional<int> get(Param p) const;
  // Kernel counts of the active blocks, in order.
  std::vector<int> kernels() const;
};

class SearchSpace {
 public:
  // Prefer build_space(); this constructor performs the same checks.
  SearchSpace(std::array<ParamSpec, 9> specs, int output_classes);

  const ParamSpec& spec(Param p) const { return specs_[static_cast<std::size_t>(p)]; }
  int output_classes() const { return output_classes_; }
  bool is_active(Param p, int block) const;
  std::vector<int> block_values() const { return spec(Param::kBlock).grid(); }

 private:
  std::array<ParamSpec, 9> specs_;
  int output_classes_;
};

// Builds a space from named specs ("Block", "K1", ... or lower-case keys).
// Throws ValidationError naming the offending parameter.
SearchSpace build_space(std::span<const ParamSpec> specs, int output_classes = 7);

// The grid of the network configuration table: Block 2..4, K1 6..16/2,
// K2 24..32/4, K3 36..48/4, K4 52..64/4, FC1 100..120/5, FC2 80..100/5,
// DO1/DO2 0.10..0.30/0.01.
SearchSpace full_space();

// Number of distinct valid configurations (conditional K3/K4 counting).
std::uint64_t cardinality(const SearchSpace& space);

// Count if K3/K4 were independent of Block (every block value times the
// full K1..K4 grid product). Reported alongside cardinality().
std::uint64_t unconditional_cardinality(const SearchSpace& space);

struct Verdict {
  bool valid = true;
  std::vector<std::string> reasons;
};

Verdict validate(const Configuration& config, const SearchSpace& space);

// Canonical block-major mixed-radix order: blocks ascending, then K1..K_last,
// FC1, DO1, FC2, DO2 with the last varying fastest.
Configuration config_from_index(const SearchSpace& space, std::uint64_t index);
std::uint64_t index_of(const SearchSpace& space, const Configuration& config);

Configuration sample_uniform(const SearchSpace& space, Rng& rng);

// "{block:2, k1:16, k2:24, fc1:100, do1:0.20, fc2:80, do2:0.14}"
std::string to_string(const Configuration& config);

}  // namespace edgenas
