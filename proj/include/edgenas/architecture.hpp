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
#include <string>
#include <vector>

#include "edgenas/search_space.hpp"

namespace edgenas {

enum class LayerKind { kConv3x3, kRelu, kMaxPool2x2, kFlatten, kFullyConnected, kDropout, kSoftmax };

const char* layer_kind_name(LayerKind kind);

// (height, width, channels) for feature maps, (units) after flatten.
using Shape = std::vector<std::int64_t>;

struct LayerDescriptor {
  LayerKind kind;
  Shape in_shape;
  Shape out_shape;
  std::int64_t params = 0;
  std::int64_t macs = 0;
};

inline constexpr std::int64_t kInputSide = 48;

// The VGG-style stack for one configuration:
//   (conv relu conv relu maxpool) x block, flatten, (fc relu dropout) x 2, fc, softmax
// Convolutions are 3x3, stride 1, size-preserving padding; pooling is 2x2/2.
struct ArchitectureDescriptor {
  Configuration config;
  Shape input_shape{kInputSide, kInputSide, 1};
  std::vector<LayerDescriptor> layers;
  std::int64_t total_params = 0;
  std::int64_t total_macs = 0;
  int weighted_layer_count = 0;

  std::int64_t conv_macs() const;
  std::int64_t fc_macs() const;
};

// Structural build: requires 2 <= block <= 4, the matching kernel counts
// present, and positive widths, but does not require grid membership.
// Published configurations that sit outside the grid still compile.
ArchitectureDescriptor build_architecture(const Configuration& config);

// Validates against `space` first; throws ValidationError with the reasons.
ArchitectureDescriptor build_architecture(const Configuration& config, const SearchSpace& space);

std::int64_t count_params(const ArchitectureDescriptor& arch);
std::int64_t count_macs(const ArchitectureDescriptor& arch);
int count_layers(const Configuration& config);

}  // namespace edgenas
