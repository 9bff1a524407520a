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

#include "edgenas/architecture.hpp"

#include <numeric>

#include "edgenas/errors.hpp"

namespace edgenas {
namespace {

class StackBuilder {
 public:
  explicit StackBuilder(ArchitectureDescriptor& arch) : arch_(arch), shape_(arch.input_shape) {}

  void conv(std::int64_t filters) {
    const std::int64_t in_ch = shape_[2];
    Shape out{shape_[0], shape_[1], filters};
    push(LayerKind::kConv3x3, out, 9 * in_ch * filters + filters,
         out[0] * out[1] * 9 * in_ch * filters);
  }
  void fc(std::int64_t units) {
    const std::int64_t in = shape_[0];
    push(LayerKind::kFullyConnected, {units}, in * units + units, in * units);
  }
  void pool() { push(LayerKind::kMaxPool2x2, {shape_[0] / 2, shape_[1] / 2, shape_[2]}, 0, 0); }
  void flatten() { push(LayerKind::kFlatten, {shape_[0] * shape_[1] * shape_[2]}, 0, 0); }
  void passthrough(LayerKind kind) { push(kind, shape_, 0, 0); }

 private:
  void push(LayerKind kind, Shape out, std::int64_t params, std::int64_t macs) {
    arch_.layers.push_back({kind, shape_, out, params, macs});
    shape_ = std::move(out);
  }

  ArchitectureDescriptor& arch_;
  Shape shape_;
};

}  // namespace

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv3x3: return "conv3x3";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kMaxPool2x2: return "maxpool2x2";
    case LayerKind::kFlatten: return "flatten";
    case LayerKind::kFullyConnected: return "fully_connected";
    case LayerKind::kDropout: return "dropout";
    case LayerKind::kSoftmax: return "softmax";
  }
  return "unknown";
}

std::int64_t ArchitectureDescriptor::conv_macs() const {
  std::int64_t total = 0;
  for (const auto& l : layers) {
    if (l.kind == LayerKind::kConv3x3) total += l.macs;
  }
  return total;
}

std::int64_t ArchitectureDescriptor::fc_macs() const {
  std::int64_t total = 0;
  for (const auto& l : layers) {
    if (l.kind == LayerKind::kFullyConnected) total += l.macs;
  }
  return total;
}

ArchitectureDescriptor build_architecture(const Configuration& config) {
  if (config.block < 2 || config.block > 4) {
    throw ValidationError("block must be 2, 3 or 4, got " + std::to_string(config.block));
  }
  if (config.k3.has_value() != (config.block >= 3) || config.k4.has_value() != (config.block == 4)) {
    throw ValidationError("kernel counts do not match block=" + std::to_string(config.block));
  }
  const std::vector<int> kernels = config.kernels();
  for (int k : kernels) {
    if (k <= 0) throw ValidationError("kernel counts must be positive");
  }
  if (config.fc1 <= 0 || config.fc2 <= 0 || config.output_classes <= 0) {
    throw ValidationError("layer widths must be positive");
  }

  ArchitectureDescriptor arch;
  arch.config = config;
  StackBuilder b(arch);
  for (int k : kernels) {
    b.conv(k);
    b.passthrough(LayerKind::kRelu);
    b.conv(k);
    b.passthrough(LayerKind::kRelu);
    b.pool();
  }
  b.flatten();
  for (int units : {config.fc1, config.fc2}) {
    b.fc(units);
    b.passthrough(LayerKind::kRelu);
    b.passthrough(LayerKind::kDropout);
  }
  b.fc(config.output_classes);
  b.passthrough(LayerKind::kSoftmax);

  for (const auto& l : arch.layers) {
    arch.total_params += l.params;
    arch.total_macs += l.macs;
    if (l.kind == LayerKind::kConv3x3 || l.kind == LayerKind::kFullyConnected) {
      ++arch.weighted_layer_count;
    }
  }
  return arch;
}

ArchitectureDescriptor build_architecture(const Configuration& config, const SearchSpace& space) {
  const Verdict v = validate(config, space);
  if (!v.valid) {
    std::string msg = "invalid configuration:";
    for (const auto& r : v.reasons) msg += " " + r + ";";
    throw ValidationError(msg);
  }
  return build_architecture(config);
}

std::int64_t count_params(const ArchitectureDescriptor& arch) {
  return std::accumulate(arch.layers.begin(), arch.layers.end(), std::int64_t{0},
                         [](std::int64_t acc, const LayerDescriptor& l) { return acc + l.params; });
}

std::int64_t count_macs(const ArchitectureDescriptor& arch) {
  return std::accumulate(arch.layers.begin(), arch.layers.end(), std::int64_t{0},
                         [](std::int64_t acc, const LayerDescriptor& l) { return acc + l.macs; });
}

int count_layers(const Configuration& config) { return 2 * config.block + 3; }

}  // namespace edgenas
