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

#include "edgenas/search_space.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "edgenas/errors.hpp"

namespace edgenas {
namespace {

constexpr std::array<const char*, 9> kLabels = {"Block", "K1",  "K2", "K3", "K4",
                                                "FC1",   "DO1", "FC2", "DO2"};
constexpr std::array<const char*, 9> kKeys = {"block", "k1",  "k2",  "k3", "k4",
                                              "fc1",   "do1", "fc2", "do2"};

std::size_t slot(Param p) { return static_cast<std::size_t>(p); }

std::string hundredths(int v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%d.%02d", v / 100, v % 100);
  return buf;
}

std::string render(Param p, int v) { return is_dropout(p) ? hundredths(v) : std::to_string(v); }

void check_spec(const ParamSpec& s) {
  if (s.step <= 0) throw ValidationError("invalid step: " + s.name);
  if (s.lo > s.hi) throw ValidationError("invalid range: " + s.name);
  if ((s.hi - s.lo) % s.step != 0) throw ValidationError("grid misaligned: " + s.name);
}

// Kernel parameters active for a given block count.
std::vector<Param> active_kernels(int block) {
  static constexpr std::array<Param, 4> all = {Param::kK1, Param::kK2, Param::kK3, Param::kK4};
  return {all.begin(), all.begin() + std::clamp(block, 0, 4)};
}

constexpr std::array<Param, 4> kHeadParams = {Param::kFc1, Param::kDo1, Param::kFc2,
                                              Param::kDo2};

std::uint64_t head_cardinality(const SearchSpace& space) {
  std::uint64_t n = 1;
  for (Param p : kHeadParams) n *= space.spec(p).grid_size();
  return n;
}

std::uint64_t block_cardinality(const SearchSpace& space, int block) {
  std::uint64_t n = head_cardinality(space);
  for (Param p : active_kernels(block)) n *= space.spec(p).grid_size();
  return n;
}

}  // namespace

const char* param_label(Param p) { return kLabels[slot(p)]; }
const char* param_key(Param p) { return kKeys[slot(p)]; }
bool is_dropout(Param p) { return p == Param::kDo1 || p == Param::kDo2; }

std::vector<int> ParamSpec::grid() const {
  std::vector<int> values;
  values.reserve(static_cast<std::size_t>(grid_size()));
  for (int v = lo; v <= hi; v += step) values.push_back(v);
  return values;
}

std::string ParamSpec::describe_grid(bool as_hundredths) const {
  auto r = [&](int v) { return as_hundredths ? hundredths(v) : std::to_string(v); };
  return r(lo) + ".." + r(hi) + " step " + r(step);
}

std::optional<int> Configuration::get(Param p) const {
  switch (p) {
    case Param::kBlock: return block;
    case Param::kK1: return k1;
    case Param::kK2: return k2;
    case Param::kK3: return k3;
    case Param::kK4: return k4;
    case Param::kFc1: return fc1;
    case Param::kDo1: return do1;
    case Param::kFc2: return fc2;
    case Param::kDo2: return do2;
  }
  return std::nullopt;
}

std::vector<int> Configuration::kernels() const {
  std::vector<int> ks{k1, k2};
  if (k3) ks.push_back(*k3);
  if (k4) ks.push_back(*k4);
  return ks;
}

SearchSpace::SearchSpace(std::array<ParamSpec, 9> specs, int output_classes)
    : specs_(std::move(specs)), output_classes_(output_classes) {
  for (const auto& s : specs_) check_spec(s);
  const auto& b = spec(Param::kBlock);
  if (b.lo < 2 || b.hi > 4) throw ValidationError("Block range must lie within 2..4");
  for (Param p : kAllParams) {
    if (p != Param::kBlock && spec(p).lo <= 0) {
      throw ValidationError(std::string("non-positive grid: ") + param_label(p));
    }
  }
  if (spec(Param::kDo1).hi >= 100 || spec(Param::kDo2).hi >= 100) {
    throw ValidationError("dropout probability must be below 1.00");
  }
  if (output_classes_ <= 0) throw ValidationError("output_classes must be positive");
  specs_[slot(Param::kK3)].active_when = 3;
  specs_[slot(Param::kK4)].active_when = 4;
}

bool SearchSpace::is_active(Param p, int block) const {
  const auto& when = spec(p).active_when;
  return !when || block >= *when;
}

SearchSpace build_space(std::span<const ParamSpec> specs, int output_classes) {
  std::array<std::optional<ParamSpec>, 9> found;
  for (const auto& s : specs) {
    auto match = std::find_if(kAllParams.begin(), kAllParams.end(), [&](Param p) {
      return s.name == param_label(p) || s.name == param_key(p);
    });
    if (match == kAllParams.end()) throw ValidationError("unknown parameter: " + s.name);
    auto& entry = found[slot(*match)];
    if (entry) throw ValidationError("duplicate parameter: " + s.name);
    entry = s;
    entry->name = param_label(*match);
  }
  std::array<ParamSpec, 9> all;
  for (Param p : kAllParams) {
    if (!found[slot(p)]) throw ValidationError(std::string("missing parameter: ") + param_label(p));
    all[slot(p)] = *found[slot(p)];
  }
  return SearchSpace(std::move(all), output_classes);
}

SearchSpace full_space() {
  const std::array<ParamSpec, 9> specs = {{{"Block", 2, 4, 1, {}},
                                           {"K1", 6, 16, 2, {}},
                                           {"K2", 24, 32, 4, {}},
                                           {"K3", 36, 48, 4, {}},
                                           {"K4", 52, 64, 4, {}},
                                           {"FC1", 100, 120, 5, {}},
                                           {"DO1", 10, 30, 1, {}},
                                           {"FC2", 80, 100, 5, {}},
                                           {"DO2", 10, 30, 1, {}}}};
  return build_space(specs, 7);
}

std::uint64_t cardinality(const SearchSpace& space) {
  std::uint64_t total = 0;
  for (int b : space.block_values()) total += block_cardinality(space, b);
  return total;
}

std::uint64_t unconditional_cardinality(const SearchSpace& space) {
  std::uint64_t n = space.spec(Param::kBlock).grid_size() * head_cardinality(space);
  for (Param p : active_kernels(4)) n *= space.spec(p).grid_size();
  return n;
}

Verdict validate(const Configuration& c, const SearchSpace& space) {
  Verdict v;
  auto fail = [&](std::string reason) {
    v.valid = false;
    v.reasons.push_back(std::move(reason));
  };
  const auto& block_spec = space.spec(Param::kBlock);
  if (!block_spec.on_grid(c.block)) {
    fail("Block=" + std::to_string(c.block) + " off-grid (" + block_spec.describe_grid(false) + ")");
  }
  for (Param p : kAllParams) {
    if (p == Param::kBlock) continue;
    const auto value = c.get(p);
    const bool active = space.is_active(p, c.block);
    const std::string label = param_label(p);
    if (!active) {
      if (value) fail(label + " inactive for block=" + std::to_string(c.block));
      continue;
    }
    if (!value) {
      fail(label + " missing for block=" + std::to_string(c.block));
      continue;
    }
    const auto& s = space.spec(p);
    if (!s.on_grid(*value)) {
      fail(label + "=" + render(p, *value) + " off-grid (" + s.describe_grid(is_dropout(p)) + ")");
    }
  }
  if (c.output_classes != space.output_classes()) {
    fail("output_classes=" + std::to_string(c.output_classes) + " differs from space (" +
         std::to_string(space.output_classes()) + ")");
  }
  return v;
}

Configuration config_from_index(const SearchSpace& space, std::uint64_t index) {
  const std::uint64_t total = cardinality(space);
  if (index >= total) {
    throw RangeError("configuration index " + std::to_string(index) + " out of range [0, " +
                     std::to_string(total) + ")");
  }
  Configuration c;
  c.output_classes = space.output_classes();
  for (int b : space.block_values()) {
    const std::uint64_t n = block_cardinality(space, b);
    if (index >= n) {
      index -= n;
      continue;
    }
    c.block = b;
    std::vector<Param> order = active_kernels(b);
    order.insert(order.end(), kHeadParams.begin(), kHeadParams.end());
    // Peel digits from the least significant end.
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto& s = space.spec(*it);
      const auto radix = static_cast<std::uint64_t>(s.grid_size());
      const int value = s.value_at(static_cast<int>(index % radix));
      index /= radix;
      switch (*it) {
        case Param::kK1: c.k1 = value; break;
        case Param::kK2: c.k2 = value; break;
        case Param::kK3: c.k3 = value; break;
        case Param::kK4: c.k4 = value; break;
        case Param::kFc1: c.fc1 = value; break;
        case Param::kDo1: c.do1 = value; break;
        case Param::kFc2: c.fc2 = value; break;
        case Param::kDo2: c.do2 = value; break;
        case Param::kBlock: break;
      }
    }
    return c;
  }
  throw RangeError("configuration index out of range");  // unreachable
}

std::uint64_t index_of(const SearchSpace& space, const Configuration& config) {
  const Verdict v = validate(config, space);
  if (!v.valid) throw ValidationError("invalid configuration: " + v.reasons.front());
  std::uint64_t offset = 0;
  for (int b : space.block_values()) {
    if (b == config.block) break;
    offset += block_cardinality(space, b);
  }
  std::vector<Param> order = active_kernels(config.block);
  order.insert(order.end(), kHeadParams.begin(), kHeadParams.end());
  std::uint64_t local = 0;
  for (Param p : order) {
    const auto& s = space.spec(p);
    local = local * static_cast<std::uint64_t>(s.grid_size()) +
            static_cast<std::uint64_t>(s.position_of(*config.get(p)));
  }
  return offset + local;
}

Configuration sample_uniform(const SearchSpace& space, Rng& rng) {
  return config_from_index(space, uniform_index(rng, cardinality(space)));
}

std::string to_string(const Configuration& c) {
  std::ostringstream os;
  os << "{block:" << c.block << ", k1:" << c.k1 << ", k2:" << c.k2;
  if (c.k3) os << ", k3:" << *c.k3;
  if (c.k4) os << ", k4:" << *c.k4;
  os << ", fc1:" << c.fc1 << ", do1:" << hundredths(c.do1) << ", fc2:" << c.fc2
     << ", do2:" << hundredths(c.do2) << "}";
  return os.str();
}

}  // namespace edgenas
