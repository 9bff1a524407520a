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

#include "edgenas/evaluators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "edgenas/errors.hpp"
#include "edgenas/json_io.hpp"

namespace edgenas {

const char* precision_name(Precision p) {
  switch (p) {
    case Precision::kFp32: return "fp32";
    case Precision::kFp16: return "fp16";
    case Precision::kInt8: return "int8";
  }
  return "fp32";
}

Precision parse_precision(std::string_view name) {
  if (name == "fp32") return Precision::kFp32;
  if (name == "fp16") return Precision::kFp16;
  if (name == "int8") return Precision::kInt8;
  throw ValidationError("unknown precision: " + std::string(name));
}

double PrecisionDeltas::of(Precision p) const {
  switch (p) {
    case Precision::kFp32: return fp32;
    case Precision::kFp16: return fp16;
    case Precision::kInt8: return int8;
  }
  return 0.0;
}

SurrogateEvaluator::SurrogateEvaluator(SearchSpace space, std::uint64_t seed,
                                       PrecisionDeltas deltas)
    : space_(std::move(space)), deltas_(deltas) {
  Rng rng = stream_rng(seed, 0x5u);
  double amplitude_total = 0.0;
  for (Param p : kAllParams) {
    if (p == Param::kBlock) continue;
    auto& t = terms_[static_cast<std::size_t>(p)];
    t.amplitude = uniform_real(rng, 0.5, 1.0);
    t.frequency = uniform_real(rng, 0.5, 1.5);
    t.phase = uniform_unit(rng);
    amplitude_total += t.amplitude;
  }
  for (auto& t : terms_) t.amplitude *= kAmplitudeSum / amplitude_total;
}

double SurrogateEvaluator::accuracy(const Configuration& config, double delta_pct) const {
  const Verdict v = validate(config, space_);
  if (!v.valid) throw ValidationError("invalid configuration: " + v.reasons.front());
  double s = kBias + kDepthReward * (config.block - 2) / 2.0;
  for (Param p : kAllParams) {
    if (p == Param::kBlock) continue;
    const auto value = config.get(p);
    if (!value) continue;
    const auto& spec = space_.spec(p);
    const double x = spec.grid_size() > 1
                         ? static_cast<double>(spec.position_of(*value)) / (spec.grid_size() - 1)
                         : 0.0;
    const auto& t = terms_[static_cast<std::size_t>(p)];
    s += t.amplitude * std::cos(2.0 * std::numbers::pi * (t.frequency * x + t.phase));
  }
  const double base =
      kSurrogateMinPct + (kSurrogateMaxPct - kSurrogateMinPct) / (1.0 + std::exp(-s));
  return std::clamp(base - delta_pct, kSurrogateMinPct, kSurrogateMaxPct);
}

AccuracyResult SurrogateEvaluator::evaluate(const Configuration& config, Precision precision) {
  return {accuracy(config, deltas_.of(precision)), AccuracySource::kSurrogate, config, precision};
}

AccuracyResult surrogate_accuracy(const Configuration& config, Precision precision,
                                  std::uint64_t surrogate_seed, const SearchSpace& space,
                                  PrecisionDeltas deltas) {
  SurrogateEvaluator eval(space, surrogate_seed, deltas);
  return eval.evaluate(config, precision);
}

AccuracyResult evaluate_external(const Configuration& config, Precision precision,
                                 RpcClient& client) {
  nlohmann::json request = {{"cmd", "evaluate"},
                            {"config", config_to_json(config)},
                            {"precision", precision_name(precision)}};
  const nlohmann::json reply = client.call(std::move(request));
  const auto it = reply.find("accuracy_pct");
  if (it == reply.end() || !it->is_number()) {
    throw ProtocolError("response lacks numeric accuracy_pct", reply.dump());
  }
  const double acc = it->get<double>();
  if (!std::isfinite(acc) || acc < 0.0 || acc > 100.0) {
    throw ResponseRangeError("accuracy_pct " + std::to_string(acc) + " outside [0, 100]",
                             reply.dump());
  }
  return {acc, AccuracySource::kExternal, config, precision};
}

ExternalEvaluator::ExternalEvaluator(const std::string& command_line,
                                     std::chrono::milliseconds timeout)
    : channel_(std::make_unique<ProcessChannel>(command_line)), client_(*channel_, timeout) {}

AccuracyResult ExternalEvaluator::evaluate(const Configuration& config, Precision precision) {
  return evaluate_external(config, precision, client_);
}

}  // namespace edgenas
