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
#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "edgenas/channel.hpp"
#include "edgenas/search_space.hpp"

namespace edgenas {

enum class Precision { kFp32, kFp16, kInt8 };

const char* precision_name(Precision p);  // "fp32", "fp16", "int8"
Precision parse_precision(std::string_view name);

// Accuracy lost when a model is deployed at a given precision, in percentage
// points. Defaults reflect the FP16 devices trailing the FP32/INT8 ones by
// 3.43 points on average.
struct PrecisionDeltas {
  double fp32 = 0.0;
  double fp16 = 3.43;
  double int8 = 0.0;

  double of(Precision p) const;
};

enum class AccuracySource { kSurrogate, kExternal };

struct AccuracyResult {
  double accuracy_pct = 0.0;
  AccuracySource source = AccuracySource::kSurrogate;
  Configuration config;
  Precision precision = Precision::kFp32;
};

class AccuracyEvaluator {
 public:
  virtual ~AccuracyEvaluator() = default;
  virtual AccuracyResult evaluate(const Configuration& config, Precision precision) = 0;
};

inline constexpr double kSurrogateMinPct = 88.32;
inline constexpr double kSurrogateMaxPct = 99.49;

// Deterministic stand-in for training. With x_i the grid position of each
// active parameter scaled to [0, 1]:
//
//   s    = bias + sum_i a_i cos(2 pi (b_i x_i + phi_i)) + depth_reward (block - 2) / 2
//   base = 88.32 + 11.17 logistic(s)
//   acc  = clamp(base - delta(precision), 88.32, 99.49)
//
// a_i, b_i, phi_i are drawn once from `seed`. The amplitudes are normalised so
// that s never drops below bias - amplitude_sum, which keeps the default FP16
// delta clear of the lower clamp.
class SurrogateEvaluator final : public AccuracyEvaluator {
 public:
  static constexpr double kBias = 1.6;
  static constexpr double kAmplitudeSum = 2.4;
  static constexpr double kDepthReward = 0.3;

  SurrogateEvaluator(SearchSpace space, std::uint64_t seed, PrecisionDeltas deltas = {});

  AccuracyResult evaluate(const Configuration& config, Precision precision) override;

  // Accuracy for an explicit delta; throws ValidationError on an invalid config.
  double accuracy(const Configuration& config, double delta_pct) const;
  const PrecisionDeltas& deltas() const { return deltas_; }

 private:
  struct Term {
    double amplitude;
    double frequency;
    double phase;
  };

  SearchSpace space_;
  PrecisionDeltas deltas_;
  std::array<Term, 9> terms_{};  // indexed by Param; Block's entry is unused
};

AccuracyResult surrogate_accuracy(const Configuration& config, Precision precision,
                                  std::uint64_t surrogate_seed,
                                  const SearchSpace& space = full_space(),
                                  PrecisionDeltas deltas = {});

// Sends one evaluate request and returns the reported accuracy.
// Errors: TimeoutError, ProtocolError (raw line attached), ResponseRangeError
// for accuracies outside [0, 100], ChannelError when the process is gone.
AccuracyResult evaluate_external(const Configuration& config, Precision precision,
                                 RpcClient& client);

// Owns a spawned evaluator process.
class ExternalEvaluator final : public AccuracyEvaluator {
 public:
  ExternalEvaluator(const std::string& command_line, std::chrono::milliseconds timeout);

  AccuracyResult evaluate(const Configuration& config, Precision precision) override;

 private:
  std::unique_ptr<ProcessChannel> channel_;
  RpcClient client_;
};

}  // namespace edgenas
