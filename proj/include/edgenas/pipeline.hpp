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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "edgenas/devices.hpp"
#include "edgenas/evaluators.hpp"
#include "edgenas/json_io.hpp"
#include "edgenas/search_space.hpp"
#include "edgenas/tpe.hpp"

namespace edgenas {

class TrialLog;

// accuracy: %; accuracy_per_latency: % per ms; accuracy_per_pdp: % per mJ
// where PDP = dynamic power (W) x latency (ms).
enum class FitnessKind { kAccuracy, kAccuracyPerLatency, kAccuracyPerPdp };

const char* fitness_name(FitnessKind kind);
FitnessKind parse_fitness(const std::string& name);

// Throws ValidationError when a required denominator is missing or not positive.
double fitness(double accuracy_pct, std::optional<double> latency_ms,
               std::optional<double> power_w, FitnessKind kind);

struct TrialRecord {
  Configuration config;
  int stage = 1;
  std::optional<std::string> device;
  std::optional<double> accuracy_pct;  // absent for failed trials
  std::optional<double> latency_mean_ms;
  std::optional<double> latency_std_ms;
  std::optional<double> dynamic_power_w;
  FitnessKind fitness_kind = FitnessKind::kAccuracy;
  std::optional<double> fitness_value;
  std::uint64_t seed = 0;
  std::string timestamp;  // RFC 3339, empty when disabled
  std::string error;

  bool failed() const { return !accuracy_pct.has_value(); }
  // Recomputes the fitness from the stored metrics.
  double recompute_fitness() const;
};

Json record_to_json(const TrialRecord& record);
TrialRecord record_from_json(const Json& j);

// Descending by fitness; ties go to lower latency, then fewer parameters,
// then the lower canonical configuration index.
struct RankedSet {
  FitnessKind fitness = FitnessKind::kAccuracy;
  std::size_t k = 0;
  std::vector<TrialRecord> records;
};

RankedSet rank_records(std::vector<TrialRecord> records, FitnessKind kind, std::size_t k,
                       const SearchSpace& space);

Json ranked_set_to_json(const RankedSet& set);
RankedSet ranked_set_from_json(const Json& j);

struct StageContext {
  std::uint64_t seed = 0;
  TrialLog* log = nullptr;  // optional persistence and resume source
  bool timestamps = true;
  bool parallel_devices = true;
};

// Stage 1: TPE on accuracy, keep the best `keep` unique successful trials.
// Every fresh trial (failures included) is appended to the log.
RankedSet stage1(const SearchSpace& space, AccuracyEvaluator& evaluator,
                 const TpeSettings& settings, std::size_t budget, std::size_t keep,
                 const StageContext& ctx);

// Opens one backend per device; each device is measured through its own.
struct Measurer {
  MeasurementProtocol protocol;
  std::function<std::unique_ptr<MeasurementBackend>(const DeviceProfile&)> open;

  static Measurer simulated(MeasurementProtocol protocol = {});
};

struct Stage2Result {
  std::map<std::string, RankedSet> ranked;                      // top keep per device
  std::map<std::string, std::vector<TrialRecord>> measured;     // every successful pair
  std::size_t measurements = 0;
};

// Stage 2: every (device, candidate) pair is measured; accuracy is the
// stage-1 accuracy minus the device's precision delta.
Stage2Result stage2(const RankedSet& candidates, const std::vector<DeviceProfile>& devices,
                    const Measurer& measurer, std::size_t keep_per_device,
                    const SearchSpace& space, const StageContext& ctx);

struct Stage3Result {
  std::map<std::string, TrialRecord> winners;
  std::map<std::string, std::vector<TrialRecord>> measured;
};

// Stage 3: dynamic power for every stage-2 survivor, ranked by accuracy/PDP.
Stage3Result stage3(const std::map<std::string, RankedSet>& per_device,
                    const std::vector<DeviceProfile>& devices, const Measurer& measurer,
                    const SearchSpace& space, const StageContext& ctx);

struct PipelineOptions {
  std::size_t budget = 2000;
  std::size_t keep1 = 1000;
  std::size_t keep2 = 10;
};

struct PipelineResult {
  RankedSet stage1;
  Stage2Result stage2;
  Stage3Result stage3;
};

PipelineResult run_pipeline(const SearchSpace& space, AccuracyEvaluator& evaluator,
                            const TpeSettings& settings, const std::vector<DeviceProfile>& devices,
                            const Measurer& measurer, const PipelineOptions& options,
                            const StageContext& ctx);

Json stage2_to_json(const Stage2Result& result);
std::map<std::string, RankedSet> stage2_from_json(const Json& j);
Json stage3_to_json(const Stage3Result& result);
std::map<std::string, TrialRecord> stage3_from_json(const Json& j);

std::string now_rfc3339();

}  // namespace edgenas
