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

#include "edgenas/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <future>
#include <limits>
#include <unordered_map>

#include "edgenas/architecture.hpp"
#include "edgenas/errors.hpp"
#include "edgenas/log.hpp"
#include "edgenas/trial_log.hpp"

namespace edgenas {
namespace {

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> opt_number(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw ValidationError(std::string(key) + " must be a number or null");
  return it->get<double>();
}

std::string stamp(const StageContext& ctx) { return ctx.timestamps ? now_rfc3339() : std::string(); }

const DeviceProfile& find_device(const std::vector<DeviceProfile>& devices, const std::string& name) {
  for (const auto& d : devices) {
    if (d.name == name) return d;
  }
  throw ValidationError("unknown device: " + name);
}

// Runs fn(i) for each device; results come back in device order whatever
// the completion order.
template <typename T, typename Fn>
std::vector<T> for_each_device(std::size_t n, bool parallel, Fn fn) {
  std::vector<T> out;
  out.reserve(n);
  if (!parallel || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(fn(i));
    return out;
  }
  std::vector<std::future<T>> futures;
  for (std::size_t i = 0; i < n; ++i) futures.push_back(std::async(std::launch::async, fn, i));
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

// Serves stage-1 accuracies already present in the log.
class ResumingEvaluator final : public AccuracyEvaluator {
 public:
  ResumingEvaluator(AccuracyEvaluator& inner, const TrialLog* log) : inner_(inner), log_(log) {}

  AccuracyResult evaluate(const Configuration& config, Precision precision) override {
    if (log_ != nullptr) {
      if (auto prior = log_->find(1, std::nullopt, config)) {
        if (prior->failed()) throw EvaluationError(prior->error);
        return {*prior->accuracy_pct, AccuracySource::kExternal, config, precision};
      }
    }
    return inner_.evaluate(config, precision);
  }

 private:
  AccuracyEvaluator& inner_;
  const TrialLog* log_;
};

}  // namespace

const char* fitness_name(FitnessKind kind) {
  switch (kind) {
    case FitnessKind::kAccuracy: return "accuracy";
    case FitnessKind::kAccuracyPerLatency: return "accuracy_per_latency";
    case FitnessKind::kAccuracyPerPdp: return "accuracy_per_pdp";
  }
  return "accuracy";
}

FitnessKind parse_fitness(const std::string& name) {
  if (name == "accuracy") return FitnessKind::kAccuracy;
  if (name == "accuracy_per_latency") return FitnessKind::kAccuracyPerLatency;
  if (name == "accuracy_per_pdp") return FitnessKind::kAccuracyPerPdp;
  throw ValidationError("unknown fitness kind: " + name);
}

double fitness(double accuracy_pct, std::optional<double> latency_ms,
               std::optional<double> power_w, FitnessKind kind) {
  switch (kind) {
    case FitnessKind::kAccuracy:
      return accuracy_pct;
    case FitnessKind::kAccuracyPerLatency:
      if (!latency_ms || !(*latency_ms > 0.0)) {
        throw ValidationError("accuracy_per_latency needs a positive latency");
      }
      return accuracy_pct / *latency_ms;
    case FitnessKind::kAccuracyPerPdp:
      if (!latency_ms || !(*latency_ms > 0.0) || !power_w || !(*power_w > 0.0)) {
        throw ValidationError("accuracy_per_pdp needs positive latency and power");
      }
      return accuracy_pct / (*power_w * *latency_ms);
  }
  return accuracy_pct;
}

double TrialRecord::recompute_fitness() const {
  if (!accuracy_pct) throw ValidationError("failed trial has no fitness");
  return fitness(*accuracy_pct, latency_mean_ms, dynamic_power_w, fitness_kind);
}

Json record_to_json(const TrialRecord& r) {
  Json j;
  j["stage"] = r.stage;
  j["config"] = config_to_json(r.config);
  j["device"] = r.device ? Json(*r.device) : Json(nullptr);
  j["accuracy_pct"] = opt(r.accuracy_pct);
  j["latency_mean_ms"] = opt(r.latency_mean_ms);
  j["latency_std_ms"] = opt(r.latency_std_ms);
  j["dynamic_power_w"] = opt(r.dynamic_power_w);
  j["fitness"] = {{"kind", fitness_name(r.fitness_kind)}, {"value", opt(r.fitness_value)}};
  j["seed"] = r.seed;
  j["ts"] = r.timestamp.empty() ? Json(nullptr) : Json(r.timestamp);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

TrialRecord record_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("trial record must be a JSON object");
  TrialRecord r;
  if (!j.contains("stage") || !j["stage"].is_number_integer()) {
    throw ValidationError("trial record lacks stage");
  }
  r.stage = j["stage"].get<int>();
  if (r.stage < 1 || r.stage > 3) throw ValidationError("stage must be 1, 2 or 3");
  r.config = config_from_json(j.at("config"));
  if (j.contains("device") && j["device"].is_string()) r.device = j["device"].get<std::string>();
  r.accuracy_pct = opt_number(j, "accuracy_pct");
  r.latency_mean_ms = opt_number(j, "latency_mean_ms");
  r.latency_std_ms = opt_number(j, "latency_std_ms");
  r.dynamic_power_w = opt_number(j, "dynamic_power_w");
  if (!j.contains("fitness") || !j["fitness"].is_object()) {
    throw ValidationError("trial record lacks fitness");
  }
  r.fitness_kind = parse_fitness(j["fitness"].value("kind", "accuracy"));
  r.fitness_value = opt_number(j["fitness"], "value");
  r.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("ts") && j["ts"].is_string()) r.timestamp = j["ts"].get<std::string>();
  r.error = j.value("error", "");
  return r;
}

RankedSet rank_records(std::vector<TrialRecord> records, FitnessKind kind, std::size_t k,
                       const SearchSpace& space) {
  struct Keyed {
    TrialRecord record;
    double fit;
    double latency;
    std::int64_t params;
    std::uint64_t index;
  };
  std::vector<Keyed> keyed;
  for (auto& r : records) {
    if (r.failed()) continue;
    const double fit = r.fitness_value ? *r.fitness_value : r.recompute_fitness();
    const double lat = r.latency_mean_ms.value_or(0.0);
    const std::int64_t params = build_architecture(r.config).total_params;
    const std::uint64_t idx = validate(r.config, space).valid
                                  ? index_of(space, r.config)
                                  : std::numeric_limits<std::uint64_t>::max();
    keyed.push_back({std::move(r), fit, lat, params, idx});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.fit != b.fit) return a.fit > b.fit;
    if (a.latency != b.latency) return a.latency < b.latency;
    if (a.params != b.params) return a.params < b.params;
    return a.index < b.index;
  });
  RankedSet set{kind, k, {}};
  for (std::size_t i = 0; i < keyed.size() && i < k; ++i) {
    set.records.push_back(std::move(keyed[i].record));
  }
  return set;
}

Json ranked_set_to_json(const RankedSet& set) {
  Json records = Json::array();
  for (const auto& r : set.records) records.push_back(record_to_json(r));
  return {{"fitness", fitness_name(set.fitness)}, {"k", set.k}, {"records", std::move(records)}};
}

RankedSet ranked_set_from_json(const Json& j) {
  RankedSet set;
  set.fitness = parse_fitness(j.at("fitness").get<std::string>());
  set.k = j.at("k").get<std::size_t>();
  for (const auto& r : j.at("records")) set.records.push_back(record_from_json(r));
  if (set.records.size() > set.k) throw ValidationError("ranked set holds more than k records");
  return set;
}

RankedSet stage1(const SearchSpace& space, AccuracyEvaluator& evaluator,
                 const TpeSettings& settings, std::size_t budget, std::size_t keep,
                 const StageContext& ctx) {
  if (keep < 1) throw ValidationError("keep1 must be at least 1");
  ResumingEvaluator resuming(evaluator, ctx.log);
  std::vector<TrialRecord> fresh;
  RunOptions options;
  options.budget = budget;
  options.min_unique = keep;
  options.precision = Precision::kFp32;
  options.on_evaluated = [&](const Observation& o) {
    TrialRecord r;
    r.config = o.config;
    r.stage = 1;
    r.fitness_kind = FitnessKind::kAccuracy;
    r.seed = ctx.seed;
    r.timestamp = stamp(ctx);
    if (o.loss) {
      r.accuracy_pct = -*o.loss;
      r.fitness_value = r.accuracy_pct;
    } else {
      r.error = o.error;
      log_warn("stage 1 trial failed for " + to_string(o.config) + ": " + o.error);
    }
    if (ctx.log != nullptr) ctx.log->append(r);
    fresh.push_back(std::move(r));
  };
  const ObservationHistory history = run_optimization(space, resuming, settings, options);
  log_info("stage 1: " + std::to_string(history.size()) + " iterations, " +
           std::to_string(history.unique_successes()) + " unique successful trials");

  std::size_t ok = 0;
  for (const auto& r : fresh) ok += r.failed() ? 0 : 1;
  if (ok < keep) {
    throw Error("stage 1 shortfall: " + std::to_string(ok) +
                " unique successful trials after budget extension, keep1=" + std::to_string(keep));
  }
  return rank_records(std::move(fresh), FitnessKind::kAccuracy, keep, space);
}

Measurer Measurer::simulated(MeasurementProtocol protocol) {
  return {protocol, [](const DeviceProfile& d) -> std::unique_ptr<MeasurementBackend> {
            return std::make_unique<SimulatedBackend>(d);
          }};
}

Stage2Result stage2(const RankedSet& candidates, const std::vector<DeviceProfile>& devices,
                    const Measurer& measurer, std::size_t keep_per_device,
                    const SearchSpace& space, const StageContext& ctx) {
  if (candidates.records.empty()) throw ValidationError("stage 2 needs at least one candidate");
  if (devices.empty()) throw ValidationError("stage 2 needs at least one device");
  if (keep_per_device < 1) throw ValidationError("keep2 must be at least 1");

  struct DeviceRun {
    std::vector<TrialRecord> records;
    std::size_t attempts = 0;
  };
  auto run_device = [&](std::size_t i) {
    const DeviceProfile& device = devices[i];
    DeviceRun run;
    std::unique_ptr<MeasurementBackend> backend;
    for (const auto& cand : candidates.records) {
      if (cand.failed()) continue;
      ++run.attempts;
      if (ctx.log != nullptr) {
        if (auto prior = ctx.log->find(2, device.name, cand.config)) {
          if (!prior->failed()) run.records.push_back(*prior);
          continue;
        }
      }
      TrialRecord r;
      r.config = cand.config;
      r.stage = 2;
      r.device = device.name;
      r.fitness_kind = FitnessKind::kAccuracyPerLatency;
      r.seed = ctx.seed;
      r.accuracy_pct = std::clamp(*cand.accuracy_pct - device.accuracy_delta_pct, 0.0, 100.0);
      try {
        if (!backend) backend = measurer.open(device);
        const LatencyStats stats =
            measure_latency(build_architecture(cand.config), *backend, measurer.protocol);
        r.latency_mean_ms = stats.mean_ms;
        r.latency_std_ms = stats.std_ms;
        r.fitness_value = r.recompute_fitness();
      } catch (const Error& e) {
        log_warn("stage 2: " + device.name + " " + to_string(cand.config) + " excluded: " + e.what());
        continue;
      }
      r.timestamp = stamp(ctx);
      run.records.push_back(std::move(r));
    }
    return run;
  };
  std::vector<DeviceRun> runs =
      for_each_device<DeviceRun>(devices.size(), ctx.parallel_devices, run_device);

  Stage2Result result;
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const std::string& name = devices[i].name;
    if (runs[i].records.empty()) throw Error("stage 2: no successful measurements on " + name);
    if (ctx.log != nullptr) {
      for (const auto& r : runs[i].records) ctx.log->append(r);
    }
    result.measurements += runs[i].attempts;
    result.ranked[name] = rank_records(runs[i].records, FitnessKind::kAccuracyPerLatency,
                                       keep_per_device, space);
    result.measured[name] = std::move(runs[i].records);
  }
  return result;
}

Stage3Result stage3(const std::map<std::string, RankedSet>& per_device,
                    const std::vector<DeviceProfile>& devices, const Measurer& measurer,
                    const SearchSpace& space, const StageContext& ctx) {
  std::vector<std::string> names;
  for (const auto& [name, set] : per_device) {
    if (set.records.empty()) throw ValidationError("stage 3: empty candidate set for " + name);
    names.push_back(name);
  }
  auto run_device = [&](std::size_t i) {
    const DeviceProfile& device = find_device(devices, names[i]);
    std::vector<TrialRecord> out;
    std::unique_ptr<MeasurementBackend> backend;
    for (const auto& cand : per_device.at(names[i]).records) {
      if (ctx.log != nullptr) {
        if (auto prior = ctx.log->find(3, device.name, cand.config)) {
          if (!prior->failed()) out.push_back(*prior);
          continue;
        }
      }
      TrialRecord r = cand;
      r.stage = 3;
      r.fitness_kind = FitnessKind::kAccuracyPerPdp;
      r.seed = ctx.seed;
      try {
        if (!backend) backend = measurer.open(device);
        r.dynamic_power_w =
            measure_dynamic_power(build_architecture(cand.config), *backend, measurer.protocol);
        r.fitness_value = r.recompute_fitness();
      } catch (const Error& e) {
        log_warn("stage 3: " + device.name + " " + to_string(cand.config) + " excluded: " + e.what());
        continue;
      }
      r.timestamp = stamp(ctx);
      out.push_back(std::move(r));
    }
    return out;
  };
  std::vector<std::vector<TrialRecord>> runs = for_each_device<std::vector<TrialRecord>>(
      names.size(), ctx.parallel_devices, run_device);

  Stage3Result result;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (runs[i].empty()) throw Error("stage 3: no successful measurements on " + names[i]);
    if (ctx.log != nullptr) {
      for (const auto& r : runs[i]) ctx.log->append(r);
    }
    result.winners[names[i]] =
        rank_records(runs[i], FitnessKind::kAccuracyPerPdp, 1, space).records.front();
    result.measured[names[i]] = std::move(runs[i]);
  }
  return result;
}

PipelineResult run_pipeline(const SearchSpace& space, AccuracyEvaluator& evaluator,
                            const TpeSettings& settings, const std::vector<DeviceProfile>& devices,
                            const Measurer& measurer, const PipelineOptions& options,
                            const StageContext& ctx) {
  PipelineResult result;
  result.stage1 = stage1(space, evaluator, settings, options.budget, options.keep1, ctx);
  result.stage2 = stage2(result.stage1, devices, measurer, options.keep2, space, ctx);
  result.stage3 = stage3(result.stage2.ranked, devices, measurer, space, ctx);
  return result;
}

Json stage2_to_json(const Stage2Result& result) {
  Json devices = Json::object();
  for (const auto& [name, set] : result.ranked) devices[name] = ranked_set_to_json(set);
  return {{"devices", std::move(devices)}, {"measurements", result.measurements}};
}

std::map<std::string, RankedSet> stage2_from_json(const Json& j) {
  std::map<std::string, RankedSet> out;
  for (const auto& [name, set] : j.at("devices").items()) out[name] = ranked_set_from_json(set);
  return out;
}

Json stage3_to_json(const Stage3Result& result) {
  Json winners = Json::object();
  for (const auto& [name, r] : result.winners) winners[name] = record_to_json(r);
  return {{"winners", std::move(winners)}};
}

std::map<std::string, TrialRecord> stage3_from_json(const Json& j) {
  std::map<std::string, TrialRecord> out;
  for (const auto& [name, r] : j.at("winners").items()) out[name] = record_from_json(r);
  return out;
}

std::string now_rfc3339() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace edgenas
