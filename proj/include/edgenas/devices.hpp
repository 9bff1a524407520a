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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgenas/architecture.hpp"
#include "edgenas/channel.hpp"
#include "edgenas/evaluators.hpp"
#include "edgenas/json_io.hpp"

namespace edgenas {

// latency = fixed + conv_macs / conv_rate + fc_macs / fc_rate + weighted_layers * per_layer
struct LatencyModel {
  double fixed_ms = 0.0;
  double conv_macs_per_ms = 1.0;
  double fc_macs_per_ms = 1.0;
  double per_layer_ms = 0.0;
};

// dynamic power = alpha + beta * (total_macs / latency_ms) / 1000
struct PowerModel {
  double idle_w = 0.0;
  double alpha_w = 0.0;
  double beta_w_per_kmacs_per_ms = 0.0;
};

struct FitResidual {
  std::string label;
  double latency_residual_ms = 0.0;        // predicted - observed
  std::optional<double> power_residual_w;  // only for observations with power
};

struct FitReport {
  std::string source;
  int latency_rank = 0;
  int power_rank = 0;
  double latency_rms_ms = 0.0;
  double power_rms_w = 0.0;
  std::vector<FitResidual> residuals;
};

struct DeviceProfile {
  std::string name;
  Precision precision = Precision::kFp32;
  LatencyModel latency_model;
  PowerModel power_model;
  double accuracy_delta_pct = 0.0;
  std::optional<FitReport> fit;

  // Throws ValidationError unless throughputs are positive and every
  // coefficient is finite and non-negative.
  void validate() const;
};

// Inputs of the cost models.
struct CostFeatures {
  double conv_macs = 0.0;
  double fc_macs = 0.0;
  double weighted_layers = 0.0;

  double total_macs() const { return conv_macs + fc_macs; }
};

CostFeatures cost_features(const ArchitectureDescriptor& arch);

// Average features over every configuration of `space`, each configuration
// weighted equally. The cost models are linear in the features, so the
// average latency of the population equals the latency at this point.
CostFeatures population_mean_features(const SearchSpace& space);

double simulate_latency(const CostFeatures& f, const DeviceProfile& profile);
double simulate_latency(const ArchitectureDescriptor& arch, const DeviceProfile& profile);

// Throws ValidationError when latency_ms <= 0.
double simulate_dynamic_power(double total_macs, const DeviceProfile& profile, double latency_ms);
double simulate_dynamic_power(const ArchitectureDescriptor& arch, const DeviceProfile& profile,
                              double latency_ms);

struct LatencyStats {
  double mean_ms = 0.0;
  double std_ms = 0.0;  // sample standard deviation (n - 1)
};

// Requires at least two samples.
LatencyStats latency_stats(std::span<const double> samples_ms);

inline constexpr double kNegativePowerTolerance = 0.05;

// mean(active) - mean(idle); small negatives (>= -0.05 W) clamp to zero,
// larger ones raise MeasurementError.
double dynamic_power_from_traces(std::span<const double> idle_w, std::span<const double> active_w);

struct MeasurementProtocol {
  int latency_runs = 40;
  int warmup_runs = 0;  // extra leading runs that are discarded
  double power_window_s = 180.0;
  double power_sample_hz = 1.0;
  // Relative std of multiplicative Gaussian noise added by the simulator.
  double jitter = 0.0;
  std::uint64_t jitter_seed = 0;

  int power_samples() const;
};

struct MeasurementStats {
  double latency_mean_ms = 0.0;
  double latency_std_ms = 0.0;
  double dynamic_power_w = 0.0;
  int n_latency_runs = 0;
  double power_sample_hz = 0.0;
  double power_window_s = 0.0;
};

struct PowerTraces {
  std::vector<double> idle_w;
  std::vector<double> active_w;
};

// Source of raw samples. Implementations return warmup_runs + latency_runs
// latency samples.
class MeasurementBackend {
 public:
  virtual ~MeasurementBackend() = default;
  virtual std::vector<double> latency_samples(const ArchitectureDescriptor& arch,
                                              const MeasurementProtocol& protocol) = 0;
  virtual PowerTraces power_traces(const ArchitectureDescriptor& arch,
                                   const MeasurementProtocol& protocol) = 0;
};

// Synthesises samples from the profile's cost models. Noise, if enabled, is
// seeded from (jitter_seed, profile name, configuration) so results do not
// depend on call order.
class SimulatedBackend final : public MeasurementBackend {
 public:
  explicit SimulatedBackend(DeviceProfile profile);

  std::vector<double> latency_samples(const ArchitectureDescriptor& arch,
                                      const MeasurementProtocol& protocol) override;
  PowerTraces power_traces(const ArchitectureDescriptor& arch,
                           const MeasurementProtocol& protocol) override;

  const DeviceProfile& profile() const { return profile_; }

 private:
  DeviceProfile profile_;
};

// Requests raw samples from a device process over the NDJSON protocol:
//   {"id":N,"cmd":"measure_latency","config":{...},"runs":40}
//     -> {"id":N,"latency_ms":[...]}
//   {"id":N,"cmd":"measure_power","config":{...},"window_s":180,"sample_hz":1}
//     -> {"id":N,"idle_w":[...],"active_w":[...]}
class ExternalDeviceBackend final : public MeasurementBackend {
 public:
  ExternalDeviceBackend(const std::string& command_line, std::chrono::milliseconds timeout);
  // Borrows `channel`, which must outlive the backend.
  ExternalDeviceBackend(MessageChannel& channel, std::chrono::milliseconds timeout);

  std::vector<double> latency_samples(const ArchitectureDescriptor& arch,
                                      const MeasurementProtocol& protocol) override;
  PowerTraces power_traces(const ArchitectureDescriptor& arch,
                           const MeasurementProtocol& protocol) override;

 private:
  std::unique_ptr<ProcessChannel> owned_;
  RpcClient client_;
};

// Latency over `latency_runs` samples after dropping warm-up runs.
// Throws MeasurementError("expected N latency runs, got M") on a short reply.
LatencyStats measure_latency(const ArchitectureDescriptor& arch, MeasurementBackend& backend,
                             const MeasurementProtocol& protocol);
double measure_dynamic_power(const ArchitectureDescriptor& arch, MeasurementBackend& backend,
                             const MeasurementProtocol& protocol);
MeasurementStats measure(const ArchitectureDescriptor& arch, MeasurementBackend& backend,
                         const MeasurementProtocol& protocol);

struct FitObservation {
  std::string label;
  CostFeatures features;
  double latency_ms = 0.0;
  std::optional<double> dynamic_power_w;
};

struct FitOptions {
  double idle_w = 0.0;
  double accuracy_delta_pct = 0.0;
  std::string source;
};

// A fitted MAC coefficient of zero means the term does not matter; it is
// stored as this throughput so the profile stays finite.
inline constexpr double kMaxMacsPerMs = 1e15;

// Non-negative least squares of latency on (1, conv MACs, FC MACs, weighted
// layers), then of dynamic power on (1, kMAC/ms) for observations that carry
// power. Throws FitError when fewer than two distinct latency feature rows
// exist or no observation carries power.
DeviceProfile fit_profile(std::span<const FitObservation> observations, Precision precision,
                          std::string name, const FitOptions& options = {});

Json profile_to_json(const DeviceProfile& profile);
DeviceProfile profile_from_json(const Json& j);
DeviceProfile load_profile(const std::filesystem::path& path);
// Every *.json in `dir`, sorted by profile name.
std::vector<DeviceProfile> load_profiles(const std::filesystem::path& dir);

}  // namespace edgenas
