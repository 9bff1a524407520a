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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgenas/devices.hpp"
#include "edgenas/json_io.hpp"
#include "edgenas/pipeline.hpp"

namespace edgenas {

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;  // sample std; 0 for a single value
  std::size_t n = 0;
};

// Mean and sample standard deviation; throws ValidationError when empty.
MetricStats metric_stats(const std::vector<double>& values);

struct DeviceSummaryRow {
  std::string device;
  std::optional<MetricStats> accuracy;
  std::optional<MetricStats> latency;
  std::optional<MetricStats> power;
  std::size_t n_models = 0;
};

using RecordGroups = std::map<std::string, std::vector<TrialRecord>>;

// Per-device statistics; each metric is taken over the records that carry
// it. Empty groups are skipped with a warning.
std::vector<DeviceSummaryRow> summary_table(const RecordGroups& groups);

// Accuracy and latency from `latency_groups` (the stage-2 population), power
// from `power_groups` (the stage-3 survivors).
std::vector<DeviceSummaryRow> summary_table(const RecordGroups& latency_groups,
                                            const RecordGroups& power_groups);

struct BestModel {
  std::optional<Configuration> config;
  double accuracy_pct = 0.0;
  double latency_ms = 0.0;
  std::optional<double> power_w;
};

struct ComparisonEntry {
  std::string label;
  double accuracy_pct = 0.0;
  double latency_ms = 0.0;
  double power_w = 0.0;
};

struct ComparisonRow {
  ComparisonEntry entry;
  double accuracy_per_pdp = 0.0;
  std::string rendered;  // two decimals
};

// Appends accuracy / (power x latency); throws ValidationError for
// non-positive latency or power.
std::vector<ComparisonRow> comparison_table(const std::vector<ComparisonEntry>& entries);

struct RatioInputs {
  std::map<std::string, DeviceSummaryRow> averages;
  std::map<std::string, BestModel> best_latency;  // accuracy/latency winners
  std::map<std::string, BestModel> best_pdp;      // accuracy/PDP winners
  std::vector<ComparisonEntry> comparison;        // labels: ours, vgg-like, inception-like
};

enum class ClaimStatus { kPass, kFail, kUnavailable };

const char* claim_status_name(ClaimStatus s);

struct RatioClaim {
  std::string label;
  std::string numerator;
  std::string denominator;
  double expected = 0.0;
  std::optional<double> computed;
  double tolerance = 0.05;
  ClaimStatus status = ClaimStatus::kUnavailable;
  std::string note;
};

inline constexpr double kRatioTolerance = 0.05;

// The fixed catalog of latency, power and comparison ratios. Every claim
// appears exactly once; claims whose inputs are missing are "unavailable".
// Conventions: "N x latency reduction of A vs B" = latency(B) / latency(A),
// "N x less power" = power(B) / power(A).
std::vector<RatioClaim> ratio_sheet(const RatioInputs& inputs);

Json ratios_to_json(const std::vector<RatioClaim>& claims);

// Non-dominated records on (accuracy up, latency down, power down), in input
// order. Records must carry all three metrics.
std::vector<TrialRecord> pareto_front(const std::vector<TrialRecord>& records);

// Frozen published tables shipped as data/published_tables.json.
struct PublishedTables {
  std::vector<DeviceSummaryRow> averages;
  std::map<std::string, Precision> precision;
  std::vector<std::pair<Configuration, double>> best_accuracy;  // config, accuracy
  std::map<std::string, BestModel> best_latency;
  std::map<std::string, BestModel> best_pdp;
  std::vector<ComparisonEntry> comparison;

  RatioInputs ratio_inputs() const;
};

PublishedTables load_published_tables(const std::filesystem::path& path);

// Fit inputs for one device: its two best-model rows plus the device
// average, placed at the mean cost features of `space`.
std::vector<FitObservation> fit_observations(const PublishedTables& tables,
                                             const std::string& device, const SearchSpace& space);

// Renderings. CSV and JSON carry full precision; markdown rounds to two decimals.
std::string summary_to_csv(const std::vector<DeviceSummaryRow>& rows);
Json summary_to_json(const std::vector<DeviceSummaryRow>& rows);
std::string best_models_to_csv(const std::map<std::string, BestModel>& best_latency,
                               const std::map<std::string, BestModel>& best_pdp);
std::string report_markdown(const std::vector<DeviceSummaryRow>& rows,
                            const std::map<std::string, BestModel>& best_latency,
                            const std::map<std::string, BestModel>& best_pdp,
                            const std::vector<ComparisonRow>& comparison,
                            const std::vector<RatioClaim>& claims);

}  // namespace edgenas
