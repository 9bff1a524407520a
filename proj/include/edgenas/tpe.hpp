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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgenas/evaluators.hpp"
#include "edgenas/search_space.hpp"

namespace edgenas {

struct TpeSettings {
  double gamma = 0.25;      // fraction of the history treated as "good"
  int n_startup = 20;       // uniform draws before the densities are used
  int n_candidates = 24;    // draws from the good density per suggestion
  double smoothing = 1.0;   // additive (Laplace) pseudo-count per grid value
  std::uint64_t seed = 42;
};

// loss = -accuracy_pct. A failed trial has no loss and is ignored by the
// densities. `cached` marks a re-suggested configuration whose earlier
// result was reused instead of being evaluated again.
struct Observation {
  Configuration config;
  std::optional<double> loss;
  bool cached = false;
  std::string error;

  bool failed() const { return !loss.has_value(); }
};

// Append-only record of the optimisation loop.
class ObservationHistory {
 public:
  ObservationHistory(SearchSpace space, TpeSettings settings);

  // Throws ValidationError for configurations outside the space and for
  // non-finite losses.
  void record(Configuration config, double loss, bool cached = false);
  void record_failure(Configuration config, std::string error, bool cached = false);

  const std::vector<Observation>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const SearchSpace& space() const { return space_; }
  const TpeSettings& settings() const { return settings_; }

  // Highest accuracy among successful entries, if any.
  std::optional<double> best_accuracy() const;
  std::size_t unique_successes() const;

 private:
  void check(const Configuration& config) const;

  SearchSpace space_;
  TpeSettings settings_;
  std::vector<Observation> entries_;
};

struct HistorySplit {
  std::vector<Observation> good;
  std::vector<Observation> bad;
};

// good = the ceil(gamma * n) lowest-loss successful entries (earlier entry
// first on ties), bad = the remaining successful entries. Cached repeats are
// left out so a re-suggested configuration is not counted twice.
HistorySplit split_history(const ObservationHistory& history);

// weight(v) = (count(v) + alpha) / (n + alpha * |grid|). Values not on the
// grid are ignored.
std::vector<double> build_density(std::span<const int> grid, std::span<const int> observations,
                                  double alpha = 1.0);

struct ParamDensity {
  std::vector<int> grid;
  std::vector<double> good_weights;
  std::vector<double> bad_weights;
};

// Densities for one parameter. K3/K4 only see entries whose block activates them.
ParamDensity param_density(const SearchSpace& space, Param p, const HistorySplit& split,
                           double alpha);

// Next configuration to evaluate; a pure function of (space, history).
// The highest-scoring candidate that has not been tried yet wins; the best
// candidate overall is returned only when every candidate is a repeat.
Configuration suggest(const SearchSpace& space, const ObservationHistory& history);

struct RunOptions {
  std::size_t budget = 1;
  // Keep iterating past `budget` (up to 3x) until this many distinct
  // configurations have been evaluated successfully.
  std::size_t min_unique = 0;
  Precision precision = Precision::kFp32;
  // Called once per fresh evaluation, in order.
  std::function<void(const Observation&)> on_evaluated;
};

// suggest -> evaluate -> record. Repeated suggestions reuse the earlier
// result and still consume budget. EvaluationError and ValidationError from
// the evaluator become failed trials. When `budget` is at least the space
// size, every configuration is evaluated once in canonical order instead.
ObservationHistory run_optimization(const SearchSpace& space, AccuracyEvaluator& evaluator,
                                    const TpeSettings& settings, const RunOptions& options);

// Same loop with suggestions drawn uniformly: draw i uses stream_rng(seed, i),
// the same sequence TPE uses for its startup phase.
ObservationHistory run_random_search(const SearchSpace& space, AccuracyEvaluator& evaluator,
                                     const TpeSettings& settings, const RunOptions& options);

}  // namespace edgenas
