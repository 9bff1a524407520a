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

#include "edgenas/tpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "edgenas/errors.hpp"

namespace edgenas {
namespace {

std::size_t draw_categorical(Rng& rng, const std::vector<double>& weights) {
  const double u = uniform_unit(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

std::vector<int> values_of(const std::vector<Observation>& entries, Param p) {
  std::vector<int> out;
  for (const auto& e : entries) {
    if (auto v = e.config.get(p)) out.push_back(*v);
  }
  return out;
}

void set_param(Configuration& c, Param p, int value) {
  switch (p) {
    case Param::kBlock: c.block = value; break;
    case Param::kK1: c.k1 = value; break;
    case Param::kK2: c.k2 = value; break;
    case Param::kK3: c.k3 = value; break;
    case Param::kK4: c.k4 = value; break;
    case Param::kFc1: c.fc1 = value; break;
    case Param::kDo1: c.do1 = value; break;
    case Param::kFc2: c.fc2 = value; break;
    case Param::kDo2: c.do2 = value; break;
  }
}

using Suggester = std::function<Configuration(const ObservationHistory&)>;

ObservationHistory run_loop(const SearchSpace& space, AccuracyEvaluator& evaluator,
                            const TpeSettings& settings, const RunOptions& options,
                            const Suggester& next) {
  if (options.budget < 1) throw ValidationError("budget must be at least 1");
  ObservationHistory history(space, settings);
  std::unordered_map<std::uint64_t, Observation> seen;
  std::size_t unique_ok = 0;
  const std::uint64_t space_size = cardinality(space);
  const std::size_t hard_cap = 3 * options.budget;

  // A budget that covers the whole space degenerates to exhaustive search.
  const bool exhaustive = options.budget >= space_size;
  for (std::size_t it = 0;; ++it) {
    if (exhaustive && it >= space_size) break;
    if (it >= options.budget) {
      if (unique_ok >= options.min_unique || it >= hard_cap || seen.size() >= space_size) break;
    }
    Configuration config = exhaustive ? config_from_index(space, it) : next(history);
    const std::uint64_t key = index_of(space, config);
    if (auto hit = seen.find(key); hit != seen.end()) {
      const Observation& prior = hit->second;
      if (prior.loss) {
        history.record(config, *prior.loss, true);
      } else {
        history.record_failure(config, prior.error, true);
      }
      continue;
    }
    try {
      const AccuracyResult r = evaluator.evaluate(config, options.precision);
      history.record(config, -r.accuracy_pct);
      ++unique_ok;
    } catch (const EvaluationError& e) {
      history.record_failure(config, e.what());
    } catch (const ValidationError& e) {
      history.record_failure(config, e.what());
    }
    seen.emplace(key, history.entries().back());
    if (options.on_evaluated) options.on_evaluated(history.entries().back());
  }
  return history;
}

}  // namespace

ObservationHistory::ObservationHistory(SearchSpace space, TpeSettings settings)
    : space_(std::move(space)), settings_(settings) {
  if (!(settings_.gamma > 0.0 && settings_.gamma < 1.0)) {
    throw ValidationError("gamma must lie in (0, 1)");
  }
  if (settings_.n_startup < 0 || settings_.n_candidates < 1) {
    throw ValidationError("n_startup must be >= 0 and n_candidates >= 1");
  }
  if (!(settings_.smoothing > 0.0)) throw ValidationError("smoothing must be positive");
}

void ObservationHistory::check(const Configuration& config) const {
  const Verdict v = validate(config, space_);
  if (!v.valid) throw ValidationError("history entry outside space: " + v.reasons.front());
}

void ObservationHistory::record(Configuration config, double loss, bool cached) {
  check(config);
  if (!std::isfinite(loss)) throw ValidationError("loss must be finite");
  entries_.push_back({std::move(config), loss, cached, {}});
}

void ObservationHistory::record_failure(Configuration config, std::string error, bool cached) {
  check(config);
  entries_.push_back({std::move(config), std::nullopt, cached, std::move(error)});
}

std::optional<double> ObservationHistory::best_accuracy() const {
  std::optional<double> best;
  for (const auto& e : entries_) {
    if (e.loss && (!best || -*e.loss > *best)) best = -*e.loss;
  }
  return best;
}

std::size_t ObservationHistory::unique_successes() const {
  return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [](const auto& e) {
    return !e.cached && !e.failed();
  }));
}

HistorySplit split_history(const ObservationHistory& history) {
  if (history.empty()) throw ValidationError("empty history");
  std::vector<Observation> ok;
  for (const auto& e : history.entries()) {
    if (!e.failed() && !e.cached) ok.push_back(e);
  }
  std::stable_sort(ok.begin(), ok.end(),
                   [](const Observation& a, const Observation& b) { return *a.loss < *b.loss; });
  // The small epsilon keeps products like 0.1 * 30 from rounding up.
  const double raw = history.settings().gamma * static_cast<double>(ok.size());
  const auto n_good = std::min(ok.size(), static_cast<std::size_t>(std::ceil(raw - 1e-9)));
  HistorySplit split;
  split.good.assign(ok.begin(), ok.begin() + static_cast<std::ptrdiff_t>(n_good));
  split.bad.assign(ok.begin() + static_cast<std::ptrdiff_t>(n_good), ok.end());
  return split;
}

std::vector<double> build_density(std::span<const int> grid, std::span<const int> observations,
                                  double alpha) {
  if (grid.empty()) throw ValidationError("density grid must be non-empty");
  std::vector<double> counts(grid.size(), alpha);
  double n = 0.0;
  for (int v : observations) {
    const auto it = std::find(grid.begin(), grid.end(), v);
    if (it == grid.end()) continue;
    counts[static_cast<std::size_t>(it - grid.begin())] += 1.0;
    n += 1.0;
  }
  const double total = n + alpha * static_cast<double>(grid.size());
  for (double& c : counts) c /= total;
  return counts;
}

ParamDensity param_density(const SearchSpace& space, Param p, const HistorySplit& split,
                           double alpha) {
  ParamDensity d;
  d.grid = space.spec(p).grid();
  // Entries with an inactive parameter simply carry no value for it.
  d.good_weights = build_density(d.grid, values_of(split.good, p), alpha);
  d.bad_weights = build_density(d.grid, values_of(split.bad, p), alpha);
  return d;
}

Configuration suggest(const SearchSpace& space, const ObservationHistory& history) {
  const TpeSettings& s = history.settings();
  Rng rng = stream_rng(s.seed, history.size());
  if (history.size() < static_cast<std::size_t>(s.n_startup) || history.unique_successes() == 0) {
    return sample_uniform(space, rng);
  }

  const HistorySplit split = split_history(history);
  std::vector<ParamDensity> densities;
  for (Param p : kAllParams) densities.push_back(param_density(space, p, split, s.smoothing));

  std::unordered_set<std::uint64_t> tried;
  for (const auto& e : history.entries()) tried.insert(index_of(space, e.config));

  Configuration best, best_fresh;
  double best_score = -std::numeric_limits<double>::infinity();
  double best_fresh_score = best_score;
  for (int c = 0; c < s.n_candidates; ++c) {
    Configuration cand;
    cand.output_classes = space.output_classes();
    double score = 0.0;
    for (Param p : kAllParams) {
      if (p != Param::kBlock && !space.is_active(p, cand.block)) continue;
      const ParamDensity& d = densities[static_cast<std::size_t>(p)];
      const std::size_t i = draw_categorical(rng, d.good_weights);
      set_param(cand, p, d.grid[i]);
      score += std::log(d.good_weights[i]) - std::log(d.bad_weights[i]);
    }
    if (score > best_score) {
      best_score = score;
      best = cand;
    }
    if (score > best_fresh_score && !tried.contains(index_of(space, cand))) {
      best_fresh_score = score;
      best_fresh = cand;
    }
  }
  return std::isfinite(best_fresh_score) ? best_fresh : best;
}

ObservationHistory run_optimization(const SearchSpace& space, AccuracyEvaluator& evaluator,
                                    const TpeSettings& settings, const RunOptions& options) {
  return run_loop(space, evaluator, settings, options,
                  [&space](const ObservationHistory& h) { return suggest(space, h); });
}

ObservationHistory run_random_search(const SearchSpace& space, AccuracyEvaluator& evaluator,
                                     const TpeSettings& settings, const RunOptions& options) {
  return run_loop(space, evaluator, settings, options, [&space](const ObservationHistory& h) {
    Rng rng = stream_rng(h.settings().seed, h.size());
    return sample_uniform(space, rng);
  });
}

}  // namespace edgenas
