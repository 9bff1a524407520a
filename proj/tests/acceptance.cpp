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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "edgenas/architecture.hpp"
#include "edgenas/cli.hpp"
#include "edgenas/devices.hpp"
#include "edgenas/errors.hpp"
#include "edgenas/evaluators.hpp"
#include "edgenas/json_io.hpp"
#include "edgenas/log.hpp"
#include "edgenas/pipeline.hpp"
#include "edgenas/random.hpp"
#include "edgenas/reporting.hpp"
#include "edgenas/search_space.hpp"
#include "edgenas/tpe.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace edgenas;
using namespace std::chrono_literals;

namespace {

using Clock = std::chrono::steady_clock;

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::vector<int> kernels_of(const Configuration& c) {
  std::vector<int> k = {c.k1, c.k2};
  if (c.block >= 3) k.push_back(*c.k3);
  if (c.block >= 4) k.push_back(*c.k4);
  return k;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Check ac1() {
  Check c;
  const struct {
    double acc, lat, pow, expected;
  } rows[] = {{96.95, 0.39, 0.52, 478.06}, {97.46, 6.95, 0.50, 28.04}, {95.93, 0.65, 0.67, 220.27}};
  for (const auto& r : rows) {
    const double f = fitness(r.acc, r.lat, r.pow, FitnessKind::kAccuracyPerPdp);
    c.expect(std::abs(f - r.expected) <= 0.01, "fitness " + fmt(f) + " vs " + fmt(r.expected));
  }
  return c;
}

Check ac2() {
  Check c;
  const PublishedTables tables = load_published_tables(testing::data_path("published_tables.json"));
  const auto claims = ratio_sheet(tables.ratio_inputs());
  c.expect(claims.size() == 20, "expected 20 claims, got " + std::to_string(claims.size()));
  for (const auto& claim : claims) {
    const bool ok = claim.status == ClaimStatus::kPass && claim.computed &&
                    std::abs(*claim.computed - claim.expected) <= 0.05;
    c.expect(ok, claim.label + " computed " + (claim.computed ? fmt(*claim.computed) : "n/a"));
  }
  return c;
}

Check ac3() {
  Check c;
  const auto t0 = Clock::now();
  const SearchSpace space = load_space(testing::data_path("full_space.json"));
  c.expect(cardinality(space) == 4167450, "cardinality " + std::to_string(cardinality(space)));
  const std::int64_t conv = oracle::enumerate_conv_tuples();
  c.expect(conv == 378, "conv tuples " + std::to_string(conv));
  c.expect(conv * oracle::fc_closed_form() == 4167450, "oracle product");

  const char* argv[] = {"edgenas", "space", "count", "--space", nullptr};
  const std::string path = testing::data_path("full_space.json").string();
  argv[4] = path.c_str();
  std::ostringstream out, err;
  const int code = run_command(5, argv, out, err);
  c.expect(code == 0, "space count exit " + std::to_string(code));
  c.expect(out.str().rfind("4167450\n", 0) == 0, "space count output");
  c.expect(out.str().find(">13M") != std::string::npos, "missing >13M note");
  c.expect(seconds_since(t0) < 1.0, "slower than 1 s");
  return c;
}

Check ac4() {
  Check c;
  const auto t0 = Clock::now();
  const SearchSpace space = full_space();
  Rng rng = stream_rng(2026, 0);
  for (int i = 0; i < 100; ++i) {
    const Configuration cfg = sample_uniform(space, rng);
    const ArchitectureDescriptor arch = build_architecture(cfg, space);
    const oracle::Walk w = oracle::layer_walk(kernels_of(cfg), cfg.fc1, cfg.fc2, cfg.output_classes);
    if (count_params(arch) != w.params || count_macs(arch) != w.macs) {
      c.expect(false, "mismatch on " + to_string(cfg));
    }
  }
  const ArchitectureDescriptor pi = build_architecture(testing::pi_best(), space);
  c.expect(count_params(pi) == 365515, "pi best params " + std::to_string(count_params(pi)));
  c.expect(count_macs(pi) == 10970992, "pi best MACs " + std::to_string(count_macs(pi)));
  c.expect(seconds_since(t0) < 1.0, "slower than 1 s");
  return c;
}

Check ac5() {
  Check c;
  Configuration cfg = testing::pi_best();
  const int expected[] = {7, 9, 11};
  for (int block = 2; block <= 4; ++block) {
    cfg.block = block;
    cfg.k3 = block >= 3 ? std::optional<int>(40) : std::nullopt;
    cfg.k4 = block >= 4 ? std::optional<int>(56) : std::nullopt;
    const int layers = build_architecture(cfg).weighted_layer_count;
    c.expect(layers == expected[block - 2],
             "block " + std::to_string(block) + " gives " + std::to_string(layers) + " layers");
  }
  return c;
}

Check ac6() {
  Check c;
  const auto t0 = Clock::now();
  const SearchSpace space = full_space();
  std::vector<double> tpe_best, random_best;
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SurrogateEvaluator eval(space, seed);
    TpeSettings settings;
    settings.seed = seed;
    RunOptions opts;
    opts.budget = 200;
    const double t = *run_optimization(space, eval, settings, opts).best_accuracy();
    const double r = *run_random_search(space, eval, settings, opts).best_accuracy();
    tpe_best.push_back(t);
    random_best.push_back(r);
    if (t > r) ++wins;
  }
  const double mt = median(tpe_best), mr = median(random_best);
  c.expect(mt >= mr, "median TPE " + fmt(mt) + " < random " + fmt(mr));
  c.expect(wins >= 12, "TPE won " + std::to_string(wins) + "/20");
  const double s = seconds_since(t0);
  c.expect(s < 30.0, "took " + fmt(s) + " s");
  c.detail += (c.detail.empty() ? "" : "; ") + std::string("median TPE ") + fmt(mt) + ", random " + fmt(mr) +
              ", wins " + std::to_string(wins) + "/20";
  return c;
}

Check ac7() {
  Check c;
  const auto t0 = Clock::now();
  const SearchSpace space = testing::reduced();
  c.expect(cardinality(space) <= 5000, "reduced space too large");
  const auto devices = load_profiles(testing::data_path("devices"));
  c.expect(devices.size() == 6, "expected 6 profiles, got " + std::to_string(devices.size()));

  PipelineOptions opts;
  opts.budget = 500;
  opts.keep1 = 50;
  opts.keep2 = 10;
  StageContext ctx;
  ctx.seed = 42;
  ctx.timestamps = false;
  auto run = [&] {
    SurrogateEvaluator eval(space, 42);
    TpeSettings settings;
    settings.seed = 42;
    return run_pipeline(space, eval, settings, devices, Measurer::simulated(), opts, ctx);
  };
  const PipelineResult a = run();
  const PipelineResult b = run();

  c.expect(a.stage3.winners.size() == devices.size(), "missing winners");
  for (const auto& [dev, w] : a.stage3.winners) {
    const auto it = b.stage3.winners.find(dev);
    c.expect(it != b.stage3.winners.end() && record_to_json(it->second) == record_to_json(w),
             "winner differs for " + dev);
  }

  // Nesting: winners come from the device's stage-2 set, which comes from stage 1.
  c.expect(a.stage1.records.size() == 50, "stage 1 kept " + std::to_string(a.stage1.records.size()));
  std::set<std::uint64_t> s1;
  for (const auto& r : a.stage1.records) s1.insert(index_of(space, r.config));
  for (const auto& [dev, ranked] : a.stage2.ranked) {
    c.expect(ranked.records.size() == 10, dev + " stage 2 kept " + std::to_string(ranked.records.size()));
    std::set<std::uint64_t> s2;
    for (const auto& r : ranked.records) {
      s2.insert(index_of(space, r.config));
      c.expect(s1.count(index_of(space, r.config)) == 1, dev + " stage 2 entry not from stage 1");
    }
    const auto w = a.stage3.winners.find(dev);
    c.expect(w != a.stage3.winners.end() && s2.count(index_of(space, w->second.config)) == 1,
             dev + " winner not from stage 2");
  }
  const double s = seconds_since(t0);
  c.expect(s < 60.0, "took " + fmt(s) + " s");
  return c;
}

Check ac8() {
  Check c;
  const SearchSpace space = testing::toy8();
  SurrogateEvaluator eval(space, 42);
  std::vector<std::pair<double, std::uint64_t>> all;
  for (std::uint64_t i = 0; i < cardinality(space); ++i) {
    all.emplace_back(eval.evaluate(config_from_index(space, i), Precision::kFp32).accuracy_pct, i);
  }
  // Highest accuracy first; ties go to the lower index.
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });

  TpeSettings settings;
  StageContext ctx;
  ctx.timestamps = false;
  const RankedSet top = stage1(space, eval, settings, 8, 3, ctx);
  c.expect(top.records.size() == 3, "kept " + std::to_string(top.records.size()));
  for (std::size_t i = 0; i < std::min<std::size_t>(3, top.records.size()); ++i) {
    c.expect(index_of(space, top.records[i].config) == all[i].second, "rank " + std::to_string(i) + " differs");
  }
  return c;
}

Check ac9() {
  Check c;
  const ArchitectureDescriptor arch = build_architecture(testing::pi_best());
  MeasurementProtocol protocol;

  ExternalDeviceBackend ramp(testing::mock("device-ramp"), 5000ms);
  const MeasurementStats stats = measure(arch, ramp, protocol);
  std::vector<double> lat, idle, active;
  for (int i = 0; i < 40; ++i) lat.push_back(1.0 + 0.1 * i);
  for (int i = 0; i < 180; ++i) {
    idle.push_back(2.0 + 0.01 * (i % 3));
    active.push_back(3.0 + 0.02 * (i % 2));
  }
  c.expect(std::abs(stats.latency_mean_ms - oracle::mean(lat)) < 1e-9, "latency mean");
  c.expect(std::abs(stats.latency_std_ms - oracle::sample_std(lat)) < 1e-9, "latency std");
  c.expect(std::abs(stats.dynamic_power_w - (oracle::mean(active) - oracle::mean(idle))) < 1e-9,
           "dynamic power");
  c.expect(stats.n_latency_runs == 40, "run count");

  auto message_of = [&](const std::string& mode, bool power) -> std::string {
    try {
      ExternalDeviceBackend dev(testing::mock(mode), 5000ms);
      if (power) {
        measure_dynamic_power(arch, dev, protocol);
      } else {
        measure_latency(arch, dev, protocol);
      }
    } catch (const MeasurementError& e) {
      return e.what();
    }
    return "no error";
  };
  const std::string short_msg = message_of("device-short 2.0", false);
  c.expect(short_msg.find("expected 40 latency runs, got 39") != std::string::npos, "short reply: " + short_msg);
  const std::string neg_msg = message_of("device-negative", true);
  c.expect(neg_msg.find("negative dynamic power") != std::string::npos, "negative power: " + neg_msg);
  return c;
}

Check ac10() {
  Check c;
  Rng rng = stream_rng(10, 0);
  std::vector<TrialRecord> records;
  std::vector<oracle::Point3> pts;
  const SearchSpace space = full_space();
  for (int i = 0; i < 200; ++i) {
    TrialRecord r;
    r.config = config_from_index(space, static_cast<std::uint64_t>(i));
    // Coarse grids make ties and duplicates likely.
    r.accuracy_pct = 90.0 + static_cast<double>(uniform_index(rng, 20)) * 0.5;
    r.latency_mean_ms = 0.5 + static_cast<double>(uniform_index(rng, 20)) * 0.25;
    r.dynamic_power_w = 0.2 + static_cast<double>(uniform_index(rng, 20)) * 0.1;
    records.push_back(r);
    pts.push_back({*r.accuracy_pct, *r.latency_mean_ms, *r.dynamic_power_w});
  }
  const auto front = pareto_front(records);
  const auto expected = oracle::pareto_indices(pts);
  std::vector<std::uint64_t> got_idx, want_idx;
  for (const auto& r : front) got_idx.push_back(index_of(space, r.config));
  for (std::size_t i : expected) want_idx.push_back(i);
  std::sort(got_idx.begin(), got_idx.end());
  c.expect(got_idx == want_idx, "front has " + std::to_string(got_idx.size()) + " records, oracle " +
                                    std::to_string(want_idx.size()));
  return c;
}

Check ac11() {
  Check c;
  const SearchSpace space = full_space();
  SurrogateEvaluator eval(space, 42);
  SurrogateEvaluator twin(space, 42);
  Rng rng = stream_rng(11, 0);
  double gap = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Configuration cfg = sample_uniform(space, rng);
    const double fp32 = eval.evaluate(cfg, Precision::kFp32).accuracy_pct;
    const double fp16 = eval.evaluate(cfg, Precision::kFp16).accuracy_pct;
    for (double a : {fp32, fp16}) {
      if (!(a >= kSurrogateMinPct && a <= kSurrogateMaxPct)) c.expect(false, "out of range " + fmt(a));
    }
    if (fp32 != eval.evaluate(cfg, Precision::kFp32).accuracy_pct ||
        fp32 != twin.evaluate(cfg, Precision::kFp32).accuracy_pct) {
      c.expect(false, "not deterministic on " + to_string(cfg));
    }
    gap += fp32 - fp16;
  }
  gap /= 1000.0;
  c.expect(std::abs(gap - 3.43) <= 0.01, "mean gap " + fmt(gap));
  return c;
}

}  // namespace

int main() {
  set_log_level(LogLevel::kError);
  const std::pair<const char*, std::function<Check()>> criteria[] = {
      {"AC1 accuracy/PDP arithmetic", ac1},     {"AC2 ratio sheet", ac2},
      {"AC3 cardinality", ac3},                 {"AC4 architecture oracle", ac4},
      {"AC5 layer counts", ac5},                {"AC6 TPE vs random search", ac6},
      {"AC7 end-to-end determinism", ac7},      {"AC8 stage-1 brute force", ac8},
      {"AC9 measurement protocol", ac9},        {"AC10 Pareto oracle", ac10},
      {"AC11 surrogate contract", ac11},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check result;
    try {
      result = fn();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    if (!result.ok) ++failed;
    std::printf("%s ... %s%s%s\n", name, result.ok ? "PASS" : "FAIL", result.detail.empty() ? "" : "  # ",
                result.detail.c_str());
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
