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

#include <doctest.h>

#include <chrono>
#include <cmath>

#include "edgenas/architecture.hpp"
#include "edgenas/devices.hpp"
#include "edgenas/errors.hpp"
#include "edgenas/nnls.hpp"
#include "edgenas/random.hpp"
#include "edgenas/reporting.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace edgenas;
using namespace std::chrono_literals;

namespace {

DeviceProfile make_profile() {
  DeviceProfile p;
  p.name = "bench";
  p.precision = Precision::kFp16;
  p.latency_model = {0.4, 8.0e6, 2.0e6, 0.05};
  p.power_model = {1.5, 0.3, 2.0e-4};
  p.accuracy_delta_pct = 3.43;
  return p;
}

// Returns fixed raw samples, independent of the model.
class FixedBackend final : public MeasurementBackend {
 public:
  FixedBackend(std::vector<double> latency, PowerTraces traces)
      : latency_(std::move(latency)), traces_(std::move(traces)) {}
  std::vector<double> latency_samples(const ArchitectureDescriptor&, const MeasurementProtocol&) override {
    return latency_;
  }
  PowerTraces power_traces(const ArchitectureDescriptor&, const MeasurementProtocol&) override {
    return traces_;
  }

 private:
  std::vector<double> latency_;
  PowerTraces traces_;
};

std::vector<double> ramp_latency() {
  std::vector<double> v;
  for (int i = 0; i < 40; ++i) v.push_back(1.0 + 0.1 * i);
  return v;
}

PowerTraces ramp_traces() {
  PowerTraces t;
  for (int i = 0; i < 180; ++i) {
    t.idle_w.push_back(2.0 + 0.01 * (i % 3));
    t.active_w.push_back(3.0 + 0.02 * (i % 2));
  }
  return t;
}

std::vector<FitObservation> synthetic_observations(const DeviceProfile& truth, int n, std::uint64_t seed) {
  const SearchSpace s = full_space();
  Rng rng = stream_rng(seed, 0);
  std::vector<FitObservation> obs;
  for (int i = 0; i < n; ++i) {
    const ArchitectureDescriptor a = build_architecture(sample_uniform(s, rng));
    const double lat = simulate_latency(a, truth);
    obs.push_back({"obs" + std::to_string(i), cost_features(a), lat,
                   simulate_dynamic_power(a, truth, lat)});
  }
  return obs;
}

}  // namespace

TEST_CASE("latency model") {
  DeviceProfile p = make_profile();
  p.latency_model.per_layer_ms = 0.0;
  CHECK(simulate_latency(CostFeatures{}, p) == 0.4);

  const ArchitectureDescriptor a = build_architecture(testing::pi_best());
  const DeviceProfile base = make_profile();
  DeviceProfile fast = base;
  fast.latency_model.conv_macs_per_ms *= 2;
  fast.latency_model.fc_macs_per_ms *= 2;
  const double fixed = base.latency_model.fixed_ms + 7 * base.latency_model.per_layer_ms;
  CHECK(simulate_latency(a, fast) - fixed ==
        doctest::Approx((simulate_latency(a, base) - fixed) / 2).epsilon(1e-12));
  CHECK(simulate_latency(a, base) >= base.latency_model.fixed_ms);

  // Adding MACs never lowers latency.
  Rng rng = stream_rng(8, 0);
  for (int i = 0; i < 200; ++i) {
    CostFeatures f{uniform_real(rng, 0, 1e8), uniform_real(rng, 0, 1e6), 7};
    CostFeatures g = f;
    g.conv_macs += uniform_real(rng, 0, 1e6);
    g.fc_macs += uniform_real(rng, 0, 1e4);
    CHECK(simulate_latency(g, base) >= simulate_latency(f, base));
  }
}

TEST_CASE("power model") {
  DeviceProfile p = make_profile();
  const ArchitectureDescriptor a = build_architecture(testing::pi_best());
  const double lat = 2.0;
  const double rate_term = simulate_dynamic_power(a, p, lat) - p.power_model.alpha_w;
  CHECK(rate_term == doctest::Approx(2.0e-4 * 10970992.0 / 2.0 / 1000.0));
  CHECK(simulate_dynamic_power(a, p, lat / 2) - p.power_model.alpha_w == doctest::Approx(2 * rate_term));
  p.power_model.beta_w_per_kmacs_per_ms = 0.0;
  CHECK(simulate_dynamic_power(a, p, 1.0) == 0.3);
  CHECK_THROWS_AS(simulate_dynamic_power(a, p, 0.0), ValidationError);
}

TEST_CASE("latency statistics") {
  const std::vector<double> same(40, 2.51);
  const LatencyStats s = latency_stats(same);
  CHECK(s.mean_ms == 2.51);
  CHECK(s.std_ms == 0.0);
  const LatencyStats two = latency_stats(std::vector<double>{1.0, 3.0});
  CHECK(two.mean_ms == 2.0);
  CHECK(two.std_ms == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(latency_stats(std::vector<double>{1.0}), MeasurementError);

  Rng rng = stream_rng(4, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v;
    for (int i = 0; i < 40; ++i) v.push_back(uniform_real(rng, 0.1, 9.0));
    const LatencyStats st = latency_stats(v);
    CHECK(st.mean_ms == doctest::Approx(oracle::mean(v)).epsilon(1e-12));
    CHECK(st.std_ms == doctest::Approx(oracle::sample_std(v)).epsilon(1e-12));
  }
}

TEST_CASE("dynamic power from traces") {
  CHECK(dynamic_power_from_traces(std::vector<double>(180, 2.00), std::vector<double>(180, 3.41)) ==
        doctest::Approx(1.41));
  CHECK(dynamic_power_from_traces(std::vector<double>(180, 2.0), std::vector<double>(180, 2.0)) == 0.0);
  CHECK(dynamic_power_from_traces(std::vector<double>(180, 2.0), std::vector<double>(180, 1.96)) == 0.0);
  CHECK_THROWS_WITH_AS(
      dynamic_power_from_traces(std::vector<double>(180, 2.0), std::vector<double>(180, 1.8)),
      "negative dynamic power -0.20 W", MeasurementError);
  CHECK_THROWS_AS(dynamic_power_from_traces(std::vector<double>{}, std::vector<double>{1.0}),
                  MeasurementError);
}

TEST_CASE("simulated measurement") {
  const DeviceProfile p = make_profile();
  SimulatedBackend backend(p);
  const ArchitectureDescriptor a = build_architecture(testing::pi_best());
  MeasurementProtocol proto;
  const MeasurementStats m = measure(a, backend, proto);
  CHECK(m.latency_mean_ms == doctest::Approx(simulate_latency(a, p)).epsilon(1e-12));
  CHECK(m.latency_std_ms == 0.0);
  CHECK(m.n_latency_runs == 40);
  CHECK(m.power_window_s == 180.0);
  CHECK(m.power_sample_hz == 1.0);
  CHECK(m.dynamic_power_w ==
        doctest::Approx(simulate_dynamic_power(a, p, simulate_latency(a, p))).epsilon(1e-12));

  proto.warmup_runs = 5;
  CHECK(backend.latency_samples(a, proto).size() == 45);
  CHECK(measure_latency(a, backend, proto).mean_ms == doctest::Approx(m.latency_mean_ms));
}

TEST_CASE("simulated jitter is seeded") {
  const DeviceProfile p = make_profile();
  SimulatedBackend backend(p);
  const ArchitectureDescriptor a = build_architecture(testing::pi_best());
  MeasurementProtocol proto;
  proto.jitter = 0.05;
  proto.jitter_seed = 1;
  const LatencyStats x = measure_latency(a, backend, proto);
  const LatencyStats y = measure_latency(a, backend, proto);
  CHECK(x.std_ms > 0.0);
  CHECK(x.mean_ms == y.mean_ms);
  CHECK(x.std_ms == y.std_ms);
  proto.jitter_seed = 2;
  CHECK(measure_latency(a, backend, proto).mean_ms != x.mean_ms);
}

TEST_CASE("external device protocol") {
  const ArchitectureDescriptor a = build_architecture(testing::pi_best());
  const MeasurementProtocol proto;

  SUBCASE("constant samples") {
    ExternalDeviceBackend dev(testing::mock("device 2.35 2.00 4.08"), 5000ms);
    const MeasurementStats m = measure(a, dev, proto);
    CHECK(m.latency_mean_ms == doctest::Approx(2.35).epsilon(1e-12));
    CHECK(m.latency_std_ms == 0.0);
    CHECK(m.dynamic_power_w == doctest::Approx(2.08).epsilon(1e-12));
  }
  SUBCASE("hand-computed statistics") {
    ExternalDeviceBackend dev(testing::mock("device-ramp"), 5000ms);
    const MeasurementStats m = measure(a, dev, proto);
    CHECK(m.latency_mean_ms == doctest::Approx(2.95).epsilon(1e-12));
    CHECK(m.latency_std_ms == doctest::Approx(0.1 * std::sqrt(40.0 * 41.0 / 12.0)).epsilon(1e-12));
    CHECK(m.dynamic_power_w == doctest::Approx(1.0).epsilon(1e-12));

    FixedBackend fixed(ramp_latency(), ramp_traces());
    const MeasurementStats f = measure(a, fixed, proto);
    CHECK(f.latency_mean_ms == m.latency_mean_ms);
    CHECK(f.latency_std_ms == m.latency_std_ms);
    CHECK(f.dynamic_power_w == m.dynamic_power_w);
  }
  SUBCASE("short reply") {
    ExternalDeviceBackend dev(testing::mock("device-short 2.0"), 5000ms);
    CHECK_THROWS_WITH_AS(measure_latency(a, dev, proto), "expected 40 latency runs, got 39",
                         MeasurementError);
  }
  SUBCASE("negative dynamic power") {
    ExternalDeviceBackend dev(testing::mock("device-negative"), 5000ms);
    CHECK_THROWS_WITH_AS(measure_dynamic_power(a, dev, proto), "negative dynamic power -0.20 W",
                         MeasurementError);
  }
  SUBCASE("device error reply") {
    ExternalDeviceBackend dev(testing::mock("error 'sensor offline'"), 5000ms);
    CHECK_THROWS_AS(measure_latency(a, dev, proto), EvaluationError);
  }
}

TEST_CASE("nnls agrees with the brute-force support search") {
  Rng rng = stream_rng(31, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 3 + static_cast<int>(uniform_index(rng, 6));
    const int n = 1 + static_cast<int>(uniform_index(rng, 4));
    Eigen::MatrixXd a(m, n);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = uniform_real(rng, -1.0, 2.0);
      b(i) = uniform_real(rng, -2.0, 3.0);
    }
    const Eigen::VectorXd x = nnls(a, b);
    const Eigen::VectorXd ref = oracle::nnls_brute_force(a, b);
    CHECK((x.array() >= 0.0).all());
    CHECK((a * x - b).squaredNorm() == doctest::Approx((a * ref - b).squaredNorm()).epsilon(1e-9));
  }
}

TEST_CASE("fit recovers the generating profile") {
  const DeviceProfile truth = make_profile();
  const auto obs = synthetic_observations(truth, 12, 5);
  const DeviceProfile fit = fit_profile(obs, Precision::kFp16, "bench", {1.5, 3.43, "synthetic"});
  auto rel = [](double x, double y) { return std::abs(x - y) / std::abs(y); };
  CHECK(rel(fit.latency_model.fixed_ms, truth.latency_model.fixed_ms) < 1e-6);
  CHECK(rel(fit.latency_model.conv_macs_per_ms, truth.latency_model.conv_macs_per_ms) < 1e-6);
  CHECK(rel(fit.latency_model.fc_macs_per_ms, truth.latency_model.fc_macs_per_ms) < 1e-6);
  CHECK(rel(fit.latency_model.per_layer_ms, truth.latency_model.per_layer_ms) < 1e-6);
  CHECK(rel(fit.power_model.alpha_w, truth.power_model.alpha_w) < 1e-6);
  CHECK(rel(fit.power_model.beta_w_per_kmacs_per_ms, truth.power_model.beta_w_per_kmacs_per_ms) < 1e-6);
  CHECK(fit.power_model.idle_w == 1.5);
  CHECK(fit.accuracy_delta_pct == 3.43);
  REQUIRE(fit.fit.has_value());
  CHECK(fit.fit->latency_rank == 4);
  CHECK(fit.fit->latency_rms_ms < 1e-9);
  CHECK(fit.fit->residuals.size() == 12);
}

TEST_CASE("two observations are interpolated exactly") {
  const DeviceProfile truth = make_profile();
  const auto obs = synthetic_observations(truth, 2, 9);
  const DeviceProfile fit = fit_profile(obs, Precision::kFp16, "two");
  for (const auto& o : obs) {
    CHECK(simulate_latency(o.features, fit) == doctest::Approx(o.latency_ms).epsilon(1e-9));
  }
  CHECK(fit.fit->latency_rank == 2);
}

TEST_CASE("degenerate fits are reported") {
  const DeviceProfile truth = make_profile();
  auto obs = synthetic_observations(truth, 1, 2);
  obs.push_back(obs.front());
  CHECK_THROWS_AS(fit_profile(obs, Precision::kFp16, "dup"), FitError);

  // Same features, different latencies: never a silent perfect fit.
  auto clash = synthetic_observations(truth, 3, 4);
  FitObservation twin = clash.front();
  twin.latency_ms *= 1.5;
  clash.push_back(twin);
  bool reported = false;
  try {
    const DeviceProfile f = fit_profile(clash, Precision::kFp16, "clash");
    reported = f.fit->latency_rms_ms > 1e-6;
  } catch (const FitError&) {
    reported = true;
  }
  CHECK(reported);

  auto no_power = synthetic_observations(truth, 5, 6);
  for (auto& o : no_power) o.dynamic_power_w.reset();
  CHECK_THROWS_AS(fit_profile(no_power, Precision::kFp16, "nopower"), FitError);
}

TEST_CASE("profile files roundtrip and validate") {
  const DeviceProfile truth = make_profile();
  const DeviceProfile fit =
      fit_profile(synthetic_observations(truth, 6, 3), Precision::kInt8, "rt", {0.5, 0.0, "unit"});
  const DeviceProfile back = profile_from_json(profile_to_json(fit));
  CHECK(profile_to_json(back) == profile_to_json(fit));
  CHECK(back.fit->source == "unit");

  Json bad = profile_to_json(truth);
  bad["latency_model"]["conv_macs_per_ms"] = 0.0;
  CHECK_THROWS_AS(profile_from_json(bad), ValidationError);
  bad = profile_to_json(truth);
  bad["power_model"]["alpha_w"] = -1.0;
  CHECK_THROWS_AS(profile_from_json(bad), ValidationError);
}

TEST_CASE("shipped profiles") {
  const auto profiles = load_profiles(testing::data_path("devices"));
  std::vector<std::string> names;
  for (const auto& p : profiles) names.push_back(p.name);
  CHECK(names == std::vector<std::string>{"coral-dev", "jetson-high", "jetson-low", "pi", "pi-ncs2", "pi-tpu"});

  const PublishedTables tables = load_published_tables(testing::data_path("published_tables.json"));
  for (const auto& p : profiles) {
    REQUIRE(p.fit.has_value());
    CHECK_FALSE(p.fit->source.empty());
    CHECK(p.precision == tables.precision.at(p.name));
    CHECK(p.accuracy_delta_pct == PrecisionDeltas{}.of(p.precision));
    // Each input row is reproduced within the residual recorded in the file.
    const auto obs = fit_observations(tables, p.name, full_space());
    REQUIRE(obs.size() == p.fit->residuals.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double predicted = simulate_latency(obs[i].features, p);
      CHECK(predicted - obs[i].latency_ms ==
            doctest::Approx(p.fit->residuals[i].latency_residual_ms).epsilon(1e-9).scale(1.0));
    }
  }
  auto find = [&](const std::string& n) {
    return *std::find_if(profiles.begin(), profiles.end(), [&](const auto& p) { return p.name == n; });
  };
  CHECK(find("jetson-low").accuracy_delta_pct == find("jetson-high").accuracy_delta_pct);

  const DeviceProfile coral = find("coral-dev");
  const BestModel& coral_row = tables.best_latency.at("coral-dev");
  const double coral_lat = simulate_latency(build_architecture(*coral_row.config), coral);
  CHECK(std::abs(coral_lat - 0.39) <= std::abs(coral.fit->residuals[0].latency_residual_ms) + 1e-9);

  const DeviceProfile tpu = find("pi-tpu");
  const BestModel& tpu_row = tables.best_pdp.at("pi-tpu");
  const ArchitectureDescriptor tpu_arch = build_architecture(*tpu_row.config);
  const double tpu_power = simulate_dynamic_power(tpu_arch, tpu, tpu_row.latency_ms);
  CHECK(std::abs(tpu_power - 0.77) <= std::abs(*tpu.fit->residuals[1].power_residual_w) + 1e-9);
}
