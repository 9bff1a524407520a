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

#include "edgenas/devices.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "edgenas/errors.hpp"
#include "edgenas/nnls.hpp"

namespace edgenas {
namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

// Shifted mean: exact when every sample is identical.
double shifted_mean(std::span<const double> xs) {
  double acc = 0.0;
  for (double x : xs) acc += x - xs.front();
  return xs.front() + acc / static_cast<double>(xs.size());
}

std::vector<double> doubles_from(const Json& reply, const char* key) {
  const auto it = reply.find(key);
  if (it == reply.end() || !it->is_array()) {
    throw ProtocolError(std::string("response lacks array ") + key, reply.dump());
  }
  std::vector<double> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      throw ProtocolError(std::string("non-numeric entry in ") + key, reply.dump());
    }
    out.push_back(v.get<double>());
  }
  return out;
}

Json number(double v) {
  if (std::floor(v) == v && std::abs(v) < 1e15) return static_cast<long long>(v);
  return v;
}

double rate_per_ms(double macs_per_ms_inverse) {
  return macs_per_ms_inverse > 1.0 / kMaxMacsPerMs ? 1.0 / macs_per_ms_inverse : kMaxMacsPerMs;
}

double get_number(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    throw ValidationError(std::string("profile field ") + key + " must be a number");
  }
  return it->get<double>();
}

}  // namespace

void DeviceProfile::validate() const {
  const auto& l = latency_model;
  const auto& p = power_model;
  if (name.empty()) throw ValidationError("profile name must be non-empty");
  if (!(std::isfinite(l.conv_macs_per_ms) && l.conv_macs_per_ms > 0.0) ||
      !(std::isfinite(l.fc_macs_per_ms) && l.fc_macs_per_ms > 0.0)) {
    throw ValidationError(name + ": throughputs must be finite and positive");
  }
  if (!std::isfinite(l.fixed_ms) || !finite_nonneg(l.per_layer_ms) || !finite_nonneg(p.idle_w) ||
      !finite_nonneg(p.alpha_w) || !finite_nonneg(p.beta_w_per_kmacs_per_ms) ||
      !finite_nonneg(accuracy_delta_pct)) {
    throw ValidationError(name + ": coefficients must be finite and non-negative");
  }
}

CostFeatures cost_features(const ArchitectureDescriptor& arch) {
  return {static_cast<double>(arch.conv_macs()), static_cast<double>(arch.fc_macs()),
          static_cast<double>(arch.weighted_layer_count)};
}

CostFeatures population_mean_features(const SearchSpace& space) {
  // Dropout does not change cost, so enumerate everything else and weight by
  // the number of dropout combinations.
  const double dropout_weight = static_cast<double>(space.spec(Param::kDo1).grid_size()) *
                                space.spec(Param::kDo2).grid_size();
  const std::array<Param, 4> kernel_params = {Param::kK1, Param::kK2, Param::kK3, Param::kK4};
  CostFeatures sum;
  double count = 0.0;
  for (int block : space.block_values()) {
    std::vector<std::vector<int>> grids;
    for (int i = 0; i < block; ++i) grids.push_back(space.spec(kernel_params[i]).grid());
    std::vector<std::size_t> pos(grids.size(), 0);
    for (;;) {
      Configuration c;
      c.block = block;
      c.output_classes = space.output_classes();
      c.k1 = grids[0][pos[0]];
      c.k2 = grids[1][pos[1]];
      if (block >= 3) c.k3 = grids[2][pos[2]];
      if (block >= 4) c.k4 = grids[3][pos[3]];
      c.do1 = space.spec(Param::kDo1).lo;
      c.do2 = space.spec(Param::kDo2).lo;
      for (int fc1 : space.spec(Param::kFc1).grid()) {
        for (int fc2 : space.spec(Param::kFc2).grid()) {
          c.fc1 = fc1;
          c.fc2 = fc2;
          const CostFeatures f = cost_features(build_architecture(c));
          sum.conv_macs += dropout_weight * f.conv_macs;
          sum.fc_macs += dropout_weight * f.fc_macs;
          sum.weighted_layers += dropout_weight * f.weighted_layers;
          count += dropout_weight;
        }
      }
      std::size_t d = 0;
      while (d < pos.size() && ++pos[d] == grids[d].size()) pos[d++] = 0;
      if (d == pos.size()) break;
    }
  }
  return {sum.conv_macs / count, sum.fc_macs / count, sum.weighted_layers / count};
}

double simulate_latency(const CostFeatures& f, const DeviceProfile& profile) {
  const auto& m = profile.latency_model;
  return m.fixed_ms + f.conv_macs / m.conv_macs_per_ms + f.fc_macs / m.fc_macs_per_ms +
         f.weighted_layers * m.per_layer_ms;
}

double simulate_latency(const ArchitectureDescriptor& arch, const DeviceProfile& profile) {
  return simulate_latency(cost_features(arch), profile);
}

double simulate_dynamic_power(double total_macs, const DeviceProfile& profile, double latency_ms) {
  if (!(latency_ms > 0.0)) {
    throw ValidationError("latency must be positive to compute dynamic power");
  }
  const auto& p = profile.power_model;
  return p.alpha_w + p.beta_w_per_kmacs_per_ms * (total_macs / latency_ms) / 1000.0;
}

double simulate_dynamic_power(const ArchitectureDescriptor& arch, const DeviceProfile& profile,
                              double latency_ms) {
  return simulate_dynamic_power(static_cast<double>(arch.total_macs), profile, latency_ms);
}

LatencyStats latency_stats(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw MeasurementError("latency statistics need at least 2 samples, got " +
                           std::to_string(samples.size()));
  }
  const double mean = shifted_mean(samples);
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(samples.size() - 1))};
}

double dynamic_power_from_traces(std::span<const double> idle, std::span<const double> active) {
  if (idle.empty() || active.empty()) throw MeasurementError("empty power trace");
  const double diff = shifted_mean(active) - shifted_mean(idle);
  if (diff >= 0.0) return diff;
  if (diff >= -kNegativePowerTolerance) return 0.0;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "negative dynamic power %.2f W", diff);
  throw MeasurementError(buf);
}

int MeasurementProtocol::power_samples() const {
  return std::max(1, static_cast<int>(std::lround(power_window_s * power_sample_hz)));
}

SimulatedBackend::SimulatedBackend(DeviceProfile profile) : profile_(std::move(profile)) {
  profile_.validate();
}

std::vector<double> SimulatedBackend::latency_samples(const ArchitectureDescriptor& arch,
                                                      const MeasurementProtocol& protocol) {
  const double base = simulate_latency(arch, profile_);
  std::vector<double> out(static_cast<std::size_t>(protocol.warmup_runs + protocol.latency_runs),
                          base);
  if (protocol.jitter > 0.0) {
    Rng rng = stream_rng(protocol.jitter_seed,
                         stable_hash(profile_.name + "|latency|" + to_string(arch.config)));
    for (double& x : out) x = std::max(base * 1e-6, base * (1.0 + protocol.jitter * standard_normal(rng)));
  }
  return out;
}

PowerTraces SimulatedBackend::power_traces(const ArchitectureDescriptor& arch,
                                           const MeasurementProtocol& protocol) {
  const double power = simulate_dynamic_power(arch, profile_, simulate_latency(arch, profile_));
  const auto n = static_cast<std::size_t>(protocol.power_samples());
  const double idle = profile_.power_model.idle_w;
  PowerTraces t{std::vector<double>(n, idle), std::vector<double>(n, idle + power)};
  if (protocol.jitter > 0.0) {
    Rng rng = stream_rng(protocol.jitter_seed,
                         stable_hash(profile_.name + "|power|" + to_string(arch.config)));
    for (double& x : t.active_w) x = idle + power * (1.0 + protocol.jitter * standard_normal(rng));
  }
  return t;
}

ExternalDeviceBackend::ExternalDeviceBackend(const std::string& command_line,
                                             std::chrono::milliseconds timeout)
    : owned_(std::make_unique<ProcessChannel>(command_line)), client_(*owned_, timeout) {}

ExternalDeviceBackend::ExternalDeviceBackend(MessageChannel& channel,
                                             std::chrono::milliseconds timeout)
    : client_(channel, timeout) {}

std::vector<double> ExternalDeviceBackend::latency_samples(const ArchitectureDescriptor& arch,
                                                           const MeasurementProtocol& protocol) {
  const Json reply = client_.call({{"cmd", "measure_latency"},
                                   {"config", config_to_json(arch.config)},
                                   {"runs", protocol.warmup_runs + protocol.latency_runs}});
  return doubles_from(reply, "latency_ms");
}

PowerTraces ExternalDeviceBackend::power_traces(const ArchitectureDescriptor& arch,
                                                const MeasurementProtocol& protocol) {
  const Json reply = client_.call({{"cmd", "measure_power"},
                                   {"config", config_to_json(arch.config)},
                                   {"window_s", number(protocol.power_window_s)},
                                   {"sample_hz", number(protocol.power_sample_hz)}});
  return {doubles_from(reply, "idle_w"), doubles_from(reply, "active_w")};
}

LatencyStats measure_latency(const ArchitectureDescriptor& arch, MeasurementBackend& backend,
                             const MeasurementProtocol& protocol) {
  const std::vector<double> samples = backend.latency_samples(arch, protocol);
  const auto expected = static_cast<std::size_t>(protocol.warmup_runs + protocol.latency_runs);
  if (samples.size() != expected) {
    throw MeasurementError("expected " + std::to_string(expected) + " latency runs, got " +
                           std::to_string(samples.size()));
  }
  return latency_stats(std::span(samples).subspan(static_cast<std::size_t>(protocol.warmup_runs)));
}

double measure_dynamic_power(const ArchitectureDescriptor& arch, MeasurementBackend& backend,
                             const MeasurementProtocol& protocol) {
  const PowerTraces t = backend.power_traces(arch, protocol);
  return dynamic_power_from_traces(t.idle_w, t.active_w);
}

MeasurementStats measure(const ArchitectureDescriptor& arch, MeasurementBackend& backend,
                         const MeasurementProtocol& protocol) {
  const LatencyStats lat = measure_latency(arch, backend, protocol);
  MeasurementStats s;
  s.latency_mean_ms = lat.mean_ms;
  s.latency_std_ms = lat.std_ms;
  s.dynamic_power_w = measure_dynamic_power(arch, backend, protocol);
  s.n_latency_runs = protocol.latency_runs;
  s.power_sample_hz = protocol.power_sample_hz;
  s.power_window_s = protocol.power_window_s;
  return s;
}

DeviceProfile fit_profile(std::span<const FitObservation> obs, Precision precision,
                          std::string name, const FitOptions& options) {
  const auto n = static_cast<Eigen::Index>(obs.size());
  if (n < 2) throw FitError("fit needs at least 2 observations");

  Eigen::MatrixXd A(n, 4);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& o = obs[static_cast<std::size_t>(i)];
    if (!(o.latency_ms > 0.0)) throw FitError("observation " + o.label + ": latency must be positive");
    A.row(i) << 1.0, o.features.conv_macs, o.features.fc_macs, o.features.weighted_layers;
    y(i) = o.latency_ms;
  }
  const int latency_rank = scaled_rank(A);
  if (latency_rank < 2) {
    throw FitError("rank-deficient design: all observations have identical cost features");
  }
  // Columns are scaled to unit max-norm so the active-set tolerances are
  // comparable; coefficients are unscaled afterwards.
  Eigen::VectorXd scale = A.cwiseAbs().colwise().maxCoeff().transpose();
  for (Eigen::Index j = 0; j < scale.size(); ++j) {
    if (scale(j) == 0.0) scale(j) = 1.0;
  }
  const Eigen::VectorXd lat = nnls(A * scale.cwiseInverse().asDiagonal(), y).cwiseQuotient(scale);

  DeviceProfile p;
  p.name = std::move(name);
  p.precision = precision;
  p.accuracy_delta_pct = options.accuracy_delta_pct;
  p.latency_model = {lat(0), rate_per_ms(lat(1)), rate_per_ms(lat(2)), lat(3)};

  std::vector<Eigen::Index> with_power;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (obs[static_cast<std::size_t>(i)].dynamic_power_w) with_power.push_back(i);
  }
  if (with_power.empty()) throw FitError("no observation carries dynamic power");
  const auto m = static_cast<Eigen::Index>(with_power.size());
  Eigen::MatrixXd P(m, 2);
  Eigen::VectorXd z(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& o = obs[static_cast<std::size_t>(with_power[static_cast<std::size_t>(k)])];
    P.row(k) << 1.0, o.features.total_macs() / o.latency_ms / 1000.0;
    z(k) = *o.dynamic_power_w;
  }
  Eigen::Vector2d pscale = P.cwiseAbs().colwise().maxCoeff().transpose();
  for (Eigen::Index j = 0; j < 2; ++j) {
    if (pscale(j) == 0.0) pscale(j) = 1.0;
  }
  const Eigen::VectorXd pw = nnls(P * pscale.cwiseInverse().asDiagonal(), z).cwiseQuotient(pscale);
  p.power_model = {options.idle_w, pw(0), pw(1)};
  p.validate();

  FitReport report;
  report.source = options.source;
  report.latency_rank = latency_rank;
  report.power_rank = scaled_rank(P);
  double lat_ss = 0.0;
  double pow_ss = 0.0;
  for (const auto& o : obs) {
    FitResidual r{o.label, simulate_latency(o.features, p) - o.latency_ms, std::nullopt};
    lat_ss += r.latency_residual_ms * r.latency_residual_ms;
    if (o.dynamic_power_w) {
      r.power_residual_w =
          simulate_dynamic_power(o.features.total_macs(), p, o.latency_ms) - *o.dynamic_power_w;
      pow_ss += *r.power_residual_w * *r.power_residual_w;
    }
    report.residuals.push_back(std::move(r));
  }
  report.latency_rms_ms = std::sqrt(lat_ss / static_cast<double>(n));
  report.power_rms_w = std::sqrt(pow_ss / static_cast<double>(m));
  p.fit = std::move(report);
  return p;
}

Json profile_to_json(const DeviceProfile& p) {
  const auto& l = p.latency_model;
  const auto& w = p.power_model;
  Json j = {{"name", p.name},
            {"precision", precision_name(p.precision)},
            {"latency_model",
             {{"fixed_ms", l.fixed_ms},
              {"conv_macs_per_ms", l.conv_macs_per_ms},
              {"fc_macs_per_ms", l.fc_macs_per_ms},
              {"per_layer_ms", l.per_layer_ms}}},
            {"power_model",
             {{"idle_w", w.idle_w},
              {"alpha_w", w.alpha_w},
              {"beta_w_per_kmacs_per_ms", w.beta_w_per_kmacs_per_ms}}},
            {"accuracy_delta_pct", p.accuracy_delta_pct}};
  if (p.fit) {
    Json obs = Json::array();
    for (const auto& r : p.fit->residuals) {
      Json e = {{"label", r.label}, {"latency_residual_ms", r.latency_residual_ms}};
      e["power_residual_w"] = r.power_residual_w ? Json(*r.power_residual_w) : Json(nullptr);
      obs.push_back(std::move(e));
    }
    j["fit_residuals"] = {{"source", p.fit->source},
                          {"latency_rank", p.fit->latency_rank},
                          {"power_rank", p.fit->power_rank},
                          {"latency_rms_ms", p.fit->latency_rms_ms},
                          {"power_rms_w", p.fit->power_rms_w},
                          {"observations", std::move(obs)}};
  }
  return j;
}

DeviceProfile profile_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("profile must be a JSON object");
  DeviceProfile p;
  if (!j.contains("name") || !j["name"].is_string()) throw ValidationError("profile lacks name");
  p.name = j["name"].get<std::string>();
  if (!j.contains("precision") || !j["precision"].is_string()) {
    throw ValidationError(p.name + ": profile lacks precision");
  }
  p.precision = parse_precision(j["precision"].get<std::string>());
  if (!j.contains("latency_model") || !j.contains("power_model")) {
    throw ValidationError(p.name + ": profile lacks latency_model/power_model");
  }
  const Json& l = j["latency_model"];
  p.latency_model = {get_number(l, "fixed_ms"), get_number(l, "conv_macs_per_ms"),
                     get_number(l, "fc_macs_per_ms"), get_number(l, "per_layer_ms")};
  const Json& w = j["power_model"];
  p.power_model = {get_number(w, "idle_w"), get_number(w, "alpha_w"),
                   get_number(w, "beta_w_per_kmacs_per_ms")};
  p.accuracy_delta_pct = j.contains("accuracy_delta_pct") ? get_number(j, "accuracy_delta_pct") : 0.0;
  if (j.contains("fit_residuals") && j["fit_residuals"].is_object()) {
    const Json& f = j["fit_residuals"];
    FitReport r;
    r.source = f.value("source", "");
    r.latency_rank = f.value("latency_rank", 0);
    r.power_rank = f.value("power_rank", 0);
    r.latency_rms_ms = f.value("latency_rms_ms", 0.0);
    r.power_rms_w = f.value("power_rms_w", 0.0);
    for (const auto& e : f.value("observations", Json::array())) {
      FitResidual res{e.value("label", ""), e.value("latency_residual_ms", 0.0), std::nullopt};
      if (e.contains("power_residual_w") && e["power_residual_w"].is_number()) {
        res.power_residual_w = e["power_residual_w"].get<double>();
      }
      r.residuals.push_back(std::move(res));
    }
    p.fit = std::move(r);
  }
  p.validate();
  return p;
}

DeviceProfile load_profile(const std::filesystem::path& path) {
  try {
    return profile_from_json(read_json_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::vector<DeviceProfile> load_profiles(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ValidationError("device profile directory not found: " + dir.string());
  }
  std::vector<DeviceProfile> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") out.push_back(load_profile(entry.path()));
  }
  if (out.empty()) throw ValidationError("no device profiles in " + dir.string());
  std::sort(out.begin(), out.end(),
            [](const DeviceProfile& a, const DeviceProfile& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].name == out[i - 1].name) {
      throw ValidationError("duplicate device profile name: " + out[i].name);
    }
  }
  return out;
}

}  // namespace edgenas
