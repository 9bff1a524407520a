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

#include "edgenas/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "edgenas/architecture.hpp"
#include "edgenas/devices.hpp"
#include "edgenas/errors.hpp"
#include "edgenas/evaluators.hpp"
#include "edgenas/json_io.hpp"
#include "edgenas/log.hpp"
#include "edgenas/pipeline.hpp"
#include "edgenas/reporting.hpp"
#include "edgenas/search_space.hpp"
#include "edgenas/tpe.hpp"
#include "edgenas/trial_log.hpp"

#ifndef EDGENAS_DATA_DIR
#define EDGENAS_DATA_DIR "data"
#endif

namespace edgenas {
namespace {

namespace fs = std::filesystem;

const fs::path kDataDir = EDGENAS_DATA_DIR;

struct Options {
  std::string space = (kDataDir / "full_space.json").string();
  std::string config;
  std::string evaluator = "surrogate";
  std::optional<std::uint64_t> surrogate_seed;
  std::string devices = (kDataDir / "devices").string();
  std::string device_filter;
  std::string measure = "simulated";
  std::size_t budget = 2000;
  std::size_t keep1 = 1000;
  std::size_t keep2 = 10;
  std::uint64_t seed = 42;
  std::string out = ".";
  std::string format;
  int warmup_runs = 0;
  int latency_runs = 40;
  double jitter = 0.0;
  bool no_timestamps = false;
  bool sequential = false;
  int timeout_ms = 30000;
  std::string tables = (kDataDir / "published_tables.json").string();
  bool published = false;
  std::uint64_t count = 10;
  std::uint64_t offset = 0;
  std::optional<std::uint64_t> limit;
  std::string device_name;
  std::string observations;
  std::string precision;
  double idle_w = 0.0;
  bool all_devices = false;
};

// Everything a stage needs, loaded and validated before any work starts.
struct Prepared {
  std::optional<SearchSpace> space;
  std::vector<DeviceProfile> devices;
  std::unique_ptr<AccuracyEvaluator> evaluator;
  std::optional<Measurer> measurer;
};

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw ValidationError(std::string(what) + " not found: " + path);
}

SearchSpace prepare_space(const Options& o) {
  require_file(o.space, "space file");
  return load_space(o.space);
}

std::vector<DeviceProfile> prepare_devices(const Options& o) {
  if (!fs::is_directory(o.devices)) throw ValidationError("device directory not found: " + o.devices);
  std::vector<DeviceProfile> all = load_profiles(o.devices);
  if (o.device_filter.empty()) {
    if (all.empty()) throw ValidationError("no device profiles in " + o.devices);
    return all;
  }
  std::vector<DeviceProfile> picked;
  std::stringstream names(o.device_filter);
  std::string name;
  while (std::getline(names, name, ',')) {
    auto it = std::find_if(all.begin(), all.end(), [&](const DeviceProfile& p) { return p.name == name; });
    if (it == all.end()) throw ValidationError("unknown device: " + name);
    picked.push_back(*it);
  }
  return picked;
}

std::chrono::milliseconds timeout_of(const Options& o) {
  if (o.timeout_ms <= 0) throw ValidationError("--timeout-ms must be positive");
  return std::chrono::milliseconds(o.timeout_ms);
}

std::optional<std::string> exec_command(const std::string& selector, const char* flag) {
  if (selector.rfind("exec:", 0) == 0) {
    std::string cmd = selector.substr(5);
    if (cmd.empty()) throw ValidationError(std::string(flag) + " exec: needs a command line");
    return cmd;
  }
  return std::nullopt;
}

std::unique_ptr<AccuracyEvaluator> prepare_evaluator(const Options& o, const SearchSpace& space) {
  if (o.evaluator == "surrogate") {
    return std::make_unique<SurrogateEvaluator>(space, o.surrogate_seed.value_or(o.seed));
  }
  if (auto cmd = exec_command(o.evaluator, "--evaluator")) {
    return std::make_unique<ExternalEvaluator>(*cmd, timeout_of(o));
  }
  throw ValidationError("--evaluator must be surrogate or exec:\"CMD\", got " + o.evaluator);
}

Measurer prepare_measurer(const Options& o) {
  if (o.warmup_runs < 0) throw ValidationError("--warmup-runs must be non-negative");
  if (o.latency_runs < 2) throw ValidationError("--latency-runs must be at least 2");
  if (o.jitter < 0.0) throw ValidationError("--jitter must be non-negative");
  MeasurementProtocol protocol;
  protocol.latency_runs = o.latency_runs;
  protocol.warmup_runs = o.warmup_runs;
  protocol.jitter = o.jitter;
  protocol.jitter_seed = o.seed;
  if (o.measure == "simulated") return Measurer::simulated(protocol);
  if (auto cmd = exec_command(o.measure, "--measure")) {
    const auto timeout = timeout_of(o);
    // The device name is passed as the final argument so one script can
    // front several devices.
    return Measurer{protocol, [cmd = *cmd, timeout](const DeviceProfile& p) {
                      return std::unique_ptr<MeasurementBackend>(
                          std::make_unique<ExternalDeviceBackend>(cmd + " '" + p.name + "'", timeout));
                    }};
  }
  throw ValidationError("--measure must be simulated or exec:\"CMD\", got " + o.measure);
}

StageContext context_of(const Options& o, TrialLog* log) {
  StageContext ctx;
  ctx.seed = o.seed;
  ctx.log = log;
  ctx.timestamps = !o.no_timestamps;
  ctx.parallel_devices = !o.sequential;
  return ctx;
}

TpeSettings settings_of(const Options& o) {
  TpeSettings s;
  s.seed = o.seed;
  return s;
}

fs::path prepare_out(const Options& o) {
  fs::path dir = o.out;
  fs::create_directories(dir);
  return dir;
}

std::string format_or(const Options& o, const char* fallback) {
  const std::string f = o.format.empty() ? fallback : o.format;
  if (f != "csv" && f != "json" && f != "md") throw ValidationError("--format must be csv, json or md");
  return f;
}

std::string config_csv_header() { return "index,block,k1,k2,k3,k4,fc1,do1,fc2,do2\n"; }

std::string config_csv_row(std::uint64_t index, const Configuration& c) {
  char d1[16], d2[16];
  std::snprintf(d1, sizeof(d1), "%.2f", c.do1 / 100.0);
  std::snprintf(d2, sizeof(d2), "%.2f", c.do2 / 100.0);
  std::ostringstream os;
  os << index << "," << c.block << "," << c.k1 << "," << c.k2 << ","
     << (c.k3 ? std::to_string(*c.k3) : "") << "," << (c.k4 ? std::to_string(*c.k4) : "") << ","
     << c.fc1 << "," << d1 << "," << c.fc2 << "," << d2 << "\n";
  return os.str();
}

void emit_configs(std::ostream& out, const std::string& format, const SearchSpace& space,
                  const std::vector<Configuration>& configs) {
  if (format == "csv") {
    out << config_csv_header();
    for (const auto& c : configs) out << config_csv_row(index_of(space, c), c);
    return;
  }
  if (format == "md") {
    for (const auto& c : configs) out << "- " << to_string(c) << "\n";
    return;
  }
  for (const auto& c : configs) out << config_to_json(c).dump() << "\n";
}

// ---- subcommand bodies ---------------------------------------------------

int cmd_space_count(const Options& o, std::ostream& out) {
  const SearchSpace space = prepare_space(o);
  const std::uint64_t n = cardinality(space);
  out << n << "\n";
  out << "note: the original description of this grid claims >13M configurations "
         "(elsewhere >10M); counting K3/K4 only when the block uses them gives "
      << n << ", and treating them as always present gives " << unconditional_cardinality(space)
      << "\n";
  return 0;
}

int cmd_space_enumerate(const Options& o, std::ostream& out) {
  const SearchSpace space = prepare_space(o);
  const std::string format = format_or(o, "csv");
  const std::uint64_t n = cardinality(space);
  const std::uint64_t end = o.limit ? std::min(n, o.offset + *o.limit) : n;
  if (format == "csv") out << config_csv_header();
  for (std::uint64_t i = o.offset; i < end; ++i) {
    const Configuration c = config_from_index(space, i);
    if (format == "csv") {
      out << config_csv_row(i, c);
    } else if (format == "md") {
      out << "- " << to_string(c) << "\n";
    } else {
      out << config_to_json(c).dump() << "\n";
    }
  }
  return 0;
}

int cmd_space_sample(const Options& o, std::ostream& out) {
  const SearchSpace space = prepare_space(o);
  const std::string format = format_or(o, "json");
  Rng rng = stream_rng(o.seed, 0);
  std::vector<Configuration> configs;
  for (std::uint64_t i = 0; i < o.count; ++i) configs.push_back(sample_uniform(space, rng));
  emit_configs(out, format, space, configs);
  return 0;
}

int cmd_arch_describe(const Options& o, std::ostream& out) {
  if (o.config.empty()) throw ValidationError("arch describe needs --config");
  require_file(o.config, "config file");
  const Configuration config = load_config(o.config);
  ArchitectureDescriptor arch;
  if (fs::is_regular_file(o.space)) {
    arch = build_architecture(config, load_space(o.space));
  } else {
    arch = build_architecture(config);
  }
  Json layers = Json::array();
  for (const auto& l : arch.layers) {
    layers.push_back({{"kind", layer_kind_name(l.kind)},
                      {"in", l.in_shape},
                      {"out", l.out_shape},
                      {"params", l.params},
                      {"macs", l.macs}});
  }
  const Json j = {{"config", config_to_json(config)},
                  {"layers", layers},
                  {"total_params", arch.total_params},
                  {"total_macs", arch.total_macs},
                  {"conv_macs", arch.conv_macs()},
                  {"fc_macs", arch.fc_macs()},
                  {"weighted_layers", arch.weighted_layer_count}};
  out << j.dump(2) << "\n";
  return 0;
}

void print_ranked(std::ostream& out, const std::string& title, const RankedSet& set, std::size_t limit) {
  out << title << " (" << set.records.size() << " kept, fitness " << fitness_name(set.fitness) << ")\n";
  for (std::size_t i = 0; i < std::min(limit, set.records.size()); ++i) {
    const auto& r = set.records[i];
    out << "  " << i + 1 << ". " << to_string(r.config) << "  accuracy " << *r.accuracy_pct;
    if (r.latency_mean_ms) out << "  latency " << *r.latency_mean_ms << " ms";
    if (r.dynamic_power_w) out << "  power " << *r.dynamic_power_w << " W";
    out << "  fitness " << r.fitness_value.value_or(0.0) << "\n";
  }
}

int cmd_search(const Options& o, std::ostream& out) {
  const SearchSpace space = prepare_space(o);
  auto evaluator = prepare_evaluator(o, space);
  if (o.keep1 == 0 || o.budget == 0) throw ValidationError("--budget and --keep1 must be positive");
  const fs::path dir = prepare_out(o);
  TrialLog log(dir / "trials.jsonl");
  const RankedSet ranked =
      stage1(space, *evaluator, settings_of(o), o.budget, o.keep1, context_of(o, &log));
  write_json_file(dir / "stage1.json", ranked_set_to_json(ranked));
  print_ranked(out, "stage 1", ranked, 5);
  return 0;
}

int cmd_stage2(const Options& o, std::ostream& out) {
  const SearchSpace space = prepare_space(o);
  const auto devices = prepare_devices(o);
  const Measurer measurer = prepare_measurer(o);
  const fs::path dir = o.out;
  require_file((dir / "stage1.json").string(), "stage-1 result");
  const RankedSet candidates = ranked_set_from_json(read_json_file(dir / "stage1.json"));
  if (o.keep2 == 0) throw ValidationError("--keep2 must be positive");
  TrialLog log(dir / "trials.jsonl");
  const Stage2Result result = stage2(candidates, devices, measurer, o.keep2, space, context_of(o, &log));
  write_json_file(dir / "stage2.json", stage2_to_json(result));
  for (const auto& [device, set] : result.ranked) print_ranked(out, "stage 2 " + device, set, 3);
  return 0;
}

int cmd_stage3(const Options& o, std::ostream& out) {
  const SearchSpace space = prepare_space(o);
  const auto devices = prepare_devices(o);
  const Measurer measurer = prepare_measurer(o);
  const fs::path dir = o.out;
  require_file((dir / "stage2.json").string(), "stage-2 result");
  const auto per_device = stage2_from_json(read_json_file(dir / "stage2.json"));
  TrialLog log(dir / "trials.jsonl");
  const Stage3Result result = stage3(per_device, devices, measurer, space, context_of(o, &log));
  write_json_file(dir / "stage3.json", stage3_to_json(result));
  for (const auto& [device, r] : result.winners) {
    out << device << ": " << to_string(r.config) << "  accuracy/PDP " << r.fitness_value.value_or(0.0)
        << "\n";
  }
  return 0;
}

int cmd_pipeline(const Options& o, std::ostream& out) {
  const SearchSpace space = prepare_space(o);
  const auto devices = prepare_devices(o);
  const Measurer measurer = prepare_measurer(o);
  auto evaluator = prepare_evaluator(o, space);
  if (o.keep1 == 0 || o.keep2 == 0 || o.budget == 0) {
    throw ValidationError("--budget, --keep1 and --keep2 must be positive");
  }
  const fs::path dir = prepare_out(o);
  TrialLog log(dir / "trials.jsonl");
  PipelineOptions popts;
  popts.budget = o.budget;
  popts.keep1 = o.keep1;
  popts.keep2 = o.keep2;
  const PipelineResult result =
      run_pipeline(space, *evaluator, settings_of(o), devices, measurer, popts, context_of(o, &log));
  write_json_file(dir / "stage1.json", ranked_set_to_json(result.stage1));
  write_json_file(dir / "stage2.json", stage2_to_json(result.stage2));
  write_json_file(dir / "stage3.json", stage3_to_json(result.stage3));
  for (const auto& [device, r] : result.stage3.winners) {
    out << device << ": " << to_string(r.config) << "  accuracy " << *r.accuracy_pct << "  latency "
        << *r.latency_mean_ms << " ms  power " << *r.dynamic_power_w << " W  accuracy/PDP "
        << r.fitness_value.value_or(0.0) << "\n";
  }
  return 0;
}

BestModel best_of(const TrialRecord& r) {
  return {r.config, *r.accuracy_pct, r.latency_mean_ms.value_or(0.0), r.dynamic_power_w};
}

int cmd_report(const Options& o, std::ostream& out) {
  require_file(o.tables, "published tables");
  const PublishedTables tables = load_published_tables(o.tables);
  const std::string format = format_or(o, "md");
  const fs::path dir = prepare_out(o);

  std::vector<DeviceSummaryRow> rows;
  RatioInputs inputs;
  std::vector<TrialRecord> front;
  if (o.published) {
    rows = tables.averages;
    inputs = tables.ratio_inputs();
  } else {
    for (const char* f : {"trials.jsonl", "stage2.json", "stage3.json"}) {
      require_file((dir / f).string(), "pipeline output");
    }
    TrialLog log(dir / "trials.jsonl");
    RecordGroups latency_groups, power_groups;
    for (const auto& r : log.records(2)) {
      if (r.device && !r.failed()) latency_groups[*r.device].push_back(r);
    }
    std::vector<TrialRecord> stage3_records;
    for (const auto& r : log.records(3)) {
      if (r.device && !r.failed()) {
        power_groups[*r.device].push_back(r);
        stage3_records.push_back(r);
      }
    }
    rows = summary_table(latency_groups, power_groups);
    for (const auto& row : rows) inputs.averages[row.device] = row;
    for (const auto& [device, set] : stage2_from_json(read_json_file(dir / "stage2.json"))) {
      if (!set.records.empty()) inputs.best_latency[device] = best_of(set.records.front());
    }
    for (const auto& [device, r] : stage3_from_json(read_json_file(dir / "stage3.json"))) {
      inputs.best_pdp[device] = best_of(r);
    }
    inputs.comparison = tables.comparison;
    front = pareto_front(stage3_records);
  }
  if (o.published) inputs.comparison = tables.comparison;

  const auto comparison = comparison_table(inputs.comparison);
  const auto claims = ratio_sheet(inputs);
  Json pareto = Json::array();
  for (const auto& r : front) pareto.push_back(record_to_json(r));
  const std::string markdown =
      report_markdown(rows, inputs.best_latency, inputs.best_pdp, comparison, claims);

  write_text_file(dir / "summary.csv", summary_to_csv(rows));
  write_text_file(dir / "best_models.csv", best_models_to_csv(inputs.best_latency, inputs.best_pdp));
  write_json_file(dir / "ratios.json", ratios_to_json(claims));
  write_json_file(dir / "pareto.json", pareto);
  write_text_file(dir / "report.md", markdown);

  if (format == "md") {
    out << markdown;
  } else if (format == "csv") {
    out << summary_to_csv(rows);
  } else {
    out << Json{{"summary", summary_to_json(rows)}, {"ratios", ratios_to_json(claims)}}.dump(2) << "\n";
  }
  return 0;
}

std::vector<FitObservation> observations_from_file(const std::string& path) {
  require_file(path, "observation file");
  const Json j = read_json_file(path);
  if (!j.is_array()) throw ValidationError(path + ": expected an array of observations");
  std::vector<FitObservation> obs;
  for (const auto& row : j) {
    FitObservation ob;
    ob.label = row.value("label", "observation " + std::to_string(obs.size() + 1));
    ob.features = cost_features(build_architecture(config_from_json(row.at("config"))));
    ob.latency_ms = row.at("latency_ms").get<double>();
    if (row.contains("power_w") && !row.at("power_w").is_null()) {
      ob.dynamic_power_w = row.at("power_w").get<double>();
    }
    obs.push_back(std::move(ob));
  }
  return obs;
}

DeviceProfile fit_one(const Options& o, const PublishedTables* tables, const SearchSpace& space,
                      const std::string& name) {
  Precision precision;
  if (!o.precision.empty()) {
    precision = parse_precision(o.precision);
  } else if (tables && tables->precision.count(name)) {
    precision = tables->precision.at(name);
  } else {
    throw ValidationError("no precision known for " + name + "; pass --precision");
  }
  FitOptions fopts;
  fopts.idle_w = o.idle_w;
  fopts.accuracy_delta_pct = PrecisionDeltas{}.of(precision);
  std::vector<FitObservation> obs;
  if (!o.observations.empty()) {
    obs = observations_from_file(o.observations);
    fopts.source = fs::path(o.observations).filename().string();
  } else {
    obs = fit_observations(*tables, name, space);
    fopts.source = "published tables (" + fs::path(o.tables).filename().string() + ")";
  }
  return fit_profile(obs, precision, name, fopts);
}

int cmd_fit_profile(const Options& o, std::ostream& out) {
  const SearchSpace space = prepare_space(o);
  std::optional<PublishedTables> tables;
  if (o.observations.empty() || o.all_devices || o.precision.empty()) {
    require_file(o.tables, "published tables");
    tables = load_published_tables(o.tables);
  }
  std::vector<std::string> names;
  if (o.all_devices) {
    if (!o.observations.empty()) throw ValidationError("--all cannot be combined with --observations");
    for (const auto& [name, p] : tables->precision) names.push_back(name);
  } else {
    if (o.device_name.empty()) throw ValidationError("fit-profile needs --device NAME or --all");
    names.push_back(o.device_name);
  }
  std::vector<DeviceProfile> fitted;
  for (const auto& name : names) fitted.push_back(fit_one(o, tables ? &*tables : nullptr, space, name));
  const fs::path dir = prepare_out(o);
  for (const auto& p : fitted) {
    write_json_file(dir / (p.name + ".json"), profile_to_json(p));
    out << p.name << ": latency rms " << p.fit->latency_rms_ms << " ms, power rms " << p.fit->power_rms_w
        << " W -> " << (dir / (p.name + ".json")).string() << "\n";
  }
  return 0;
}

int cmd_devices_list(const Options& o, std::ostream& out) {
  const auto devices = prepare_devices(o);
  const std::string format = format_or(o, "md");
  if (format == "json") {
    Json arr = Json::array();
    for (const auto& d : devices) arr.push_back(profile_to_json(d));
    out << arr.dump(2) << "\n";
    return 0;
  }
  if (format == "csv") {
    out << "name,precision,fixed_ms,conv_macs_per_ms,fc_macs_per_ms,per_layer_ms,idle_w,alpha_w,"
           "beta_w_per_kmacs_per_ms,accuracy_delta_pct\n";
  } else {
    out << "| Device | Precision | Fixed (ms) | Conv MAC/ms | FC MAC/ms | Per layer (ms) | Alpha (W) | "
           "Beta (W per kMAC/ms) | Accuracy delta |\n|---|---|---|---|---|---|---|---|---|\n";
  }
  for (const auto& d : devices) {
    const auto& l = d.latency_model;
    const auto& p = d.power_model;
    if (format == "csv") {
      out << d.name << "," << precision_name(d.precision) << "," << l.fixed_ms << ","
          << l.conv_macs_per_ms << "," << l.fc_macs_per_ms << "," << l.per_layer_ms << "," << p.idle_w
          << "," << p.alpha_w << "," << p.beta_w_per_kmacs_per_ms << "," << d.accuracy_delta_pct << "\n";
    } else {
      out << "| " << d.name << " | " << precision_name(d.precision) << " | " << l.fixed_ms << " | "
          << l.conv_macs_per_ms << " | " << l.fc_macs_per_ms << " | " << l.per_layer_ms << " | "
          << p.alpha_w << " | " << p.beta_w_per_kmacs_per_ms << " | " << d.accuracy_delta_pct << " |\n";
    }
  }
  return 0;
}

// ---- flag wiring ---------------------------------------------------------

void add_space(CLI::App* app, Options& o) {
  app->add_option("--space", o.space, "search space JSON")->capture_default_str();
}
void add_format(CLI::App* app, Options& o) {
  app->add_option("--format", o.format, "csv, json or md")->check(CLI::IsMember({"csv", "json", "md"}));
}
void add_out(CLI::App* app, Options& o) {
  app->add_option("--out", o.out, "output directory")->capture_default_str();
}
void add_seed(CLI::App* app, Options& o) {
  app->add_option("--seed", o.seed, "seed for every random choice")->capture_default_str();
}
void add_run_common(CLI::App* app, Options& o) {
  add_space(app, o);
  add_out(app, o);
  add_seed(app, o);
  add_format(app, o);
  app->add_flag("--no-timestamps", o.no_timestamps, "leave the ts field of trial records empty");
  app->add_option("--timeout-ms", o.timeout_ms, "per-request timeout for external processes")
      ->capture_default_str();
}
void add_search_flags(CLI::App* app, Options& o) {
  app->add_option("--evaluator", o.evaluator, "surrogate or exec:\"CMD\"")->capture_default_str();
  app->add_option("--surrogate-seed", o.surrogate_seed, "surrogate landscape seed (default: --seed)");
  app->add_option("--budget", o.budget, "stage-1 trial budget")->capture_default_str();
  app->add_option("--keep1", o.keep1, "stage-1 survivors")->capture_default_str();
}
void add_device_flags(CLI::App* app, Options& o) {
  app->add_option("--devices", o.devices, "directory of device profiles")->capture_default_str();
  app->add_option("--device", o.device_filter, "comma-separated subset of device names");
  app->add_option("--measure", o.measure, "simulated or exec:\"CMD\"")->capture_default_str();
  app->add_option("--warmup-runs", o.warmup_runs, "discarded leading latency runs")->capture_default_str();
  app->add_option("--latency-runs", o.latency_runs, "latency runs per model")->capture_default_str();
  app->add_option("--jitter", o.jitter, "relative noise of the simulated devices")->capture_default_str();
  app->add_flag("--sequential", o.sequential, "measure devices one after another");
}

int exit_code_for(const std::exception& e, std::ostream& err) {
  if (dynamic_cast<const ValidationError*>(&e)) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  if (auto* p = dynamic_cast<const ProtocolError*>(&e)) {
    err << "error: " << e.what() << "\n";
    if (!p->raw_line().empty()) err << "  offending line: " << p->raw_line() << "\n";
    return 2;
  }
  err << "error: " << e.what() << "\n";
  return 2;
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Hardware-aware architecture search for edge inference", "edgenas"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  int (*action)(const Options&, std::ostream&) = nullptr;
  auto on = [&](CLI::App* sub, int (*fn)(const Options&, std::ostream&)) {
    sub->callback([&action, fn] { action = fn; });
  };

  CLI::App* space = app.add_subcommand("space", "inspect a search space");
  space->require_subcommand(1);
  CLI::App* count = space->add_subcommand("count", "number of valid configurations");
  add_space(count, o);
  on(count, cmd_space_count);
  CLI::App* enumerate = space->add_subcommand("enumerate", "list configurations in canonical order");
  add_space(enumerate, o);
  add_format(enumerate, o);
  enumerate->add_option("--offset", o.offset, "first canonical index")->capture_default_str();
  enumerate->add_option("--limit", o.limit, "maximum number of configurations");
  on(enumerate, cmd_space_enumerate);
  CLI::App* sample = space->add_subcommand("sample", "draw configurations uniformly");
  add_space(sample, o);
  add_format(sample, o);
  add_seed(sample, o);
  sample->add_option("--count", o.count, "number of samples")->capture_default_str();
  on(sample, cmd_space_sample);

  CLI::App* arch = app.add_subcommand("arch", "architecture of one configuration");
  arch->require_subcommand(1);
  CLI::App* describe = arch->add_subcommand("describe", "layer table, parameters and MACs");
  describe->add_option("--config", o.config, "configuration JSON")->required();
  add_space(describe, o);
  on(describe, cmd_arch_describe);

  CLI::App* search = app.add_subcommand("search", "stage 1: accuracy search");
  add_run_common(search, o);
  add_search_flags(search, o);
  on(search, cmd_search);

  CLI::App* s2 = app.add_subcommand("stage2", "stage 2: latency on every device");
  add_run_common(s2, o);
  add_device_flags(s2, o);
  s2->add_option("--keep2", o.keep2, "survivors per device")->capture_default_str();
  on(s2, cmd_stage2);

  CLI::App* s3 = app.add_subcommand("stage3", "stage 3: dynamic power and final winners");
  add_run_common(s3, o);
  add_device_flags(s3, o);
  on(s3, cmd_stage3);

  CLI::App* pipeline = app.add_subcommand("pipeline", "all three stages");
  add_run_common(pipeline, o);
  add_search_flags(pipeline, o);
  pipeline->add_option("--keep2", o.keep2, "stage-2 survivors per device")->capture_default_str();
  add_device_flags(pipeline, o);
  on(pipeline, cmd_pipeline);

  CLI::App* report = app.add_subcommand("report", "summary tables, ratio sheet and Pareto front");
  add_out(report, o);
  add_format(report, o);
  report->add_option("--tables", o.tables, "published tables JSON")->capture_default_str();
  report->add_flag("--published", o.published, "report the published tables instead of a run");
  on(report, cmd_report);

  CLI::App* fit = app.add_subcommand("fit-profile", "fit a device profile to measurements");
  add_space(fit, o);
  add_out(fit, o);
  fit->add_option("--device", o.device_name, "device name");
  fit->add_flag("--all", o.all_devices, "every device in the published tables");
  fit->add_option("--observations", o.observations, "JSON array of {config, latency_ms, power_w}");
  fit->add_option("--tables", o.tables, "published tables JSON")->capture_default_str();
  fit->add_option("--precision", o.precision, "fp32, fp16 or int8")
      ->check(CLI::IsMember({"fp32", "fp16", "int8"}));
  fit->add_option("--idle-w", o.idle_w, "idle power stored in the profile")->capture_default_str();
  on(fit, cmd_fit_profile);

  CLI::App* devices = app.add_subcommand("devices", "device profiles");
  devices->require_subcommand(1);
  CLI::App* list = devices->add_subcommand("list", "show the profiles in --devices");
  list->add_option("--devices", o.devices, "directory of device profiles")->capture_default_str();
  add_format(list, o);
  on(list, cmd_devices_list);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }
  if (!action) {
    err << app.help();
    return 1;
  }
  try {
    return action(o, out);
  } catch (const std::exception& e) {
    return exit_code_for(e, err);
  }
}

}  // namespace edgenas
