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

#include <fstream>
#include <future>
#include <iterator>
#include <set>

#include "edgenas/errors.hpp"
#include "edgenas/trial_log.hpp"
#include "test_support.hpp"

using namespace edgenas;

namespace {

TrialRecord stage1_record(std::uint64_t index, double acc) {
  TrialRecord r;
  r.config = config_from_index(full_space(), index);
  r.accuracy_pct = acc;
  r.fitness_value = acc;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("append, dedup and reload") {
  testing::TempDir dir;
  const auto path = dir / "trials.jsonl";
  {
    TrialLog log(path);
    CHECK(log.append(stage1_record(1, 95.0)));
    CHECK(log.append(stage1_record(2, 96.0)));
    CHECK_FALSE(log.append(stage1_record(1, 97.0)));
    TrialRecord dev = stage1_record(1, 95.0);
    dev.stage = 2;
    dev.device = "pi";
    dev.latency_mean_ms = 1.0;
    dev.fitness_kind = FitnessKind::kAccuracyPerLatency;
    CHECK(log.append(dev));
    dev.device = "coral-dev";
    CHECK(log.append(dev));
    CHECK(log.size() == 4);
  }
  TrialLog again(path);
  CHECK(again.size() == 4);
  CHECK(again.records(1).size() == 2);
  CHECK(again.records(2).size() == 2);
  const auto found = again.find(1, std::nullopt, config_from_index(full_space(), 1));
  REQUIRE(found.has_value());
  CHECK(*found->accuracy_pct == 95.0);
  CHECK_FALSE(again.find(2, std::string("jetson-low"), config_from_index(full_space(), 1)));
}

TEST_CASE("a truncated last line is dropped") {
  testing::TempDir dir;
  const auto path = dir / "trials.jsonl";
  {
    TrialLog log(path);
    log.append(stage1_record(1, 95.0));
    log.append(stage1_record(2, 96.0));
  }
  const std::string full = slurp(path);
  {
    std::ofstream out(path, std::ios::trunc);
    out << full.substr(0, full.size() - 20);
  }
  TrialLog log(path);
  CHECK(log.size() == 1);
  CHECK(log.append(stage1_record(3, 97.0)));
  TrialLog reread(path);
  CHECK(reread.size() == 2);
}

TEST_CASE("corruption in the middle is an error") {
  testing::TempDir dir;
  const auto path = dir / "trials.jsonl";
  {
    std::ofstream out(path);
    out << "{not json}\n";
  }
  CHECK_THROWS_AS(TrialLog{path}, ValidationError);
}

TEST_CASE("concurrent appends keep whole lines") {
  testing::TempDir dir;
  const auto path = dir / "trials.jsonl";
  TrialLog log(path);
  std::vector<std::future<void>> workers;
  for (int w = 0; w < 4; ++w) {
    workers.push_back(std::async(std::launch::async, [&log, w] {
      for (int i = 0; i < 50; ++i) log.append(stage1_record(static_cast<std::uint64_t>(w * 1000 + i), 90.0));
    }));
  }
  for (auto& f : workers) f.get();
  TrialLog reread(path);
  CHECK(reread.size() == 200);
}

TEST_CASE("in-memory log") {
  TrialLog log;
  CHECK(log.append(stage1_record(1, 95.0)));
  CHECK_FALSE(log.append(stage1_record(1, 95.0)));
  CHECK(log.size() == 1);
}
