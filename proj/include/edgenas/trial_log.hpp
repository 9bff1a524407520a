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
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "edgenas/pipeline.hpp"

namespace edgenas {

// Append-only JSONL trial store keyed by (stage, device, configuration).
// Existing files are loaded on construction so interrupted runs resume.
// An empty path keeps records in memory only.
class TrialLog {
 public:
  TrialLog() = default;
  explicit TrialLog(std::filesystem::path path);

  // Returns false (and writes nothing) when the key is already present.
  bool append(const TrialRecord& record);

  std::optional<TrialRecord> find(int stage, const std::optional<std::string>& device,
                                  const Configuration& config) const;
  std::vector<TrialRecord> records() const;
  std::vector<TrialRecord> records(int stage) const;
  std::size_t size() const;

 private:
  static std::string key(int stage, const std::optional<std::string>& device,
                         const Configuration& config);

  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::vector<TrialRecord> records_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace edgenas
