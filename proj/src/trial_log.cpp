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

#include "edgenas/trial_log.hpp"

#include <fstream>
#include <iterator>

#include "edgenas/errors.hpp"
#include "edgenas/log.hpp"

namespace edgenas {

TrialLog::TrialLog(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.empty() || !std::filesystem::exists(path_)) return;
  std::ifstream in(path_, std::ios::binary);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const std::string line = text.substr(pos, complete ? nl - pos : std::string::npos);
    ++lineno;
    if (!line.empty()) {
      TrialRecord r;
      try {
        r = record_from_json(Json::parse(line));
      } catch (const std::exception& e) {
        if (!complete) {
          // A crash mid-append leaves a partial final line; drop it so the
          // next append starts on a clean line.
          log_warn(path_.string() + ": dropping truncated last record");
          std::filesystem::resize_file(path_, pos);
          break;
        }
        throw ValidationError(path_.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
      const std::string k = key(r.stage, r.device, r.config);
      if (index_.count(k) == 0) {
        index_.emplace(k, records_.size());
        records_.push_back(std::move(r));
      }
    }
    if (!complete) {
      std::ofstream(path_, std::ios::app | std::ios::binary) << '\n';
      break;
    }
    pos = nl + 1;
  }
}

std::string TrialLog::key(int stage, const std::optional<std::string>& device,
                          const Configuration& config) {
  return std::to_string(stage) + "|" + device.value_or("") + "|" + config_to_json(config).dump();
}

bool TrialLog::append(const TrialRecord& record) {
  const std::string k = key(record.stage, record.device, record.config);
  std::lock_guard lock(mu_);
  if (index_.count(k) != 0) return false;
  if (!path_.empty()) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw Error("cannot append to " + path_.string());
    // One write per record so a crash leaves at most a truncated last line.
    const std::string line = record_to_json(record).dump() + "\n";
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.flush();
  }
  index_.emplace(k, records_.size());
  records_.push_back(record);
  return true;
}

std::optional<TrialRecord> TrialLog::find(int stage, const std::optional<std::string>& device,
                                          const Configuration& config) const {
  std::lock_guard lock(mu_);
  const auto it = index_.find(key(stage, device, config));
  if (it == index_.end()) return std::nullopt;
  return records_[it->second];
}

std::vector<TrialRecord> TrialLog::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::vector<TrialRecord> TrialLog::records(int stage) const {
  std::lock_guard lock(mu_);
  std::vector<TrialRecord> out;
  for (const auto& r : records_) {
    if (r.stage == stage) out.push_back(r);
  }
  return out;
}

std::size_t TrialLog::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

}  // namespace edgenas
