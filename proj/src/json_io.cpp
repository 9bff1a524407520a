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

#include "edgenas/json_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "edgenas/errors.hpp"

namespace edgenas {
namespace {

int require_int(const Json& j, const std::string& key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError("missing key: " + key);
  if (!it->is_number_integer()) throw ValidationError("key " + key + " must be an integer");
  return it->get<int>();
}

}  // namespace

Json config_to_json(const Configuration& c) {
  Json j = {{"block", c.block}, {"k1", c.k1}, {"k2", c.k2}};
  if (c.k3) j["k3"] = *c.k3;
  if (c.k4) j["k4"] = *c.k4;
  j["fc1"] = c.fc1;
  j["do1_hundredths"] = c.do1;
  j["fc2"] = c.fc2;
  j["do2_hundredths"] = c.do2;
  if (c.output_classes != 7) j["output_classes"] = c.output_classes;
  return j;
}

Configuration config_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("configuration must be a JSON object");
  static const std::vector<std::string> known = {"block", "k1",  "k2",  "k3",
                                                 "k4",    "fc1", "do1_hundredths",
                                                 "fc2",   "do2_hundredths", "output_classes"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError("unknown configuration key: " + key);
    }
  }
  Configuration c;
  c.block = require_int(j, "block");
  c.k1 = require_int(j, "k1");
  c.k2 = require_int(j, "k2");
  if (j.contains("k3")) c.k3 = require_int(j, "k3");
  if (j.contains("k4")) c.k4 = require_int(j, "k4");
  c.fc1 = require_int(j, "fc1");
  c.do1 = require_int(j, "do1_hundredths");
  c.fc2 = require_int(j, "fc2");
  c.do2 = require_int(j, "do2_hundredths");
  if (j.contains("output_classes")) c.output_classes = require_int(j, "output_classes");
  return c;
}

Json space_to_json(const SearchSpace& space) {
  Json j = Json::object();
  for (Param p : kAllParams) {
    const auto& s = space.spec(p);
    if (is_dropout(p)) {
      j[param_key(p)] = {{"lo_hundredths", s.lo}, {"hi_hundredths", s.hi},
                         {"step_hundredths", s.step}};
    } else {
      j[param_key(p)] = {{"lo", s.lo}, {"hi", s.hi}, {"step", s.step}};
    }
  }
  j["output_classes"] = space.output_classes();
  return j;
}

SearchSpace space_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("space definition must be a JSON object");
  std::vector<ParamSpec> specs;
  for (Param p : kAllParams) {
    const auto it = j.find(param_key(p));
    if (it == j.end()) throw ValidationError(std::string("missing parameter: ") + param_label(p));
    const std::string suffix = is_dropout(p) ? "_hundredths" : "";
    try {
      specs.push_back({param_label(p), require_int(*it, "lo" + suffix),
                       require_int(*it, "hi" + suffix), require_int(*it, "step" + suffix), {}});
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(param_label(p)) + ": " + e.what());
    }
  }
  const int classes = j.contains("output_classes") ? require_int(j, "output_classes") : 7;
  return build_space(specs, classes);
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ValidationError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

SearchSpace load_space(const std::filesystem::path& path) {
  try {
    return space_from_json(read_json_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

Configuration load_config(const std::filesystem::path& path) {
  try {
    return config_from_json(read_json_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace edgenas
