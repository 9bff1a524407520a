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
#include <string>

#include <json.hpp>

#include "edgenas/search_space.hpp"

namespace edgenas {

using Json = nlohmann::json;

// {"block":2,"k1":16,"k2":24,"fc1":100,"do1_hundredths":20,"fc2":80,"do2_hundredths":14}
// Absent k3/k4 mean inactive. "output_classes" is written only when it is not 7.
Json config_to_json(const Configuration& config);
Configuration config_from_json(const Json& j);

// {"block":{"lo":2,"hi":4,"step":1}, ..., "do1":{"lo_hundredths":10,...}, "output_classes":7}
Json space_to_json(const SearchSpace& space);
SearchSpace space_from_json(const Json& j);

// Parse errors surface as ValidationError naming the file.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const Json& j);

SearchSpace load_space(const std::filesystem::path& path);
Configuration load_config(const std::filesystem::path& path);

}  // namespace edgenas
