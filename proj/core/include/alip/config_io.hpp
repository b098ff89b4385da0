// Copyright 2026 The alip Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>

#include "alip/biped.hpp"
#include "alip/control.hpp"
#include "alip/simlab.hpp"

namespace alip {

/// JSON keys of the five links, in Link order.
const char* link_key(Link which);

/// All readers reject unknown keys and wrong types with a ValidationError
/// naming the offending field. Missing fields keep their defaults.
PlanarBiped biped_from_json(const std::string& text);
std::string biped_to_json(const PlanarBiped& model);
PlanarBiped load_biped(const std::filesystem::path& path);

GaitCommand gait_command_from_json(const std::string& text);
std::string gait_command_to_json(const GaitCommand& cmd);

VirtualConstraintSpec constraint_spec_from_json(const std::string& text);
std::string constraint_spec_to_json(const VirtualConstraintSpec& spec);

/// `model_file` entries are resolved against base_dir.
ScenarioConfig scenario_from_json(const std::string& text,
                                  const std::filesystem::path& base_dir = {});
std::string scenario_to_json(const ScenarioConfig& config);
ScenarioConfig load_scenario(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace alip
