/*
 * Copyright 2026 the dmasim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/// @file config_file.hpp
/// Flat, human-editable scenario files: INI-style sections with key = value
/// lines, `#` or `;` comments. parse(emit(config)) round-trips exactly.

#pragma once

#include <stdexcept>
#include <string>

#include "dmasim/scenario.hpp"

namespace dmasim {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

ScenarioConfig parse_scenario_text(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);
std::string emit_scenario_text(const ScenarioConfig& config);
void save_scenario_file(const ScenarioConfig& config, const std::string& path);

}  // namespace dmasim
