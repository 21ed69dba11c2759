/*
Copyright 2026 The mrdesign Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#ifndef MRDESIGN_RUN_CONFIG_HPP
#define MRDESIGN_RUN_CONFIG_HPP

// JSON run configuration. Every section is optional; unknown keys anywhere
// are rejected with ErrorCode::config. docs/config.schema.json describes the
// same layout.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dataset.hpp"
#include "inverse.hpp"
#include "model.hpp"

namespace mrdesign {

struct RunConfig {
  ForwardConfig forward;
  FeatureConfig features;
  GridSpec grid = GridSpec::reference_grid();
  TrainConfig training;
  std::vector<std::size_t> nmae_trees{1, 2, 5, 10, 20, 50, 100, 150, 180, 200};
  SensitivityConfig sensitivity;
  std::uint64_t seed = 0;
  int jobs = 0;

  // `base_dir` resolves a relative materials_file.
  static RunConfig from_json(const nlohmann::json& j, const std::string& base_dir = ".");
  static RunConfig load(const std::string& path);
  nlohmann::json to_json() const;
};

nlohmann::json mode_config_json(const ModeSolverConfig& cfg);
nlohmann::json resonance_config_json(const ResonanceSolverConfig& cfg);
// Materials, mode solver and resonance settings; hashed into dataset metadata.
nlohmann::json forward_config_json(const ForwardConfig& cfg);

ModeSolverConfig mode_config_from_json(const nlohmann::json& j, ModeSolverConfig base = {});
ResonanceSolverConfig resonance_config_from_json(const nlohmann::json& j, ResonanceSolverConfig base = {});
GridSpec grid_from_json(const nlohmann::json& j);

}  // namespace mrdesign

#endif
