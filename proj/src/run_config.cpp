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
#include "run_config.hpp"

#include <algorithm>
#include <filesystem>
#include <initializer_list>

#include "common.hpp"

namespace mrdesign {

namespace {

void require_object(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::config, where + " must be a JSON object");
}

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  require_object(j, where);
  for (const auto& [key, value] : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!ok) fail(ErrorCode::config, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const nlohmann::json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::config, where + "." + key + " has the wrong type");
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, const std::string& where, T& out) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

std::pair<double, double> read_pair(const nlohmann::json& j, const char* key, const std::string& where) {
  const auto v = get<std::vector<double>>(j, key, where);
  if (v.size() != 2) fail(ErrorCode::config, where + "." + key + " must be [lo, hi]");
  return {v[0], v[1]};
}

std::vector<double> read_axis(const nlohmann::json& j, const std::string& where) {
  if (j.is_array()) {
    try {
      return j.get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      fail(ErrorCode::config, where + " must be an array of numbers");
    }
  }
  check_keys(j, {"start", "stop", "step"}, where);
  return axis_range(get<double>(j, "start", where), get<double>(j, "stop", where), get<double>(j, "step", where));
}

const char* strategy_name(ResonanceStrategy s) {
  return s == ResonanceStrategy::direct ? "direct" : "interpolated";
}

}  // namespace

nlohmann::json mode_config_json(const ModeSolverConfig& cfg) {
  return {{"nx", cfg.nx},
          {"ny", cfg.ny},
          {"clad_width_um", cfg.clad_width_um},
          {"clad_height_um", cfg.clad_height_um},
          {"bend", cfg.bend},
          {"core_material", cfg.core_material},
          {"clad_material", cfg.clad_material},
          {"eigen_rel_tol", cfg.eigen.rel_tol},
          {"eigen_max_iterations", cfg.eigen.max_iterations}};
}

nlohmann::json resonance_config_json(const ResonanceSolverConfig& cfg) {
  return {{"threshold_hz", cfg.threshold_hz},
          {"max_iterations", cfg.max_iterations},
          {"band_um", {cfg.band.lo_um, cfg.band.hi_um}},
          {"strategy", strategy_name(cfg.strategy)},
          {"samples", cfg.samples},
          {"pump_wavelength_um", cfg.pump_wavelength_um},
          {"spot_checks", cfg.spot_checks},
          {"spot_offset", cfg.spot_offset}};
}

nlohmann::json forward_config_json(const ForwardConfig& cfg) {
  return {{"materials", cfg.materials.to_json()},
          {"mode_solver", mode_config_json(cfg.mode)},
          {"resonance", resonance_config_json(cfg.resonance)}};
}

ModeSolverConfig mode_config_from_json(const nlohmann::json& j, ModeSolverConfig cfg) {
  const std::string w = "mode_solver";
  check_keys(j, {"nx", "ny", "clad_width_um", "clad_height_um", "bend", "core_material", "clad_material",
                 "eigen_rel_tol", "eigen_max_iterations"},
             w);
  read(j, "nx", w, cfg.nx);
  read(j, "ny", w, cfg.ny);
  read(j, "clad_width_um", w, cfg.clad_width_um);
  read(j, "clad_height_um", w, cfg.clad_height_um);
  read(j, "bend", w, cfg.bend);
  read(j, "core_material", w, cfg.core_material);
  read(j, "clad_material", w, cfg.clad_material);
  read(j, "eigen_rel_tol", w, cfg.eigen.rel_tol);
  read(j, "eigen_max_iterations", w, cfg.eigen.max_iterations);
  if (cfg.nx < 4 || cfg.ny < 4) fail(ErrorCode::config, "mode_solver grid needs at least 4 cells per axis");
  if (!(cfg.clad_width_um > 0.0) || !(cfg.clad_height_um > 0.0))
    fail(ErrorCode::config, "mode_solver cladding box must be positive");
  if (!(cfg.eigen.rel_tol > 0.0) || cfg.eigen.max_iterations < 1)
    fail(ErrorCode::config, "mode_solver eigen settings out of range");
  return cfg;
}

ResonanceSolverConfig resonance_config_from_json(const nlohmann::json& j, ResonanceSolverConfig cfg) {
  const std::string w = "resonance";
  check_keys(j, {"threshold_hz", "max_iterations", "band_um", "strategy", "samples", "pump_wavelength_um",
                 "spot_checks", "spot_offset"},
             w);
  read(j, "threshold_hz", w, cfg.threshold_hz);
  read(j, "max_iterations", w, cfg.max_iterations);
  if (j.contains("band_um")) {
    const auto [lo, hi] = read_pair(j, "band_um", w);
    cfg.band = {lo, hi};
  }
  if (j.contains("strategy")) {
    const auto s = get<std::string>(j, "strategy", w);
    if (s == "direct") cfg.strategy = ResonanceStrategy::direct;
    else if (s == "interpolated") cfg.strategy = ResonanceStrategy::interpolated;
    else fail(ErrorCode::config, "resonance.strategy must be 'direct' or 'interpolated'");
  }
  read(j, "samples", w, cfg.samples);
  read(j, "pump_wavelength_um", w, cfg.pump_wavelength_um);
  read(j, "spot_checks", w, cfg.spot_checks);
  read(j, "spot_offset", w, cfg.spot_offset);
  cfg.validate();
  return cfg;
}

GridSpec grid_from_json(const nlohmann::json& j) {
  check_keys(j, {"radii_um", "widths_um", "heights_um"}, "grid");
  GridSpec g = GridSpec::reference_grid();
  if (j.contains("radii_um")) g.radii_um = read_axis(j.at("radii_um"), "grid.radii_um");
  if (j.contains("widths_um")) g.widths_um = read_axis(j.at("widths_um"), "grid.widths_um");
  if (j.contains("heights_um")) g.heights_um = read_axis(j.at("heights_um"), "grid.heights_um");
  g.validate();
  return g;
}

RunConfig RunConfig::from_json(const nlohmann::json& j, const std::string& base_dir) {
  check_keys(j, {"$schema", "seed", "jobs", "materials_file", "materials", "mode_solver", "resonance", "features",
                 "grid", "split", "training", "evaluation", "sensitivity"},
             "config");
  RunConfig rc;
  read(j, "seed", "config", rc.seed);
  read(j, "jobs", "config", rc.jobs);
  if (rc.jobs < 0) fail(ErrorCode::config, "jobs must be >= 0");

  if (j.contains("materials_file")) {
    std::filesystem::path p = get<std::string>(j, "materials_file", "config");
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    rc.forward.materials.load_file(p.string());
  }
  if (j.contains("materials")) rc.forward.materials.merge_json(j.at("materials"));
  if (j.contains("mode_solver")) rc.forward.mode = mode_config_from_json(j.at("mode_solver"));
  if (j.contains("resonance")) rc.forward.resonance = resonance_config_from_json(j.at("resonance"));
  rc.forward.materials.get(rc.forward.mode.core_material);
  rc.forward.materials.get(rc.forward.mode.clad_material);

  if (j.contains("features")) {
    const auto& f = j.at("features");
    check_keys(f, {"window_um", "include_d1"}, "features");
    if (f.contains("window_um")) {
      const auto [lo, hi] = read_pair(f, "window_um", "features");
      if (!(lo < hi)) fail(ErrorCode::config, "features.window_um needs lo < hi");
      rc.features.window = {lo, hi};
    }
    read(f, "include_d1", "features", rc.features.include_d1);
  }

  if (j.contains("grid")) rc.grid = grid_from_json(j.at("grid"));

  if (j.contains("split")) {
    const auto& s = j.at("split");
    check_keys(s, {"ratio"}, "split");
    read(s, "ratio", "split", rc.training.split_ratio);
    if (!(rc.training.split_ratio > 0.0 && rc.training.split_ratio < 1.0))
      fail(ErrorCode::config, "split.ratio must lie in (0, 1)");
  }

  if (j.contains("training")) {
    const auto& t = j.at("training");
    check_keys(t, {"model", "normalize", "multi_output", "folds", "param_grid"}, "training");
    if (t.contains("model")) rc.training.kind = model_kind_from_string(get<std::string>(t, "model", "training"));
    read(t, "normalize", "training", rc.training.normalize);
    read(t, "multi_output", "training", rc.training.multi_output);
    read(t, "folds", "training", rc.training.folds);
    if (rc.training.folds < 2) fail(ErrorCode::config, "training.folds must be >= 2");
    if (t.contains("param_grid")) rc.training.param_grid = ParamGrid::from_json(t.at("param_grid"));
  }

  if (j.contains("evaluation")) {
    const auto& e = j.at("evaluation");
    check_keys(e, {"nmae_trees"}, "evaluation");
    read(e, "nmae_trees", "evaluation", rc.nmae_trees);
  }

  if (j.contains("sensitivity")) {
    const auto& s = j.at("sensitivity");
    check_keys(s, {"delta", "window_um", "floor_hz"}, "sensitivity");
    read(s, "delta", "sensitivity", rc.sensitivity.delta);
    if (s.contains("window_um")) {
      const auto [lo, hi] = read_pair(s, "window_um", "sensitivity");
      rc.sensitivity.window = {lo, hi};
    }
    read(s, "floor_hz", "sensitivity", rc.sensitivity.floor_hz);
    rc.sensitivity.validate();
  }
  return rc;
}

RunConfig RunConfig::load(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::config, path + ": not valid JSON: " + e.what());
  } catch (const Error& e) {
    fail(ErrorCode::config, e.what());
  }
  return from_json(j, std::filesystem::path(path).parent_path().string());
}

nlohmann::json RunConfig::to_json() const {
  return {{"seed", seed},
          {"jobs", jobs},
          {"materials", forward.materials.to_json()},
          {"mode_solver", mode_config_json(forward.mode)},
          {"resonance", resonance_config_json(forward.resonance)},
          {"features", {{"window_um", {features.window.lo_um, features.window.hi_um}}, {"include_d1", features.include_d1}}},
          {"grid", grid.to_json()},
          {"split", {{"ratio", training.split_ratio}}},
          {"training",
           {{"model", to_string(training.kind)},
            {"normalize", training.normalize},
            {"multi_output", training.multi_output},
            {"folds", training.folds},
            {"param_grid", training.grid().to_json()}}},
          {"evaluation", {{"nmae_trees", nmae_trees}}},
          {"sensitivity", sensitivity.to_json()}};
}

}  // namespace mrdesign
