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
#ifndef MRDESIGN_INVERSE_HPP
#define MRDESIGN_INVERSE_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dataset.hpp"
#include "model.hpp"

namespace mrdesign {

enum class MeasuredSchema { wavelength_dint, mode_resonance };

struct MeasuredProfile {
  MeasuredSchema schema = MeasuredSchema::wavelength_dint;
  DintProfile profile;
};

// Two accepted layouts:
//   wavelength_nm,dint_hz      D_int is re-anchored to zero at the pump and
//                              D1 comes from the central difference of ω
//   mode_index,resonance_hz    D1 and D_int as for a simulated comb
// Rows must be strictly monotone (either direction), at least 5 of them.
// The row nearest the pump wavelength gets µ = 0; on a tie the shorter
// wavelength wins. µ grows with frequency.
MeasuredProfile ingest_measured(const CsvTable& table, double pump_um = 1.557);
MeasuredProfile ingest_measured_file(const std::string& path, double pump_um = 1.557);
MeasuredProfile ingest_measured_text(const std::string& text, double pump_um = 1.557);

// wavelength_nm,dint_hz in ascending wavelength, %.17g.
std::string export_measured(const DintProfile& profile);

// Same µ set and ω, D_int, D1 equal to `rel_tol` (D_int relative to the
// profile's largest |D_int|).
bool profiles_match(const DintProfile& a, const DintProfile& b, double rel_tol = 1e-9);

struct GeometryEstimate {
  Geometry predicted;
  std::vector<double> features;
  std::vector<std::string> feature_names;
  QuadraticFit fit;
  std::vector<std::string> warnings;
  bool low_confidence = false;
  std::optional<Geometry> actual;
  std::array<double, 3> percent_error{};  // valid when actual is set
  std::string model_kind;

  nlohmann::json to_json() const;
};

// Fit over the model's window, normalize if the model does, predict, map
// targets back. Partial window coverage and features outside the training
// range are reported as warnings; |q2| below 1% of the training maximum or
// any out-of-range feature sets low_confidence.
GeometryEstimate predict_geometry(const Model& model, const DintProfile& profile,
                                  const std::optional<Geometry>& actual = std::nullopt);

struct SensitivityConfig {
  double delta = 0.10;
  WavelengthWindow window{1.5, 1.6};
  double floor_hz = 1e6;  // |D_int| / 2π below this is excluded

  void validate() const;
  nlohmann::json to_json() const;
};

struct SensitivityEntry {
  std::string parameter;
  double perturbed_value_um = 0.0;
  double mape_percent = 0.0;
  std::size_t points = 0;
  std::size_t excluded = 0;
};

struct SensitivityReport {
  Geometry baseline;
  SensitivityConfig config;
  std::vector<SensitivityEntry> entries;  // radius, height, width

  nlohmann::json to_json() const;
};

// Published reference values for a +10% perturbation (radius, height, width),
// percent. Informational only.
inline constexpr std::array<double, 3> kReferenceSensitivityPercent = {0.01, 0.04, 0.05};

// MAPE of D_int between a profile and a reference over the reference's modes
// inside the window that both profiles share, skipping small reference values.
SensitivityEntry compare_profiles(const DintProfile& reference, const DintProfile& other, const SensitivityConfig& cfg);

SensitivityReport sensitivity_analysis(const Geometry& baseline, const ForwardConfig& forward,
                                       const SensitivityConfig& cfg = {}, int jobs = 0);

struct RoundTripReport {
  Geometry actual;
  GeometryEstimate estimate;
  double dint_rms_hz = 0.0;  // over shared modes inside the feature window
  double dint_max_abs_hz = 0.0;
  std::size_t shared_points = 0;

  nlohmann::json to_json() const;
};

RoundTripReport round_trip(const Model& model, const Geometry& actual, const ForwardConfig& forward);

}  // namespace mrdesign

#endif
