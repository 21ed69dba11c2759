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
#ifndef MRDESIGN_DATASET_HPP
#define MRDESIGN_DATASET_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "resonance.hpp"

namespace mrdesign {

struct Geometry {
  double radius_um = 0.0;
  double width_um = 0.0;
  double height_um = 0.0;

  std::array<double, 3> values() const { return {radius_um, width_um, height_um}; }
  bool operator==(const Geometry&) const = default;
};

inline const std::array<const char*, 3> kTargetNames = {"radius_um", "width_um", "height_um"};

struct GridSpec {
  std::vector<double> radii_um;
  std::vector<double> widths_um;
  std::vector<double> heights_um;

  void validate() const;
  std::size_t size() const { return radii_um.size() * widths_um.size() * heights_um.size(); }
  nlohmann::json to_json() const;

  // 30..130 µm step 20, 1.0..2.0 µm step 0.1, 0.50..0.80 µm step 0.05.
  static GridSpec reference_grid();
};

// start, start + step, ... up to stop inclusive (to within a millionth of a
// step), each value rounded to 1e-9 so that e.g. 1.1 comes out as the
// literal 1.1.
std::vector<double> axis_range(double start, double stop, double step);

// Resonator for a geometry, materials taken from the forward config.
ResonatorSpec resonator_for(const Geometry& g, const ForwardConfig& forward);

// Cartesian product, radius outermost, then width, height innermost.
std::vector<Geometry> enumerate_grid(const GridSpec& spec);

struct FeatureConfig {
  WavelengthWindow window{1.5, 1.6};
  bool include_d1 = false;

  std::vector<std::string> names() const;
  std::size_t size() const { return include_d1 ? 4 : 3; }
  nlohmann::json to_json() const;
  static FeatureConfig from_json(const nlohmann::json& j);
  bool operator==(const FeatureConfig& o) const {
    return window.lo_um == o.window.lo_um && window.hi_um == o.window.hi_um && include_d1 == o.include_d1;
  }
};

// (q0, q1, q2[, D1]) in Hz, quantized to the %.9e persistence format.
std::vector<double> feature_vector(const QuadraticFit& fit, double d1, const FeatureConfig& cfg);
std::vector<double> extract_features(const DintProfile& profile, const FeatureConfig& cfg);

struct SampleRecord {
  Geometry geometry;
  std::vector<double> features;
};

struct Reject {
  Geometry geometry;
  std::string reason;
};

struct DatasetMeta {
  std::uint64_t seed = 0;
  std::string tool_version;
  nlohmann::json grid;     // GridSpec, null for loaded datasets without a sidecar
  nlohmann::json solver;   // forward configuration
  std::string solver_hash;
  std::vector<Reject> rejects;
};

struct Dataset {
  std::vector<SampleRecord> records;
  FeatureConfig features;
  DatasetMeta meta;

  void validate() const;
  std::size_t size() const { return records.size(); }
  // Hash over the CSV serialization.
  std::string content_hash() const;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// One record per geometry in grid order; failing geometries go to
// meta.rejects. More than 10% rejects aborts with ErrorCode::rejects.
Dataset generate_dataset(const GridSpec& grid, const ForwardConfig& forward, const FeatureConfig& features,
                         std::uint64_t seed, int jobs = 0, const ProgressFn& progress = {});

std::string dataset_csv(const Dataset& ds);
nlohmann::json dataset_meta_json(const Dataset& ds);

// Writes <path> and the sidecar <stem>.meta.json next to it.
void save_dataset(const Dataset& ds, const std::string& csv_path);
std::string meta_path_for(const std::string& csv_path);
// Reads the CSV and, when present, the sidecar.
Dataset load_dataset(const std::string& csv_path);
Dataset parse_dataset_csv(const std::string& text, const std::string& source);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded uniform shuffle; train gets floor(ratio * N), test the rest.
Split split_train_test(std::size_t n, double ratio, std::uint64_t seed);
Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices);

// Column-wise min-max scaling learned from training rows.
class MinMaxNormalizer {
 public:
  MinMaxNormalizer() = default;
  MinMaxNormalizer(std::vector<double> min, std::vector<double> max);

  static MinMaxNormalizer fit(const std::vector<std::vector<double>>& rows);

  // Constant columns map to 0 and invert back to their value.
  std::vector<double> apply(const std::vector<double>& x) const;
  std::vector<double> invert(const std::vector<double>& x) const;
  double apply(std::size_t column, double v) const;
  double invert(std::size_t column, double v) const;

  const std::vector<double>& min() const { return min_; }
  const std::vector<double>& max() const { return max_; }
  std::size_t size() const { return min_.size(); }

  nlohmann::json to_json() const;
  static MinMaxNormalizer from_json(const nlohmann::json& j);

 private:
  std::vector<double> min_, max_;
};

}  // namespace mrdesign

#endif
