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
#ifndef MRDESIGN_MATERIAL_HPP
#define MRDESIGN_MATERIAL_HPP

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace mrdesign {

struct SellmeierTerm {
  double strength;       // B_i, dimensionless
  double resonance_um;   // C_i
};

struct WavelengthRange {
  double lo_um;
  double hi_um;
  bool contains(double lambda_um) const { return lambda_um >= lo_um && lambda_um <= hi_um; }
};

// n^2(λ) = offset + Σ B_i λ² / (λ² - C_i²), λ in µm.
class SellmeierModel {
 public:
  // Throws ErrorCode::config when a pole lies inside the valid range or n^2
  // is not positive across it.
  SellmeierModel(std::string name, double constant_offset, std::vector<SellmeierTerm> terms,
                 WavelengthRange valid_range = {0.5, 2.5});

  double refractive_index(double lambda_um) const;
  double index_squared(double lambda_um) const;

  const std::string& name() const { return name_; }
  double constant_offset() const { return constant_offset_; }
  const std::vector<SellmeierTerm>& terms() const { return terms_; }
  const WavelengthRange& valid_range() const { return range_; }

  nlohmann::json to_json() const;
  static SellmeierModel from_json(const nlohmann::json& j);

 private:
  double evaluate(double lambda_um) const;

  std::string name_;
  double constant_offset_;
  std::vector<SellmeierTerm> terms_;
  WavelengthRange range_;
};

inline double refractive_index(const SellmeierModel& model, double lambda_um) {
  return model.refractive_index(lambda_um);
}

class MaterialLibrary {
 public:
  // Built-in Si3N4 and SiO2 models.
  MaterialLibrary();

  // Adds or replaces models from a JSON document: a single model object or
  // an array of them. The built-ins stay resolvable.
  void merge_json(const nlohmann::json& doc);
  void load_file(const std::string& path);

  const SellmeierModel& get(const std::string& name) const;
  bool contains(const std::string& name) const { return models_.count(name) != 0; }
  std::vector<std::string> names() const;
  nlohmann::json to_json() const;

  static SellmeierModel silicon_nitride();
  static SellmeierModel fused_silica();

 private:
  void put(SellmeierModel model);
  std::map<std::string, SellmeierModel> models_;
};

}  // namespace mrdesign

#endif
