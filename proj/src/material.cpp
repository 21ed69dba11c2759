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
#include "material.hpp"

#include <cmath>

#include "common.hpp"

namespace mrdesign {

namespace {

constexpr int kPositivityProbes = 1000;

std::string lambda_text(double lambda_um) { return format_exact(lambda_um) + " um"; }

}  // namespace

SellmeierModel::SellmeierModel(std::string name, double constant_offset, std::vector<SellmeierTerm> terms,
                               WavelengthRange valid_range)
    : name_(std::move(name)), constant_offset_(constant_offset), terms_(std::move(terms)), range_(valid_range) {
  if (name_.empty()) fail(ErrorCode::config, "material model needs a name");
  if (!(range_.lo_um > 0.0) || !(range_.hi_um > range_.lo_um))
    fail(ErrorCode::config, name_ + ": valid range must satisfy 0 < lo < hi");
  for (const auto& t : terms_) {
    if (!std::isfinite(t.strength) || !std::isfinite(t.resonance_um) || t.resonance_um < 0.0)
      fail(ErrorCode::config, name_ + ": Sellmeier terms need finite B and C >= 0");
    if (range_.contains(t.resonance_um))
      fail(ErrorCode::config, name_ + ": Sellmeier pole at " + lambda_text(t.resonance_um) +
                                  " lies inside the valid range");
  }
  for (int i = 0; i <= kPositivityProbes; ++i) {
    const double lambda = range_.lo_um + (range_.hi_um - range_.lo_um) * i / kPositivityProbes;
    if (!(evaluate(lambda) > 0.0))
      fail(ErrorCode::config, name_ + ": n^2 is not positive at " + lambda_text(lambda));
  }
}

double SellmeierModel::evaluate(double lambda_um) const {
  const double l2 = lambda_um * lambda_um;
  double n2 = constant_offset_;
  for (const auto& t : terms_) n2 += t.strength * l2 / (l2 - t.resonance_um * t.resonance_um);
  return n2;
}

double SellmeierModel::index_squared(double lambda_um) const {
  if (!range_.contains(lambda_um))
    fail(ErrorCode::domain, name_ + ": wavelength " + lambda_text(lambda_um) + " outside valid range [" +
                                format_exact(range_.lo_um) + ", " + format_exact(range_.hi_um) + "] um");
  const double n2 = evaluate(lambda_um);
  if (!(n2 > 0.0) || !std::isfinite(n2))
    fail(ErrorCode::domain, name_ + ": non-positive n^2 at " + lambda_text(lambda_um));
  return n2;
}

double SellmeierModel::refractive_index(double lambda_um) const { return std::sqrt(index_squared(lambda_um)); }

nlohmann::json SellmeierModel::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : terms_) terms.push_back({t.strength, t.resonance_um});
  return {{"name", name_},
          {"constant_offset", constant_offset_},
          {"terms", terms},
          {"valid_range_um", {range_.lo_um, range_.hi_um}}};
}

SellmeierModel SellmeierModel::from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::config, "material entry must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    if (k != "name" && k != "constant_offset" && k != "terms" && k != "valid_range_um")
      fail(ErrorCode::config, "unknown material key '" + k + "'");
  }
  try {
    const auto name = j.at("name").get<std::string>();
    const double offset = j.value("constant_offset", 1.0);
    std::vector<SellmeierTerm> terms;
    for (const auto& t : j.at("terms")) {
      if (!t.is_array() || t.size() != 2) fail(ErrorCode::config, name + ": each term must be [B, C]");
      terms.push_back({t[0].get<double>(), t[1].get<double>()});
    }
    WavelengthRange range{0.5, 2.5};
    if (j.contains("valid_range_um")) {
      const auto& r = j.at("valid_range_um");
      if (!r.is_array() || r.size() != 2) fail(ErrorCode::config, name + ": valid_range_um must be [lo, hi]");
      range = {r[0].get<double>(), r[1].get<double>()};
    }
    return SellmeierModel(name, offset, std::move(terms), range);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::config, std::string("malformed material entry: ") + e.what());
  }
}

// Luke et al. (2015) stoichiometric LPCVD nitride; C values in µm.
SellmeierModel MaterialLibrary::silicon_nitride() {
  return SellmeierModel("Si3N4", 1.0, {{3.0249, 0.1353406}, {40314.0, 1239.842}});
}

// Malitson (1965) fused silica.
SellmeierModel MaterialLibrary::fused_silica() {
  return SellmeierModel("SiO2", 1.0, {{0.6961663, 0.0684043}, {0.4079426, 0.1162414}, {0.8974794, 9.896161}});
}

MaterialLibrary::MaterialLibrary() {
  put(silicon_nitride());
  put(fused_silica());
}

void MaterialLibrary::put(SellmeierModel model) {
  auto name = model.name();
  models_.insert_or_assign(std::move(name), std::move(model));
}

void MaterialLibrary::merge_json(const nlohmann::json& doc) {
  if (doc.is_array()) {
    for (const auto& entry : doc) put(SellmeierModel::from_json(entry));
  } else {
    put(SellmeierModel::from_json(doc));
  }
}

void MaterialLibrary::load_file(const std::string& path) {
  const auto text = read_text_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::config, path + ": " + e.what());
  }
  merge_json(doc);
}

const SellmeierModel& MaterialLibrary::get(const std::string& name) const {
  auto it = models_.find(name);
  if (it == models_.end()) fail(ErrorCode::config, "unknown material '" + name + "'");
  return it->second;
}

std::vector<std::string> MaterialLibrary::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : models_) out.push_back(name);
  return out;
}

nlohmann::json MaterialLibrary::to_json() const {
  auto out = nlohmann::json::array();
  for (const auto& [_, model] : models_) out.push_back(model.to_json());
  return out;
}

}  // namespace mrdesign
