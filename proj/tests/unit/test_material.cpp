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
#include <doctest.h>

#include "material.hpp"
#include "test_support.hpp"

using namespace mrdesign;
using mrdesign::test::error_of;

TEST_CASE("built-in Sellmeier models match the literal formulas") {
  const MaterialLibrary lib;
  for (double l : {0.6, 1.0, 1.31, 1.55, 2.0}) {
    const double l2 = l * l;
    const double sin = std::sqrt(1.0 + 3.0249 * l2 / (l2 - 0.1353406 * 0.1353406) +
                                 40314.0 * l2 / (l2 - 1239.842 * 1239.842));
    const double sio = std::sqrt(1.0 + 0.6961663 * l2 / (l2 - 0.0684043 * 0.0684043) +
                                 0.4079426 * l2 / (l2 - 0.1162414 * 0.1162414) +
                                 0.8974794 * l2 / (l2 - 9.896161 * 9.896161));
    CHECK(lib.get("Si3N4").refractive_index(l) == doctest::Approx(sin).epsilon(1e-14));
    CHECK(lib.get("SiO2").refractive_index(l) == doctest::Approx(sio).epsilon(1e-14));
  }
  // Textbook spot values.
  CHECK(lib.get("SiO2").refractive_index(1.55) == doctest::Approx(1.444).epsilon(1e-3));
  CHECK(lib.get("Si3N4").refractive_index(1.55) == doctest::Approx(1.996).epsilon(1e-3));
}

TEST_CASE("wavelengths outside the valid range are domain errors") {
  const MaterialLibrary lib;
  CHECK(error_of([&] { lib.get("Si3N4").refractive_index(0.2); }) == ErrorCode::domain);
  CHECK(error_of([&] { lib.get("SiO2").refractive_index(3.0); }) == ErrorCode::domain);
  CHECK(error_of([&] { lib.get("Unobtainium"); }) == ErrorCode::config);
}

TEST_CASE("a pole inside the range is rejected") {
  CHECK(error_of([] { SellmeierModel("bad", 1.0, {{1.0, 1.0}}, {0.5, 2.5}); }) == ErrorCode::config);
}

TEST_CASE("json round trip and overrides") {
  const MaterialLibrary lib;
  const auto j = lib.get("SiO2").to_json();
  const auto back = SellmeierModel::from_json(j);
  CHECK(back.refractive_index(1.3) == lib.get("SiO2").refractive_index(1.3));

  MaterialLibrary custom;
  custom.merge_json(nlohmann::json{{"name", "Const"}, {"constant_offset", 4.0}, {"terms", nlohmann::json::array()},
                                   {"valid_range_um", {0.5, 2.5}}});
  CHECK(custom.get("Const").refractive_index(1.55) == 2.0);
  CHECK(custom.contains("Si3N4"));
  CHECK(error_of([&] { custom.merge_json(nlohmann::json{{"name", "x"}, {"bogus", 1}}); }).has_value());
}

TEST_CASE("shipped materials file loads") {
  MaterialLibrary lib;
  lib.load_file(std::string(MRDESIGN_DATA_DIR) + "/materials.json");
  CHECK(lib.get("Si3N4").refractive_index(1.55) == MaterialLibrary().get("Si3N4").refractive_index(1.55));
}
