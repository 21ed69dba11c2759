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
#ifndef MRDESIGN_SELFCHECK_HPP
#define MRDESIGN_SELFCHECK_HPP

#include <functional>
#include <string>
#include <vector>

#include "resonance.hpp"

namespace mrdesign {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

using CheckCallback = std::function<void(const CheckResult&)>;

// Runs every built-in oracle comparison in a fixed order. A check that
// throws counts as failed with the message as detail.
std::vector<CheckResult> run_selfcheck(const CheckCallback& on_result = {}, int jobs = 0);

// Comb with ω_µ = ω0 + D1 µ + D2 µ²/2 + D3 µ³/6 for µ in [-below, above],
// pump at m0. Frequencies in rad/s.
ResonanceSet synthetic_comb(int m0, int below, int above, double omega0, double d1, double d2, double d3 = 0.0);

}  // namespace mrdesign

#endif
