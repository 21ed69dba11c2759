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
#ifndef MRDESIGN_ORACLES_HPP
#define MRDESIGN_ORACLES_HPP

// Reference values computed without touching the solvers they check. Shared
// by the selfcheck command and the unit tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mrdesign::oracle {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kC = 299792458.0;

// Largest eigenvalue of Δ_h + k0² n² on an nx × ny cell grid with zero
// ghost values one cell outside the box.
inline double box_eigenvalue(int nx, int ny, double dx, double dy, double k0, double n) {
  const double sx = std::sin(kPi / (2.0 * (nx + 1)));
  const double sy = std::sin(kPi / (2.0 * (ny + 1)));
  return k0 * k0 * n * n - 4.0 * sx * sx / (dx * dx) - 4.0 * sy * sy / (dy * dy);
}

// β of the fundamental even mode of a symmetric slab of width w (µm), by
// bisection on tan(κ w/2) = γ/κ.
inline double slab_beta(double w, double lambda_um, double n_core, double n_clad) {
  const double k0 = 2.0 * kPi / lambda_um;
  double lo = k0 * n_clad, hi = k0 * n_core;
  for (int i = 0; i < 200; ++i) {
    const double b = 0.5 * (lo + hi);
    const double kappa = std::sqrt(k0 * k0 * n_core * n_core - b * b);
    const double gamma = std::sqrt(b * b - k0 * k0 * n_clad * n_clad);
    const double half = kappa * w / 2.0;
    // Beyond the first branch the root lies at larger β.
    if (half >= kPi / 2.0 || std::tan(half) - gamma / kappa > 0.0) lo = b;
    else hi = b;
  }
  return 0.5 * (lo + hi);
}

struct StumpOracle {
  double threshold = 0.0;
  double left = 0.0, right = 0.0;
  double sse = std::numeric_limits<double>::infinity();
};

// Every midpoint of consecutive distinct sorted x, scored by direct
// recomputation of the two children's squared error.
inline StumpOracle brute_force_stump(std::vector<double> x, const std::vector<double>& y) {
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  StumpOracle best;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (!(sorted[i] < sorted[i + 1])) continue;
    const double t = sorted[i] + (sorted[i + 1] - sorted[i]) / 2.0;
    double sl = 0, sr = 0;
    int nl = 0, nr = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (x[k] <= t) sl += y[k], ++nl;
      else sr += y[k], ++nr;
    }
    const double ml = sl / nl, mr = sr / nr;
    double sse = 0;
    for (std::size_t k = 0; k < x.size(); ++k) sse += std::pow(y[k] - (x[k] <= t ? ml : mr), 2);
    if (sse < best.sse) best = {t, ml, mr, sse};
  }
  return best;
}

}  // namespace mrdesign::oracle

#endif
