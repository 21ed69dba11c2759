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

#include "resonance.hpp"
#include "selfcheck.hpp"
#include "test_support.hpp"

using namespace mrdesign;
using mrdesign::test::error_of;
using mrdesign::test::rel;

TEST_CASE("constant index converges at once to m c / (2 pi R n)") {
  ResonanceSolverConfig cfg;
  for (int m : {200, 450, 900}) {
    const auto s = solve_resonance(m, 60.0, 1.8, [](double) { return 1.8; }, cfg);
    CHECK(s.frequency_hz == doctest::Approx(m * kSpeedOfLight / (kTwoPi * 60e-6 * 1.8)).epsilon(1e-12));
    CHECK(s.iterations <= 2);
  }
}

TEST_CASE("fixed point agrees with bisection on the resonance condition") {
  ResonanceSolverConfig cfg;
  const auto n_eff = [](double l) { return 1.9 - 0.2 * (l - 1.55); };
  const int m = 400;
  const double R = 55.0;
  const auto s = solve_resonance(m, R, 1.7, n_eff, cfg);
  const double target = m * kSpeedOfLight / (kTwoPi * R * 1e-6);
  double lo = 1e14, hi = 3e14;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * n_eff(wavelength_from_frequency(mid)) < target ? lo : hi) = mid;
  }
  CHECK(std::abs(s.frequency_hz - lo) < 1e6);
  CHECK(s.iterations <= 20);
}

TEST_CASE("non-convergence is reported") {
  ResonanceSolverConfig cfg;
  cfg.max_iterations = 2;
  cfg.threshold_hz = 1e-9;
  const auto n_eff = [](double l) { return 1.9 - 0.5 * (l - 1.55); };
  CHECK(error_of([&] { solve_resonance(400, 55.0, 1.2, n_eff, cfg); }) == ErrorCode::not_converged);
}

TEST_CASE("Chebyshev interpolant reproduces polynomials and smooth functions") {
  const auto xs = ChebyshevInterpolant::nodes(1.4, 1.7, 15);
  CHECK(xs.size() == 15);
  std::vector<double> ys;
  for (double x : xs) ys.push_back(1.0 + x - 2.0 * x * x * x);
  const ChebyshevInterpolant p(1.4, 1.7, ys);
  for (double x : {1.41, 1.5, 1.63, 1.7}) CHECK(p(x) == doctest::Approx(1.0 + x - 2.0 * x * x * x).epsilon(1e-12));
  std::vector<double> e;
  for (double x : xs) e.push_back(std::exp(-x));
  const ChebyshevInterpolant q(1.4, 1.7, e);
  CHECK(q(1.555) == doctest::Approx(std::exp(-1.555)).epsilon(1e-13));
}

TEST_CASE("pump selection picks the nearest wavelength") {
  std::vector<ResonanceEntry> e;
  for (int m = 0; m < 5; ++m) e.push_back({100 + m, kTwoPi * frequency_from_wavelength(1.60 - 0.02 * m), 0.0});
  CHECK(nearest_pump_mode(e, 1.557) == 102);  // 1.56
}

TEST_CASE("synthetic quadratic comb") {
  const double w0 = 1.2e15, d1 = 3.1e12, d2 = 2e7;
  const auto p = integrated_dispersion(synthetic_comb(300, 40, 40, w0, d1, d2));
  CHECK(p.d1() == d1);
  CHECK(p.omega0() == w0);
  const auto fit = fit_quadratic(p, WavelengthWindow{1.5, 1.6});
  CHECK(rel(fit.q2, d2 / 2) < 1e-9);
  CHECK(std::abs(fit.q1) < 1e-6 * d2);
  const auto mfit = fit_quadratic(p, ModeWindow{-10, 10});
  CHECK(mfit.points == 21);
  CHECK(rel(mfit.q2, d2 / 2) < 1e-9);
  for (const auto& pt : p.points()) {
    CHECK(pt.dint == doctest::Approx(d2 * pt.mu * pt.mu / 2).epsilon(1e-6).scale(d2));
    if (pt.mu == 0) CHECK(pt.dint == 0.0);
  }
}

TEST_CASE("cubic term shows up as the fit's asymmetric residual") {
  const auto p = integrated_dispersion(synthetic_comb(300, 40, 40, 1.2e15, 3.1e12, 2e7, 5e4));
  // Central differences absorb D3/6 into D1.
  CHECK(p.d1() == doctest::Approx(3.1e12 + 5e4 / 6).epsilon(1e-12));
  const auto fit = fit_quadratic(p, ModeWindow{-10, 10});
  CHECK(rel(fit.q2, 1e7) < 1e-9);
}

TEST_CASE("profile invariants") {
  CHECK(error_of([] { DintProfile({{-1, 1, 1}, {0, 1e-9, 2}, {1, 1, 3}}, 1, 2); }).has_value());
  CHECK(error_of([] { DintProfile({{0, 0, 1}, {0, 0, 2}}, 1, 2); }).has_value());
  CHECK(error_of([] { DintProfile({{1, 0, 1}, {2, 0, 2}}, 1, 2); }).has_value());  // no pump
}

TEST_CASE("fit needs five points in the window") {
  const auto p = integrated_dispersion(synthetic_comb(300, 3, 3, 1.2e15, 3.1e12, 2e7));
  CHECK(error_of([&] { fit_quadratic(p, ModeWindow{-2, 1}); }) == ErrorCode::domain);
  CHECK(error_of([&] { fit_quadratic(p, WavelengthWindow{1.0, 1.1}); }) == ErrorCode::domain);
}

TEST_CASE("csv writers") {
  const auto set = synthetic_comb(300, 5, 5, 1.2e15, 3.1e12, 2e7);
  const auto dint = dint_csv(integrated_dispersion(set));
  CHECK(dint.rfind("mu,dint_hz\n", 0) == 0);
  CHECK(std::count(dint.begin(), dint.end(), '\n') == 12);
  const auto fsr = fsr_csv(set);
  CHECK(fsr.rfind("mu,m,frequency_hz,wavelength_nm,fsr_hz\n", 0) == 0);
}

TEST_CASE("real ring at coarse resolution") {
  auto fwd = mrdesign::test::coarse_forward();
  ResonatorSpec spec;
  spec.radius_um = 60;
  const auto sim = simulate(spec, fwd);
  const auto& set = sim.resonances;
  REQUIRE(set.entries.size() > 20);
  for (std::size_t i = 1; i < set.entries.size(); ++i) {
    CHECK(set.entries[i].m == set.entries[i - 1].m + 1);
    CHECK(set.entries[i].omega > set.entries[i - 1].omega);
  }
  const auto* pump = set.find(set.pump_m);
  REQUIRE(pump);
  // Neighbours are one FSR (~ c / (2 pi R n_g)) further from 1.557 um or more.
  CHECK(std::abs(wavelength_from_omega(pump->omega) - 1.557) < 0.01);
  for (const auto& c : set.spot_checks) CHECK(std::abs(c.interpolated_hz - c.direct_hz) < 10e6);
  CHECK(sim.profile.d1() / kTwoPi == doctest::Approx(kSpeedOfLight / (kTwoPi * 60e-6 * 2.0)).epsilon(0.1));
}

TEST_CASE("direct and interpolated strategies agree") {
  auto fwd = mrdesign::test::coarse_forward(40);
  fwd.resonance.band = {1.54, 1.57};
  ResonatorSpec spec;
  const auto a = simulate(spec, fwd);
  fwd.resonance.strategy = ResonanceStrategy::direct;
  const auto b = simulate(spec, fwd);
  REQUIRE(a.resonances.entries.size() == b.resonances.entries.size());
  for (std::size_t i = 0; i < a.resonances.entries.size(); ++i)
    CHECK(std::abs(a.resonances.entries[i].omega - b.resonances.entries[i].omega) / kTwoPi < 10e6);
}
