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
#ifndef MRDESIGN_RESONANCE_HPP
#define MRDESIGN_RESONANCE_HPP

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "common.hpp"
#include "material.hpp"
#include "modesolver.hpp"

namespace mrdesign {

struct ResonatorSpec {
  double radius_um = 50.0;
  double width_um = 1.5;
  double height_um = 0.65;
  std::string core_material = "Si3N4";
  std::string clad_material = "SiO2";

  void validate() const;
  CrossSection cross_section(const ModeSolverConfig& cfg) const;
};

enum class ResonanceStrategy { direct, interpolated };

struct ResonanceSolverConfig {
  double threshold_hz = 1e6;
  int max_iterations = 20;
  WavelengthRange band{1.0, 2.0};
  ResonanceStrategy strategy = ResonanceStrategy::interpolated;
  int samples = 15;  // n_eff samples for the interpolated strategy
  double pump_wavelength_um = 1.557;
  int spot_checks = 3;
  int spot_offset = 10;  // spot-checked modes: m0, m0 - offset, m0 + offset

  void validate() const;
};

struct ResonanceEntry {
  int m = 0;
  double omega = 0.0;  // rad/s
  double n_eff = 0.0;
};

struct SpotCheck {
  int m = 0;
  double interpolated_hz = 0.0;
  double direct_hz = 0.0;
  int iterations = 0;
};

struct ResonanceSet {
  std::vector<ResonanceEntry> entries;  // ascending m
  int pump_m = 0;
  double pump_target_um = 1.557;
  std::vector<SpotCheck> spot_checks;

  void validate() const;
  const ResonanceEntry* find(int m) const;
};

// Pump selection: the entry whose wavelength is nearest the target; on an
// exact tie the shorter wavelength wins.
int nearest_pump_mode(const std::vector<ResonanceEntry>& entries, double pump_um);

// f = m c / (2π R n), R in µm.
double guess_frequency(int m, double radius_um, double n);

using IndexFunction = std::function<double(double lambda_um)>;

struct ResonanceSolution {
  double frequency_hz = 0.0;
  double n_eff = 0.0;
  int iterations = 0;
};

// Fixed-point iteration f <- m c / (2π R n_eff(c/f)) seeded by
// guess_frequency(m, R, seed_index); stops once successive iterates differ
// by less than the threshold.
ResonanceSolution solve_resonance(int m, double radius_um, double seed_index, const IndexFunction& n_eff,
                                  const ResonanceSolverConfig& cfg);

// n_eff(λ) of a ring cross-section through the mode solver. Each solve is
// warm started from the previous field, so results depend on call order at
// the eigen-tolerance level. Not thread safe; one instance per worker.
class RingIndexModel {
 public:
  RingIndexModel(const ResonatorSpec& spec, const MaterialLibrary& lib, const ModeSolverConfig& cfg);
  double operator()(double lambda_um);
  double core_index(double lambda_um) const;
  int solves() const { return solves_; }

 private:
  ResonatorSpec spec_;
  const MaterialLibrary* lib_;
  ModeSolverConfig cfg_;
  ModeSolver solver_;
  std::vector<double> last_field_;
  int solves_ = 0;
};

ResonanceSolution solve_resonance(const ResonatorSpec& spec, int m, const ResonanceSolverConfig& cfg,
                                  const MaterialLibrary& lib, const ModeSolverConfig& mode_cfg);

// Barycentric interpolant through Chebyshev–Lobatto nodes on [lo, hi].
class ChebyshevInterpolant {
 public:
  static std::vector<double> nodes(double lo, double hi, int count);
  ChebyshevInterpolant(double lo, double hi, std::vector<double> values);
  double operator()(double x) const;

 private:
  std::vector<double> x_, y_, w_;
};

ResonanceSet resonance_band(double radius_um, double seed_index, const IndexFunction& n_eff,
                            const ResonanceSolverConfig& cfg);
ResonanceSet resonance_band(const ResonatorSpec& spec, const ResonanceSolverConfig& cfg,
                            const MaterialLibrary& lib, const ModeSolverConfig& mode_cfg);

struct DintPoint {
  int mu = 0;
  double dint = 0.0;   // rad/s
  double omega = 0.0;  // rad/s
  double wavelength_um() const { return wavelength_from_omega(omega); }
};

// Integrated dispersion around a pump mode. Construction enforces strictly
// increasing mu and an exact zero at mu = 0.
class DintProfile {
 public:
  DintProfile(std::vector<DintPoint> points, double d1, double omega0);

  const std::vector<DintPoint>& points() const { return points_; }
  double d1() const { return d1_; }
  double omega0() const { return omega0_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<DintPoint> points_;
  double d1_;
  double omega0_;
};

// D1 by central difference about the pump; D_int(m) = ω_m - ω0 - D1 (m - m0).
DintProfile integrated_dispersion(const ResonanceSet& set);

struct WavelengthWindow {
  double lo_um;
  double hi_um;
};
struct ModeWindow {
  int mu_lo;
  int mu_hi;
};
using FitWindow = std::variant<WavelengthWindow, ModeWindow>;

struct QuadraticFit {
  double q0 = 0.0, q1 = 0.0, q2 = 0.0;  // rad/s
  int mu_lo = 0, mu_hi = 0;
  int points = 0;
  double residual_rms = 0.0;  // rad/s
};

inline constexpr int kMinFitPoints = 5;

QuadraticFit fit_quadratic(const DintProfile& profile, const FitWindow& window);

// Wavelength span covered by a profile's modes.
double profile_min_wavelength_um(const DintProfile& profile);
double profile_max_wavelength_um(const DintProfile& profile);

// `mu,dint_hz`, D_int / 2π formatted %.9e.
std::string dint_csv(const DintProfile& profile);
// `mu,m,frequency_hz,wavelength_nm,fsr_hz`; local FSR by central difference
// over the interior modes.
std::string fsr_csv(const ResonanceSet& set);

struct ForwardConfig {
  MaterialLibrary materials;
  ModeSolverConfig mode;
  ResonanceSolverConfig resonance;
};

struct Simulation {
  ResonanceSet resonances;
  DintProfile profile;
};

Simulation simulate(const ResonatorSpec& spec, const ForwardConfig& cfg);

}  // namespace mrdesign

#endif
