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
#ifndef MRDESIGN_MODESOLVER_HPP
#define MRDESIGN_MODESOLVER_HPP

// Scalar finite-difference mode solver for a rectangular core in a
// rectangular cladding box with zero-field walls.
//
// The transverse field obeys (d²/dx² + d²/dy² + k0² n²(x,y)) φ = β² φ on a
// cell-centred grid with the five-point stencil; the fundamental mode is the
// eigenpair with the largest β². Ring curvature enters through the conformal
// map n(x) -> n(x) (1 + x/R), x measured radially from the core centre.
//
// This is a scalar model: no polarization, no vectorial coupling at the
// core walls. It reproduces trends, not absolute FEM numbers.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "material.hpp"

namespace mrdesign {

struct CrossSection {
  double core_width_um = 1.5;
  double core_height_um = 0.65;
  double clad_width_um = 4.0;
  double clad_height_um = 4.0;
  std::optional<double> bend_radius_um;  // nullopt = straight

  void validate() const;
};

struct SimGrid {
  int nx = 200;
  int ny = 200;
  double dx = 0.02;
  double dy = 0.02;

  static SimGrid spanning(double width_um, double height_um, int nx, int ny);
  std::size_t cells() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  // Signed offset of a cell centre from the box centre. Exactly antisymmetric
  // under i -> nx-1-i.
  double x_offset(int i) const { return (2.0 * i + 1.0 - nx) * dx * 0.5; }
  double y_offset(int j) const { return (2.0 * j + 1.0 - ny) * dy * 0.5; }
};

struct IndexMap {
  SimGrid grid;
  std::vector<double> n;  // row major, n[j * nx + i]
  double n_core = 0.0;    // unscaled material indices at this wavelength
  double n_clad = 0.0;
  double wavelength_um = 0.0;

  double at(int i, int j) const { return n[static_cast<std::size_t>(j) * grid.nx + i]; }
  double max_index() const;
  double min_index() const;
};

struct EigenConfig {
  double rel_tol = 1e-10;
  int max_iterations = 10000;
};

struct ModeSolverConfig {
  int nx = 200;
  int ny = 200;
  double clad_width_um = 4.0;
  double clad_height_um = 4.0;
  bool bend = true;
  std::string core_material = "Si3N4";
  std::string clad_material = "SiO2";
  EigenConfig eigen;
};

struct ModeSolution {
  double n_eff = 0.0;
  double beta = 0.0;          // rad/µm
  double beta_squared = 0.0;  // rad²/µm²
  std::vector<double> field;  // unit L2 norm, same layout as IndexMap::n
  double wavelength_um = 0.0;
  int iterations_used = 0;
  double residual = 0.0;  // ||Aφ - β²φ|| / |β²|
  bool converged = false;
  bool guided = false;
};

// Cells whose centres lie inside (or on) the core boundary take the core
// index; everything else is cladding.
IndexMap build_index_map(const CrossSection& xs, double lambda_um, const SellmeierModel& core,
                         const SellmeierModel& clad, int nx, int ny);
IndexMap build_index_map(const CrossSection& xs, double lambda_um, const MaterialLibrary& lib,
                         const ModeSolverConfig& cfg = {});

// Shift-and-invert power iteration for the largest β². The symbolic sparse
// factorization is cached between calls, so keep one solver per thread and
// reuse it for maps of equal size.
class ModeSolver {
 public:
  ModeSolver();
  ~ModeSolver();
  ModeSolver(ModeSolver&&) noexcept;
  ModeSolver& operator=(ModeSolver&&) noexcept;

  // Throws ErrorCode::not_converged (message carries the last residual).
  // An all-evanescent result is returned with guided == false. `start`, when
  // given and of matching size, replaces the default starting vector (e.g. the
  // field of a nearby wavelength).
  ModeSolution solve(const IndexMap& map, double lambda_um, const EigenConfig& cfg = {},
                     const std::vector<double>* start = nullptr);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ModeSolution solve_fundamental_mode(const IndexMap& map, double lambda_um, const EigenConfig& cfg = {});

// build_index_map + solve; throws ErrorCode::unguided for evanescent modes.
double effective_index(const CrossSection& xs, double lambda_um, const MaterialLibrary& lib,
                       const ModeSolverConfig& cfg = {});
double effective_index(const CrossSection& xs, double lambda_um, const MaterialLibrary& lib,
                       const ModeSolverConfig& cfg, ModeSolver& solver);

}  // namespace mrdesign

#endif
