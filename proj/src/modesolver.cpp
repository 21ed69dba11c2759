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
#include "modesolver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "common.hpp"

namespace mrdesign {

void CrossSection::validate() const {
  const double dims[] = {core_width_um, core_height_um, clad_width_um, clad_height_um};
  for (double d : dims)
    if (!std::isfinite(d) || !(d > 0.0)) fail(ErrorCode::invalid_argument, "cross-section dimensions must be > 0");
  if (!(core_width_um < clad_width_um) || !(core_height_um < clad_height_um))
    fail(ErrorCode::invalid_argument, "core must fit strictly inside the cladding box");
  if (bend_radius_um) {
    if (!std::isfinite(*bend_radius_um) || !(*bend_radius_um > 0.5 * clad_width_um))
      fail(ErrorCode::invalid_argument, "bend radius must exceed half the cladding width");
  }
}

SimGrid SimGrid::spanning(double width_um, double height_um, int nx, int ny) {
  if (nx < 1 || ny < 1 || static_cast<long long>(nx) * ny < 4)
    fail(ErrorCode::invalid_argument, "simulation grid needs nx*ny >= 4");
  if (!(width_um > 0.0) || !(height_um > 0.0)) fail(ErrorCode::invalid_argument, "grid extent must be > 0");
  return {nx, ny, width_um / nx, height_um / ny};
}

double IndexMap::max_index() const { return *std::max_element(n.begin(), n.end()); }
double IndexMap::min_index() const { return *std::min_element(n.begin(), n.end()); }

IndexMap build_index_map(const CrossSection& xs, double lambda_um, const SellmeierModel& core,
                         const SellmeierModel& clad, int nx, int ny) {
  xs.validate();
  IndexMap map;
  map.grid = SimGrid::spanning(xs.clad_width_um, xs.clad_height_um, nx, ny);
  map.wavelength_um = lambda_um;
  map.n_core = core.refractive_index(lambda_um);
  map.n_clad = clad.refractive_index(lambda_um);
  map.n.resize(map.grid.cells());

  const double half_w = 0.5 * xs.core_width_um;
  const double half_h = 0.5 * xs.core_height_um;
  for (int j = 0; j < ny; ++j) {
    const bool in_rows = std::abs(map.grid.y_offset(j)) <= half_h;
    for (int i = 0; i < nx; ++i) {
      const double x = map.grid.x_offset(i);
      double n = (in_rows && std::abs(x) <= half_w) ? map.n_core : map.n_clad;
      if (xs.bend_radius_um) n *= 1.0 + x / *xs.bend_radius_um;
      map.n[static_cast<std::size_t>(j) * nx + i] = n;
    }
  }
  return map;
}

IndexMap build_index_map(const CrossSection& xs, double lambda_um, const MaterialLibrary& lib,
                         const ModeSolverConfig& cfg) {
  return build_index_map(xs, lambda_um, lib.get(cfg.core_material), lib.get(cfg.clad_material), cfg.nx, cfg.ny);
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

bool mirror_symmetric_x(const IndexMap& m) {
  const int nx = m.grid.nx;
  if (nx % 2 != 0) return false;
  for (int j = 0; j < m.grid.ny; ++j)
    for (int i = 0; i < nx / 2; ++i)
      if (m.at(i, j) != m.at(nx - 1 - i, j)) return false;
  return true;
}

bool mirror_symmetric_y(const IndexMap& m) {
  const int ny = m.grid.ny;
  if (ny % 2 != 0) return false;
  for (int j = 0; j < ny / 2; ++j)
    for (int i = 0; i < m.grid.nx; ++i)
      if (m.at(i, j) != m.at(i, ny - 1 - j)) return false;
  return true;
}

// The fundamental mode is even under every mirror symmetry of the index
// map, so symmetric axes are folded: only one half is kept and the mirror
// plane acts as a zero-slope wall. This changes nothing but the cost.
struct Folding {
  bool x = false;
  bool y = false;
  int mx = 0;  // reduced grid
  int my = 0;

  int reduced_i(int i, int nx) const { return (x && i >= mx) ? nx - 1 - i : i; }
  int reduced_j(int j, int ny) const { return (y && j >= my) ? ny - 1 - j : j; }
};

// Applies the full-grid operator A = Δ + k0² n² to a full-grid vector.
std::vector<double> apply_operator(const IndexMap& m, double k0sq, const std::vector<double>& v) {
  const int nx = m.grid.nx, ny = m.grid.ny;
  const double cx = 1.0 / (m.grid.dx * m.grid.dx), cy = 1.0 / (m.grid.dy * m.grid.dy);
  std::vector<double> out(v.size());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t p = static_cast<std::size_t>(j) * nx + i;
      double lap = -2.0 * (cx + cy) * v[p];
      if (i > 0) lap += cx * v[p - 1];
      if (i < nx - 1) lap += cx * v[p + 1];
      if (j > 0) lap += cy * v[p - nx];
      if (j < ny - 1) lap += cy * v[p + nx];
      out[p] = lap + k0sq * m.n[p] * m.n[p] * v[p];
    }
  }
  return out;
}

}  // namespace

struct ModeSolver::Impl {
  Eigen::SimplicialLLT<SpMat> llt;
  int analyzed_mx = -1;
  int analyzed_my = -1;
};

ModeSolver::ModeSolver() : impl_(std::make_unique<Impl>()) {}
ModeSolver::~ModeSolver() = default;
ModeSolver::ModeSolver(ModeSolver&&) noexcept = default;
ModeSolver& ModeSolver::operator=(ModeSolver&&) noexcept = default;

ModeSolution ModeSolver::solve(const IndexMap& map, double lambda_um, const EigenConfig& cfg,
                               const std::vector<double>* start) {
  const int nx = map.grid.nx, ny = map.grid.ny;
  if (nx < 1 || ny < 1 || map.n.size() != map.grid.cells() || map.grid.cells() < 4)
    fail(ErrorCode::invalid_argument, "malformed index map");
  if (!(map.grid.dx > 0.0) || !(map.grid.dy > 0.0)) fail(ErrorCode::invalid_argument, "grid spacing must be > 0");
  if (!(lambda_um > 0.0)) fail(ErrorCode::invalid_argument, "wavelength must be > 0");
  if (!(map.min_index() > 0.0)) fail(ErrorCode::invalid_argument, "index map has non-positive cells");
  if (!(cfg.rel_tol > 0.0) || cfg.max_iterations < 1) fail(ErrorCode::invalid_argument, "bad eigen config");

  Folding fold;
  fold.x = mirror_symmetric_x(map);
  fold.y = mirror_symmetric_y(map);
  fold.mx = fold.x ? nx / 2 : nx;
  fold.my = fold.y ? ny / 2 : ny;
  const int mx = fold.mx, my = fold.my;
  const int unknowns = mx * my;

  const double k0 = kTwoPi / lambda_um;
  const double k0sq = k0 * k0;
  const double n_max = map.max_index();
  // Shift sits above the whole spectrum (Δ is negative definite), so
  // σ - A is SPD and the largest β² is the dominant mode of its inverse.
  const double sigma = k0sq * n_max * n_max;
  const double cx = 1.0 / (map.grid.dx * map.grid.dx), cy = 1.0 / (map.grid.dy * map.grid.dy);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(unknowns) * 3);
  for (int j = 0; j < my; ++j) {
    for (int i = 0; i < mx; ++i) {
      const int p = j * mx + i;
      const double n = map.at(i, j);
      double diag = 2.0 * (cx + cy) - k0sq * n * n;
      if (fold.x && i == mx - 1) diag -= cx;
      if (fold.y && j == my - 1) diag -= cy;
      trip.emplace_back(p, p, sigma + diag);
      if (i + 1 < mx) trip.emplace_back(p + 1, p, -cx);
      if (j + 1 < my) trip.emplace_back(p + mx, p, -cy);
    }
  }
  SpMat shifted(unknowns, unknowns);
  shifted.setFromTriplets(trip.begin(), trip.end());

  auto& llt = impl_->llt;
  if (impl_->analyzed_mx != mx || impl_->analyzed_my != my) {
    llt.analyzePattern(shifted);
    impl_->analyzed_mx = mx;
    impl_->analyzed_my = my;
  }
  llt.factorize(shifted);
  if (llt.info() != Eigen::Success) fail(ErrorCode::internal, "sparse Cholesky factorization failed");

  // Default start: the empty-box fundamental, which overlaps every positive mode.
  Eigen::VectorXd v(unknowns);
  const bool warm = start && start->size() == map.grid.cells();
  for (int j = 0; j < my; ++j)
    for (int i = 0; i < mx; ++i)
      v[j * mx + i] = warm ? (*start)[static_cast<std::size_t>(j) * nx + i]
                           : std::sin(kPi * (i + 1) / (nx + 1)) * std::sin(kPi * (j + 1) / (ny + 1));
  v.normalize();

  const double scale_floor = k0sq * map.n_clad * map.n_clad;
  double beta_sq = 0.0, prev = 0.0, last_change = 0.0;
  bool converged = false;
  int it = 0;
  for (it = 1; it <= cfg.max_iterations; ++it) {
    Eigen::VectorXd w = llt.solve(v);
    const double mu = v.dot(w);
    beta_sq = sigma - 1.0 / mu;
    v = w / w.norm();
    if (it > 1) {
      last_change = std::abs(beta_sq - prev) / std::max(std::abs(beta_sq), scale_floor);
      if (last_change <= cfg.rel_tol) {
        converged = true;
        break;
      }
    }
    prev = beta_sq;
  }

  ModeSolution sol;
  sol.wavelength_um = lambda_um;
  sol.iterations_used = std::min(it, cfg.max_iterations);
  sol.field.resize(map.grid.cells());
  double norm_sq = 0.0;
  for (int j = 0; j < ny; ++j) {
    const int rj = fold.reduced_j(j, ny);
    for (int i = 0; i < nx; ++i) {
      const double val = v[rj * mx + fold.reduced_i(i, nx)];
      sol.field[static_cast<std::size_t>(j) * nx + i] = val;
      norm_sq += val * val;
    }
  }
  const double inv_norm = 1.0 / std::sqrt(norm_sq);
  for (auto& f : sol.field) f *= inv_norm;

  const auto av = apply_operator(map, k0sq, sol.field);
  double res_sq = 0.0;
  for (std::size_t p = 0; p < av.size(); ++p) {
    const double r = av[p] - beta_sq * sol.field[p];
    res_sq += r * r;
  }
  sol.residual = std::sqrt(res_sq) / std::max(std::abs(beta_sq), scale_floor);

  if (!converged)
    fail(ErrorCode::not_converged, "mode solver did not converge in " + std::to_string(cfg.max_iterations) +
                                       " iterations at " + format_exact(lambda_um) +
                                       " um (last relative change " + format_e9(last_change) + ", residual " +
                                       format_e9(sol.residual) + ")");

  sol.converged = true;
  sol.beta_squared = beta_sq;
  sol.beta = beta_sq > 0.0 ? std::sqrt(beta_sq) : 0.0;
  sol.n_eff = sol.beta / k0;
  sol.guided = beta_sq > scale_floor;
  return sol;
}

ModeSolution solve_fundamental_mode(const IndexMap& map, double lambda_um, const EigenConfig& cfg) {
  ModeSolver solver;
  return solver.solve(map, lambda_um, cfg);
}

double effective_index(const CrossSection& xs, double lambda_um, const MaterialLibrary& lib,
                       const ModeSolverConfig& cfg, ModeSolver& solver) {
  const auto map = build_index_map(xs, lambda_um, lib, cfg);
  const auto sol = solver.solve(map, lambda_um, cfg.eigen);
  if (!sol.guided)
    fail(ErrorCode::unguided, "fundamental mode is not guided at " + format_exact(lambda_um) + " um (n_eff " +
                                  format_exact(sol.n_eff) + " <= n_clad " + format_exact(map.n_clad) + ")");
  return sol.n_eff;
}

double effective_index(const CrossSection& xs, double lambda_um, const MaterialLibrary& lib,
                       const ModeSolverConfig& cfg) {
  ModeSolver solver;
  return effective_index(xs, lambda_um, lib, cfg, solver);
}

}  // namespace mrdesign
