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
#ifndef MRDESIGN_TEST_SUPPORT_HPP
#define MRDESIGN_TEST_SUPPORT_HPP

#include <cmath>
#include <optional>
#include <random>

#include "common.hpp"
#include "ml.hpp"
#include "resonance.hpp"

namespace mrdesign::test {

// Error code raised by f, or nullopt when it returns normally.
template <typename F>
std::optional<ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Coarse forward model for tests that need real solves but not accuracy.
inline ForwardConfig coarse_forward(int n = 48) {
  ForwardConfig f;
  f.mode.nx = f.mode.ny = n;
  f.resonance.band = {1.45, 1.65};
  return f;
}

}  // namespace mrdesign::test

#endif
