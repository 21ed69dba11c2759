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

#include <algorithm>
#include <cstring>
#include <set>

#include "common.hpp"
#include "test_support.hpp"

using namespace mrdesign;
using mrdesign::test::error_of;

TEST_CASE("derived seeds are deterministic and distinct") {
  CHECK(derive_seed(42, 0) == derive_seed(42, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 100; ++s) seen.insert(derive_seed(42, s));
  CHECK(seen.size() == 100);
  CHECK(derive_seed(42, 3) != derive_seed(43, 3));
  CHECK(derive_seed(7, 5) == splitmix64(7 ^ splitmix64(6)));
}

TEST_CASE("mt19937_64 stream matches the standard's 10000th value") {
  std::mt19937_64 rng;
  rng.discard(9999);
  CHECK(rng() == 9981545732273789042ULL);
}

TEST_CASE("uniform_below stays in range and hits every value") {
  std::mt19937_64 rng(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = uniform_below(rng, 7);
    REQUIRE(v < 7);
    ++hits[v];
  }
  for (int h : hits) CHECK(h > 800);
}

TEST_CASE("shuffle_indices is a seeded permutation") {
  std::vector<std::size_t> a(50), b(50);
  for (std::size_t i = 0; i < 50; ++i) a[i] = b[i] = i;
  std::mt19937_64 r1(9), r2(9);
  shuffle_indices(a, r1);
  shuffle_indices(b, r2);
  CHECK(a == b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 50; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("format_exact round-trips doubles") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    double v;
    const auto bits = rng();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    CHECK(parse_double(format_exact(v), "v") == v);
  }
  CHECK(format_exact(0.1) == "0.1");
}

TEST_CASE("quantize_e9 is idempotent and matches the printed value") {
  for (double v : {1.0 / 3.0, -2.5e11, 6.02214076e23, 1e-300}) {
    const double q = quantize_e9(v);
    CHECK(quantize_e9(q) == q);
    CHECK(format_e9(q) == format_e9(v));
  }
}

TEST_CASE("parse_double rejects junk") {
  CHECK(error_of([] { parse_double("1.5x", "f"); }) == ErrorCode::schema);
  CHECK(error_of([] { parse_double("", "f"); }) == ErrorCode::schema);
  CHECK(parse_double(" 2.5e3 ", "f") == 2500.0);
}

TEST_CASE("csv parsing") {
  const auto t = parse_csv("a,b\n1,2\n3,4\n", "t");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  CHECK(t.rows.size() == 2);
  CHECK(t.column("b") == 1);
  CHECK(t.column("c") == -1);
  CHECK(error_of([] { parse_csv("a,b\n1,2,3\n", "t"); }) == ErrorCode::schema);
  CHECK(error_of([] { read_csv("/nonexistent/file.csv"); }) == ErrorCode::io);
}

TEST_CASE("parallel_for fills every slot and rethrows") {
  std::vector<int> out(1000, 0);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i) * 2; });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i) * 2);
  CHECK(error_of([] {
          parallel_for(10, 3, [](std::size_t i) {
            if (i == 5) fail(ErrorCode::domain, "boom");
          });
        }) == ErrorCode::domain);
  CHECK(resolve_jobs(3) == 3);
  CHECK(resolve_jobs(0) >= 1);
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}
