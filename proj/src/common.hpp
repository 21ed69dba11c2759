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
#ifndef MRDESIGN_COMMON_HPP
#define MRDESIGN_COMMON_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mrdesign {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class ErrorCode {
  invalid_argument,
  config,
  domain,
  not_converged,
  unguided,
  consistency,
  io,
  schema,
  rejects,
  internal,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

// Wavelength (µm) <-> optical frequency (Hz) / angular frequency (rad/s).
inline double frequency_from_wavelength(double lambda_um) { return kSpeedOfLight / (lambda_um * 1e-6); }
inline double wavelength_from_frequency(double f_hz) { return kSpeedOfLight / f_hz * 1e6; }
inline double wavelength_from_omega(double omega) { return kTwoPi * kSpeedOfLight / omega * 1e6; }

// ---------------------------------------------------------------------------
// Random numbers.
//
// Everything that shuffles or resamples uses std::mt19937_64, whose output
// sequence is fixed by the C++ standard, together with the bounded-integer
// mapping below (the std distributions are implementation defined and would
// break cross-platform reproducibility).

std::uint64_t splitmix64(std::uint64_t x);

// Seed of the i-th independent child stream of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Uniform integer in [0, bound), rejection sampled.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

void shuffle_indices(std::vector<std::size_t>& v, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Text formatting.

// printf("%.9e"), the persistence format for physics values.
std::string format_e9(double v);
// Value after a %.9e round trip; stored records are quantized with this so
// that save -> load is exact.
double quantize_e9(double v);
// Shortest decimal that parses back to the identical double.
std::string format_exact(double v);

double parse_double(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

// ---------------------------------------------------------------------------
// Files.

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int column(std::string_view name) const;  // -1 if absent
};

CsvTable parse_csv(std::string_view text, const std::string& source);
CsvTable read_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Parallelism.

// Number of workers for a requested job count; 0 means all cores.
unsigned resolve_jobs(int jobs);

// Calls body(i) for i in [0, n) on up to `jobs` threads. Results must be
// written to per-index slots, which keeps outputs independent of `jobs`.
// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace mrdesign

#endif
