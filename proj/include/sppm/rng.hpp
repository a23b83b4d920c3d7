// Copyright 2026 The sppm-phi Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace sppm {

// Counter-based random numbers: every draw is a pure function of
// (key, counter), so results never depend on call order or thread layout.

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(mix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL));
}

constexpr std::uint64_t counter_hash(std::uint64_t key, std::uint64_t counter) noexcept {
  return mix64(key ^ mix64(counter + 0x632BE59BD9B4E019ULL));
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform index in [0, n) by multiply-shift.
inline std::size_t to_index(std::uint64_t bits, std::size_t n) noexcept {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
}

// Named stream identifiers so unrelated draws never share counters.
namespace streams {
inline constexpr std::uint64_t kCoefficients = 1;
inline constexpr std::uint64_t kShifts = 2;
inline constexpr std::uint64_t kSampling = 3;
inline constexpr std::uint64_t kStart = 4;
inline constexpr std::uint64_t kUniformIterate = 5;
inline constexpr std::uint64_t kEstimator = 6;
}  // namespace streams

/// Sequential view over a counter-based stream.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream) : key_(derive_key(seed, stream)) {}

  std::uint64_t next_bits() noexcept { return counter_hash(key_, counter_++); }
  double uniform() noexcept { return to_unit(next_bits()); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) noexcept { return to_index(next_bits(), n); }

  // Box-Muller; consumes two draws per call.
  double normal() noexcept {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Eigen::VectorXd unit_vector(Eigen::Index d) {
    Eigen::VectorXd v(d);
    double norm = 0.0;
    do {
      for (Eigen::Index j = 0; j < d; ++j) v[j] = normal();
      norm = v.norm();
    } while (norm == 0.0);
    return v / norm;
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace sppm
