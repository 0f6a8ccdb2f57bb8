// Copyright 2026 The darktraj authors
//
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

#ifndef DARKTRAJ_RNG_HPP
#define DARKTRAJ_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "darktraj/types.hpp"

namespace darktraj {

// SplitMix64: splittable 64-bit generator. All randomized operations in the
// library take a SplitMix64 so that runs are bit-reproducible given a seed.
// Distribution helpers avoid std::*_distribution on purpose (those are not
// pinned by the standard and differ across library implementations).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1} without modulo bias (Lemire reduction).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller; consumes two uniforms per call so the
  // stream position does not depend on hidden cache state.
  double normal() {
    double u1 = uniform();
    if (u1 < 0x1.0p-60) u1 = 0x1.0p-60;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im);
  }

  // Derive an independent stream for lane `lane` without advancing this one.
  SplitMix64 fork(std::uint64_t lane) const {
    std::uint64_t z = state_ ^ (0xa0761d6478bd642fULL * (lane + 1));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return SplitMix64(z ^ (z >> 31));
  }

  // Inverse-CDF sample over cumulative weights in item order. Weights need
  // not be normalized; throws if the total mass is degenerate.
  std::size_t pick_index(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total < tol::zero_weight)
      throw NumericError("pick_index: total weight below 1e-14");
    const double u = uniform() * total;
    double cum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      cum += weights[i];
      if (u < cum) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::uint64_t state_;
};

}  // namespace darktraj

#endif  // DARKTRAJ_RNG_HPP
