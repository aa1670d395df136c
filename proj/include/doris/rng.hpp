// Copyright 2026 The Doris Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DORIS_RNG_HPP_
#define DORIS_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>

#include "doris/common.hpp"

// Self-contained counter-free RNG so that runs are byte-reproducible across
// platforms and standard-library versions. std::uniform_* distributions are
// implementation-defined and must not appear anywhere in the run path.

namespace doris {

inline uint64_t SplitMix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t HashLabel(std::string_view label) {
  // FNV-1a, 64 bit.
  uint64_t h = 1469598103934665603ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// xoshiro256++ with explicit helpers for the sampling primitives the
// library needs. One stream per role; derive streams from a master seed
// with MakeStream so that changing the parallelism degree cannot change
// the draw sequence of any role.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& word : s_) word = SplitMix64(sm);
  }

  uint64_t NextU64() {
    const uint64_t result = Rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = Rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double NextDouble() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n).
  int NextIndex(int n) {
    if (n <= 0) throw DorisError("Rng::NextIndex: n must be positive");
    return static_cast<int>(NextDouble() * n) % n;
  }

  double NextExponential() {
    double u = NextDouble();
    return -std::log1p(-u);
  }

  double NextGaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = NextDouble();
    double u2 = NextDouble();
    // Guard the log against an exact zero draw.
    while (u1 <= 0.0) u1 = NextDouble();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Samples an index from an (unnormalized, non-negative) weight vector by
  // CDF inversion. Ties in the trailing mass go to the last positive entry.
  int NextCategorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw DorisError("Rng::NextCategorical: weights sum to zero");
    double u = NextDouble() * total;
    double acc = 0.0;
    int last_positive = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] > 0.0) last_positive = static_cast<int>(i);
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return last_positive;
  }

 private:
  static uint64_t Rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t s_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent stream from (master, role label). Fixed labels are
// used throughout the harness: "env", "hyper", "opponent", "classes", ...
inline Rng MakeStream(uint64_t master_seed, std::string_view label) {
  uint64_t mix = master_seed ^ HashLabel(label);
  return Rng(SplitMix64(mix));
}

}  // namespace doris

#endif  // DORIS_RNG_HPP_
