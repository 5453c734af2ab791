// Copyright 2026 The pdpsgd Authors
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
//
// Deterministic random number utilities.
//
// All randomness in the toolkit flows through these helpers so that a run is
// reproducible from a single 64-bit seed. Distribution sampling is done by
// hand (rather than via <random> distributions, whose output is
// implementation-defined) so that identical seeds give identical streams on
// every platform.

#ifndef PDPSGD_RNG_HPP_
#define PDPSGD_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace pdpsgd {

// splitmix64 step; used for seed derivation, not as the main generator.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a base seed and up to three tags
// (for example: purpose, round, epoch). Chaining splitmix64 over the inputs
// decorrelates nearby seeds and tags.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag0 = 0,
                                 std::uint64_t tag1 = 0,
                                 std::uint64_t tag2 = 0) {
  std::uint64_t state = base;
  std::uint64_t out = splitmix64(state);
  state ^= tag0 + 0x9e3779b97f4a7c15ULL;
  out ^= splitmix64(state);
  state ^= tag1 + 0xbf58476d1ce4e5b9ULL;
  out ^= splitmix64(state);
  state ^= tag2 + 0x94d049bb133111ebULL;
  out ^= splitmix64(state);
  return out;
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t base, std::uint64_t tag0 = 0,
                    std::uint64_t tag1 = 0, std::uint64_t tag2 = 0) {
  return Rng(derive_seed(base, tag0, tag1, tag2));
}

// Uniform double in [0, 1) built from the top 53 bits of one engine output.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection; bound must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

// Standard normal draws via the Marsaglia polar method. The second value of
// each pair is cached so draws cost about one rejection loop each.
class NormalSampler {
 public:
  explicit NormalSampler(Rng& rng) : rng_(&rng) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01(*rng_) - 1.0;
      v = 2.0 * uniform01(*rng_) - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

 private:
  Rng* rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// In-place Fisher-Yates shuffle with the portable uniform sampler.
template <typename Container>
void deterministic_shuffle(Container& values, Rng& rng) {
  using std::swap;
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    swap(values[i - 1], values[j]);
  }
}

}  // namespace pdpsgd

#endif  // PDPSGD_RNG_HPP_
