// Copyright 2026 The qsgen Authors.
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

#ifndef QSGEN_RNG_HPP_
#define QSGEN_RNG_HPP_

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace qsgen {

// Deterministic randomness for the whole library.
//
// Every stochastic routine takes an explicit RandomStream; nothing reads
// global state.  Streams are derived from a user seed plus a purpose salt and
// an element index, so independent units of work (records of a dataset,
// training iterations, generated samples) own disjoint streams regardless of
// the order they are evaluated in.  All value distributions are implemented
// here by hand on top of std::mt19937_64 -- the standard fixes the engine's
// output sequence but not the library distributions, and we want
// byte-identical artifacts across toolchains.

// SplitMix64 step; used only to mix seeds, never as the main generator.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Collapses (seed, salt, index) into a single well-mixed 64-bit engine seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt,
                              std::uint64_t index) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64_next(s);
  s ^= salt * 0x9e3779b97f4a7c15ull;
  std::uint64_t b = splitmix64_next(s);
  s ^= index + 0x632be59bd9b4e019ull;
  std::uint64_t c = splitmix64_next(s);
  return a ^ (b << 1) ^ (c >> 1) ^ splitmix64_next(s);
}

// Purpose salts for derived streams.  Values are arbitrary but frozen: they
// are part of the reproducibility contract of every file format and CLI run.
namespace stream_salt {
inline constexpr std::uint64_t kDatasetRecord = 0x01;
inline constexpr std::uint64_t kDatasetShuffle = 0x02;
inline constexpr std::uint64_t kNetworkInit = 0x03;
inline constexpr std::uint64_t kTrainIteration = 0x04;
inline constexpr std::uint64_t kSamplePath = 0x05;
inline constexpr std::uint64_t kEvalProjection = 0x06;
inline constexpr std::uint64_t kEvalSubsample = 0x07;
inline constexpr std::uint64_t kEvalRestart = 0x08;
}  // namespace stream_salt

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Stream for element `index` of the work unit tagged by `salt`.
  static RandomStream derived(std::uint64_t seed, std::uint64_t salt,
                              std::uint64_t index) {
    return RandomStream(mix_seed(seed, salt, index));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe as a logarithm argument.
  double uniform_open() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer on [0, n) via rejection.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  // Standard complex normal: real and imaginary parts iid N(0, 1/2).
  std::complex<double> normal_complex() {
    const double re = normal();
    const double im = normal();
    return {re * 0.7071067811865476, im * 0.7071067811865476};
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace qsgen

#endif  // QSGEN_RNG_HPP_
