// Copyright 2025 The PolyPlan Authors
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

#pragma once

#include <cstdint>

namespace polyplan {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen over <random> engines because
// the full generator, including the uint64 -> double mapping, is pinned here
// and therefore reproduces bit-identically on every platform. Substreams are
// derived with `derive`, so batches of trials can be split deterministically.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  // Seed for substream `index` of a root seed; mixing both through the
  // finalizer keeps neighbouring (seed, index) pairs uncorrelated.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 s(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    return s.next();
  }

 private:
  std::uint64_t state_;
};

}  // namespace polyplan
