// Copyright 2026 The compsyn Authors.
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

#ifndef COMPSYN_RANDOM_H_
#define COMPSYN_RANDOM_H_

#include <cmath>
#include <cstdint>
#include <string_view>

namespace compsyn {

// splitmix64 generator. Every random draw in the toolkit goes through this
// class so results are reproducible bit-for-bit across platforms; the
// standard library's distributions are implementation-defined.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t Next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n).
  uint64_t Below(uint64_t n) { return n == 0 ? 0 : Next() % n; }

  // Standard normal via Box-Muller; one draw per call, no cached pair.
  double Gaussian() {
    const double u1 = 1.0 - Uniform();  // (0, 1]
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  uint64_t state_;
};

inline uint64_t Fnv1a64(std::string_view text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Independent stream derived from a run seed and a string key (e.g. a
// production rule), so adding a rule never perturbs the others.
inline SplitMix64 KeyedStream(uint64_t seed, std::string_view key) {
  SplitMix64 mixer(seed ^ Fnv1a64(key));
  return SplitMix64(mixer.Next());
}

// Fisher-Yates shuffle driven by SplitMix64.
template <typename Container>
void Shuffle(Container& items, SplitMix64& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    const size_t j = rng.Below(i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace compsyn

#endif  // COMPSYN_RANDOM_H_
