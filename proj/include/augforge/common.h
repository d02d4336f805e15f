// Copyright 2026 The AugForge Authors
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

#ifndef AUGFORGE_COMMON_H_
#define AUGFORGE_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace augforge {

// All library failures surface as this type (or a subclass) so callers can
// attach stage/category context before rethrowing.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// splitmix64 finalizer. Used for seed fan-out and for cheap stable hashing of
// small keys; never for content hashes (see hash.h).
constexpr uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from the global seed, a stage tag and a
// category id. Same inputs give the same stream on every platform.
uint64_t derive_seed(uint64_t global_seed, std::string_view tag,
                     uint64_t index = 0);

// xoshiro256** generator with explicit, platform-independent derived
// distributions. std::uniform_*_distribution is implementation-defined, which
// would break cross-toolchain reproducibility.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next();
  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform01();
  // Uniform in [0, n); n must be > 0.
  uint64_t below(uint64_t n);
  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  uint64_t s_[4];
};

// Process-wide warning sink. Stages also return their warnings in result
// structs; this only mirrors them to stderr.
void log_warning(const std::string& message);
void set_quiet(bool quiet);

std::string trim(std::string_view s);
std::string format_fixed(double value, int decimals);

}  // namespace augforge

#endif  // AUGFORGE_COMMON_H_
