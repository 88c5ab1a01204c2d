// Copyright 2026 The pwdyn Authors
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

/**
 * @file
 * SplitMix64 with per-trajectory streams.
 *
 * Stream i of master seed s starts from mix64(mix64(s) + i), so trajectory
 * i draws the same numbers no matter which thread runs it. Uniforms take the
 * top 53 bits of each output.
 */

#pragma once

#include <cstdint>
#include <limits>

namespace pwdyn {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit constexpr SplitMix64(std::uint64_t state = 0) : state_(state) {}

  static constexpr SplitMix64 stream(std::uint64_t master_seed,
                                     std::uint64_t index) {
    return SplitMix64(mix64(mix64(master_seed) + index));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() { return mix64(state_ += kGamma); }

  /// Uniform in [0, 1).
  constexpr double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace pwdyn
