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
 * Brick-wall geometry and support patterns.
 *
 * Sites are 1-based in every public factory that takes site numbers from a
 * user, and 0-based everywhere else (vectors, pair lists, engines).
 * Layer 0 pairs sites (0,1),(2,3),...; layer 1 pairs (1,2),(3,4),...; with a
 * periodic boundary odd layers also pair (n-1, 0), n-1 being the left leg.
 */

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pwdyn/errors.hpp"
#include "pwdyn/transfer_matrix.hpp"

namespace pwdyn {

enum class Boundary { open, periodic };

inline const char* boundary_name(Boundary b) {
  return b == Boundary::open ? "open" : "periodic";
}

inline Boundary parse_boundary(const std::string& s) {
  if (s == "open") return Boundary::open;
  if (s == "periodic") return Boundary::periodic;
  throw ConfigError("boundary must be 'open' or 'periodic', got '" + s + "'");
}

/// Bit x is set iff site x (0-based) lies in the support.
class SupportPattern {
 public:
  SupportPattern() = default;
  explicit SupportPattern(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) b = b ? 1 : 0;
  }

  static SupportPattern empty(int n) {
    return SupportPattern(std::vector<std::uint8_t>(n, 0));
  }
  static SupportPattern full(int n) {
    return SupportPattern(std::vector<std::uint8_t>(n, 1));
  }
  /// Single occupied site, 0-based.
  static SupportPattern single(int n, int x) {
    detail::require(x >= 0 && x < n, "site index out of range");
    auto p = empty(n);
    p.bits_[x] = 1;
    return p;
  }
  /// k consecutive sites whose middle sits at 0-based `center`
  /// (for even k, the block is [center - k/2, center + k/2)).
  static SupportPattern contiguous(int n, int k, int center) {
    detail::require(k >= 0 && k <= n, "support size exceeds site count");
    const int lo = center - k / 2;
    detail::require(lo >= 0 && lo + k <= n, "contiguous support leaves the chain");
    auto p = empty(n);
    for (int i = lo; i < lo + k; ++i) p.bits_[i] = 1;
    return p;
  }
  /// From 1-based site numbers.
  static SupportPattern from_sites(int n, const std::vector<int>& sites1) {
    auto p = empty(n);
    for (int s : sites1) {
      if (s < 1 || s > n) {
        throw std::invalid_argument("site " + std::to_string(s) +
                                    " outside 1.." + std::to_string(n));
      }
      p.bits_[s - 1] = 1;
    }
    return p;
  }

  int size() const { return static_cast<int>(bits_.size()); }
  bool operator[](int x) const { return bits_[x] != 0; }
  int count() const {
    int c = 0;
    for (auto b : bits_) c += b;
    return c;
  }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  /// Dense basis index; site x maps to bit (n-1-x) so that strings read
  /// left to right.
  std::uint64_t to_index() const {
    std::uint64_t idx = 0;
    for (auto b : bits_) idx = (idx << 1) | b;
    return idx;
  }

  std::string str() const {
    std::string s;
    for (auto b : bits_) s.push_back(b ? '1' : '0');
    return s;
  }

  bool operator==(const SupportPattern&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct BrickwallSpec {
  int n = 2;
  int depth = 0;
  Boundary boundary = Boundary::open;
  TransferMatrix tm;

  void validate() const {
    detail::require(n >= 2, "brick-wall needs n >= 2");
    detail::require(depth >= 0, "depth must be non-negative");
    detail::require(boundary == Boundary::open || n % 2 == 0,
                    "periodic boundary needs even n");
  }

  /// 0-based (left, right) site pairs acted on by layer `t`.
  std::vector<std::pair<int, int>> pairs(int t) const {
    std::vector<std::pair<int, int>> out;
    const int start = t % 2;
    for (int i = start; i + 1 < n; i += 2) out.emplace_back(i, i + 1);
    if (start == 1 && boundary == Boundary::periodic) out.emplace_back(n - 1, 0);
    return out;
  }
};

/// Right-mover iff an occupied site sits on the left leg of its block in
/// layer t, i.e. (x + t) is even with 0-based x.
inline bool is_right_mover_site(int x, int t) { return ((x + t) & 1) == 0; }

}  // namespace pwdyn
