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
 * Exact evolution of the 2^n support-pattern distribution.
 *
 * Site x (0-based) is bit (n-1-x) of the basis index, so the index written
 * in binary reads as the support string from left to right.
 */

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pwdyn/errors.hpp"
#include "pwdyn/lattice.hpp"
#include "pwdyn/parallel.hpp"
#include "pwdyn/transfer_matrix.hpp"

namespace pwdyn {

inline constexpr int kDenseMaxSites = 26;

class WeightState {
 public:
  static constexpr double kClamp = 1e-14;
  static constexpr double kHardNegative = 1e-10;
  static constexpr double kMassTol = 1e-10;

  WeightState() = default;
  WeightState(int n, std::vector<double> amps, int time = 0)
      : n_(n), time_(time), amps_(std::move(amps)) {
    detail::require(amps_.size() == (std::size_t{1} << n_),
                    "amplitude vector length must be 2^n");
  }

  int n() const { return n_; }
  int time() const { return time_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<double>& amplitudes() const { return amps_; }
  double operator[](std::uint64_t idx) const { return amps_[idx]; }

  std::uint64_t site_mask(int x) const {
    return std::uint64_t{1} << (n_ - 1 - x);
  }

  double mass() const {
    double s = 0.0;
    for (double a : amps_) s += a;
    return s;
  }

  /// Clamp tiny negatives and check conservation.
  void check_invariants() {
    for (double& a : amps_) {
      if (a < 0.0) {
        if (a < -kHardNegative) {
          throw InvariantViolation("weight amplitude " + std::to_string(a) +
                                   " is negative");
        }
        a = 0.0;
      }
    }
    const double m = mass();
    if (std::abs(m - 1.0) > kMassTol) {
      throw InvariantViolation("weight mass drifted to " + std::to_string(m));
    }
  }

 private:
  friend void apply_layer(WeightState&, const BrickwallSpec&, int, unsigned);
  int n_ = 0;
  int time_ = 0;
  std::vector<double> amps_;
};

inline WeightState init_state(const SupportPattern& p) {
  const int n = p.size();
  detail::require(n >= 1 && n <= kDenseMaxSites,
                  "dense engine supports 1 <= n <= " +
                      std::to_string(kDenseMaxSites));
  std::vector<double> amps(std::size_t{1} << n, 0.0);
  amps[p.to_index()] = 1.0;
  return WeightState(n, std::move(amps));
}

/// Applies layer `layer_index` in place. Blocks commute, so they are applied
/// one after the other; within a block the index range is split into
/// disjoint chunks.
inline void apply_layer(WeightState& s, const BrickwallSpec& spec,
                        int layer_index, unsigned threads = 1) {
  detail::require(spec.n == s.n_, "spec and state disagree on n");
  detail::require(s.time_ == layer_index, "state time must equal layer index");
  const auto& tm = spec.tm;
  double t[4][4];
  for (int o = 0; o < 4; ++o)
    for (int i = 0; i < 4; ++i) t[o][i] = tm(o, i);
  const int n = s.n_;
  std::vector<double>& v = s.amps_;
  const std::size_t quarter = v.size() >> 2;

  for (const auto& [l, r] : spec.pairs(layer_index)) {
    const std::uint64_t ml = std::uint64_t{1} << (n - 1 - l);
    const std::uint64_t mr = std::uint64_t{1} << (n - 1 - r);
    const std::uint64_t lo_bit = std::min(ml, mr);
    const std::uint64_t hi_bit = std::max(ml, mr);
    // Enumerate base indices with both block bits clear by inserting two
    // zero bits into a counter.
    auto expand = [&](std::uint64_t c) {
      std::uint64_t low = c & (lo_bit - 1);
      c = (c ^ low) << 1;
      std::uint64_t mid = c & (hi_bit - 1);
      c = (c ^ mid) << 1;
      return c | mid | low;
    };
    const std::size_t chunks = threads > 1 ? 64 : 1;
    parallel_chunks(quarter, chunks, threads,
                    [&](std::size_t b, std::size_t e, std::size_t) {
                      for (std::size_t c = b; c < e; ++c) {
                        const std::uint64_t base = expand(c);
                        const double in[4] = {v[base], v[base | mr], v[base | ml],
                                              v[base | ml | mr]};
                        if (in[1] == 0.0 && in[2] == 0.0 && in[3] == 0.0) continue;
                        double out[4];
                        for (int o = 0; o < 4; ++o) {
                          out[o] = t[o][0] * in[0] + t[o][1] * in[1] +
                                   t[o][2] * in[2] + t[o][3] * in[3];
                        }
                        v[base] = out[0];
                        v[base | mr] = out[1];
                        v[base | ml] = out[2];
                        v[base | ml | mr] = out[3];
                      }
                    });
  }
  ++s.time_;
  s.check_invariants();
}

/// Calls `observe` on the initial state and after every layer.
inline WeightState evolve(const BrickwallSpec& spec, const SupportPattern& p,
                          const std::function<void(const WeightState&)>& observe = {},
                          unsigned threads = 1) {
  spec.validate();
  detail::require(p.size() == spec.n, "support pattern length must equal n");
  WeightState s = init_state(p);
  if (observe) observe(s);
  for (int t = 0; t < spec.depth; ++t) {
    apply_layer(s, spec, t, threads);
    if (observe) observe(s);
  }
  return s;
}

/// Probability that every site in `sites` (0-based) is occupied.
inline double occupation(const WeightState& s, const std::vector<int>& sites) {
  std::uint64_t mask = 0;
  for (int x : sites) {
    if (x < 0 || x >= s.n()) {
      throw std::invalid_argument("occupation: site out of range");
    }
    mask |= s.site_mask(x);
  }
  double acc = 0.0;
  const auto& v = s.amplitudes();
  for (std::uint64_t i = 0; i < v.size(); ++i) {
    if ((i & mask) == mask) acc += v[i];
  }
  return acc;
}

/// Single-site occupations rho(x) for all x in one pass.
inline std::vector<double> occupation_profile(const WeightState& s) {
  const int n = s.n();
  std::vector<double> rho(n, 0.0);
  const auto& v = s.amplitudes();
  for (std::uint64_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;
    for (std::uint64_t rest = i; rest; rest &= rest - 1) {
      rho[n - 1 - std::countr_zero(rest)] += v[i];
    }
  }
  return rho;
}

/// sum_b w(b) 3^{-|b|}.
inline double pauli_weight(const WeightState& s) {
  double pw[64];
  pw[0] = 1.0;
  for (int k = 1; k <= s.n(); ++k) pw[k] = pw[k - 1] / 3.0;
  double acc = 0.0;
  const auto& v = s.amplitudes();
  for (std::uint64_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) acc += v[i] * pw[std::popcount(i)];
  }
  return acc;
}

inline double shadow_norm(const WeightState& s) { return 1.0 / pauli_weight(s); }

/// Inclusion-exclusion inverse of the marginals:
/// w(A) = sum_{B >= A} (-1)^{|B|-|A|} rho(B). Diagnostic only.
inline double weight_from_occupations(const WeightState& s,
                                      const std::vector<int>& sites) {
  std::uint64_t mask = 0;
  for (int x : sites) {
    if (x < 0 || x >= s.n()) {
      throw std::invalid_argument("weight_from_occupations: site out of range");
    }
    mask |= s.site_mask(x);
  }
  const std::uint64_t all = s.dim() - 1;
  const std::uint64_t comp = all & ~mask;
  if (std::popcount(comp) > 20) {
    throw std::invalid_argument(
        "weight_from_occupations: complement too large to enumerate");
  }
  std::vector<int> comp_sites;
  for (int x = 0; x < s.n(); ++x)
    if (comp & s.site_mask(x)) comp_sites.push_back(x);
  double acc = 0.0;
  // Walk all subsets E of the complement; B = A u E.
  std::uint64_t e = 0;
  while (true) {
    std::vector<int> b = sites;
    for (int x : comp_sites)
      if (e & s.site_mask(x)) b.push_back(x);
    const double sign = (std::popcount(e) % 2) ? -1.0 : 1.0;
    acc += sign * occupation(s, b);
    if (e == comp) break;
    e = (e - comp) & comp;
  }
  return acc;
}

}  // namespace pwdyn
