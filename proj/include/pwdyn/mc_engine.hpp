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
 * Monte Carlo sampler of the support Markov chain.
 *
 * Each block draws its output pattern by inverse CDF over the outcome order
 * (00, 01, 10, 11) of the transfer-matrix column. A uniform is consumed only
 * for non-vacuum blocks. Trajectory i uses SplitMix64::stream(seed, i).
 * Every estimator reduces integer counts, so results do not depend on the
 * thread count or on the chunking.
 */

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "pwdyn/errors.hpp"
#include "pwdyn/lattice.hpp"
#include "pwdyn/parallel.hpp"
#include "pwdyn/rng.hpp"

namespace pwdyn {

enum class MoverKind { empty, right, left };

/// Occupied sites with even (x + t), 0-based, are right-movers.
inline MoverKind mover_label(bool occupied, int x, int t) {
  if (!occupied) return MoverKind::empty;
  return is_right_mover_site(x, t) ? MoverKind::right : MoverKind::left;
}

/// n x (depth+1) bit grid, row t = support before layer t.
class TrajectoryConfig {
 public:
  TrajectoryConfig(int n, int depth, std::uint64_t seed)
      : n_(n), depth_(depth), seed_(seed), stride_((n + 63) / 64),
        words_(std::size_t(stride_) * (depth + 1), 0) {}

  int n() const { return n_; }
  int depth() const { return depth_; }
  std::uint64_t seed() const { return seed_; }

  bool get(int x, int t) const {
    return (words_[std::size_t(t) * stride_ + x / 64] >> (x % 64)) & 1u;
  }
  void set(int x, int t, bool v) {
    auto& w = words_[std::size_t(t) * stride_ + x / 64];
    const std::uint64_t bit = std::uint64_t{1} << (x % 64);
    w = v ? (w | bit) : (w & ~bit);
  }
  int row_count(int t) const {
    int c = 0;
    for (int i = 0; i < stride_; ++i)
      c += std::popcount(words_[std::size_t(t) * stride_ + i]);
    return c;
  }

  /// `t,x,kind` per occupied cell, x 1-based, kind R or L.
  void write_dump(std::ostream& os) const {
    os << "t,x,kind\n";
    for (int t = 0; t <= depth_; ++t)
      for (int x = 0; x < n_; ++x)
        if (get(x, t)) {
          os << t << ',' << (x + 1) << ','
             << (mover_label(true, x, t) == MoverKind::right ? 'R' : 'L') << '\n';
        }
  }

 private:
  int n_, depth_;
  std::uint64_t seed_;
  int stride_;
  std::vector<std::uint64_t> words_;
};

namespace detail {

/// Cumulative column distributions for inverse-CDF block sampling.
struct BlockSampler {
  std::array<std::array<double, 4>, 4> cdf{};
  std::array<int, 4> last_nonzero{};

  explicit BlockSampler(const TransferMatrix& tm) {
    for (int in = 0; in < 4; ++in) {
      double acc = 0.0;
      for (int out = 0; out < 4; ++out) {
        acc += tm(out, in);
        cdf[in][out] = acc;
        if (tm(out, in) > 0.0) last_nonzero[in] = out;
      }
    }
  }

  int draw(int in, SplitMix64& rng) const {
    if (in == 0) return 0;
    const double u = rng.uniform();
    for (int out = 0; out < 4; ++out) {
      if (u < cdf[in][out]) return out;
    }
    return last_nonzero[in];
  }
};

/// Advances `row` by one layer.
inline void mc_layer(std::vector<std::uint8_t>& row,
                     const std::vector<std::pair<int, int>>& pairs,
                     const BlockSampler& sampler, SplitMix64& rng) {
  for (const auto& [l, r] : pairs) {
    const int in = (row[l] << 1) | row[r];
    const int out = sampler.draw(in, rng);
    row[l] = std::uint8_t(out >> 1);
    row[r] = std::uint8_t(out & 1);
  }
}

struct LayerPairs {
  std::array<std::vector<std::pair<int, int>>, 2> by_parity;
  explicit LayerPairs(const BrickwallSpec& spec)
      : by_parity{spec.pairs(0), spec.pairs(1)} {}
  const std::vector<std::pair<int, int>>& operator()(int t) const {
    return by_parity[t % 2];
  }
};

/// Drives n_samples trajectories in fixed chunks; `visit(row, t, acc)` is
/// called on every row t = 0..depth, with a per-chunk accumulator.
template <class Acc, class Visit>
std::vector<Acc> run_trajectories(const BrickwallSpec& spec,
                                  const SupportPattern& p, std::uint64_t n_samples,
                                  std::uint64_t seed, unsigned threads,
                                  const Acc& zero, Visit&& visit) {
  spec.validate();
  detail::require(p.size() == spec.n, "support pattern length must equal n");
  detail::require(n_samples >= 1, "n_samples must be at least 1");
  const BlockSampler sampler(spec.tm);
  const LayerPairs pairs(spec);
  const std::size_t chunks = std::min<std::uint64_t>(n_samples, 256);
  std::vector<Acc> accs(chunks, zero);
  parallel_chunks(n_samples, chunks, threads,
                  [&](std::size_t b, std::size_t e, std::size_t c) {
                    std::vector<std::uint8_t> row(spec.n);
                    for (std::size_t i = b; i < e; ++i) {
                      row = p.bits();
                      SplitMix64 rng = SplitMix64::stream(seed, i);
                      visit(row, 0, accs[c]);
                      for (int t = 0; t < spec.depth; ++t) {
                        mc_layer(row, pairs(t), sampler, rng);
                        visit(row, t + 1, accs[c]);
                      }
                    }
                  });
  return accs;
}

}  // namespace detail

/// One trajectory with its full space-time grid.
inline TrajectoryConfig sample_trajectory(const BrickwallSpec& spec,
                                          const SupportPattern& p,
                                          std::uint64_t seed,
                                          std::uint64_t index = 0) {
  spec.validate();
  detail::require(p.size() == spec.n, "support pattern length must equal n");
  TrajectoryConfig cfg(spec.n, spec.depth, seed);
  const detail::BlockSampler sampler(spec.tm);
  const detail::LayerPairs pairs(spec);
  std::vector<std::uint8_t> row = p.bits();
  SplitMix64 rng = SplitMix64::stream(seed, index);
  auto store = [&](int t) {
    for (int x = 0; x < spec.n; ++x) cfg.set(x, t, row[x]);
  };
  store(0);
  for (int t = 0; t < spec.depth; ++t) {
    detail::mc_layer(row, pairs(t), sampler, rng);
    store(t + 1);
  }
  return cfg;
}

/// Per-(x, t) sample mean and binomial standard error, indexed [t * n + x].
struct OccupationField {
  int n = 0;
  int depth = 0;
  std::uint64_t samples = 0;
  std::vector<double> rho;
  std::vector<double> stderr_;

  double at(int x, int t) const { return rho[std::size_t(t) * n + x]; }
  double err(int x, int t) const { return stderr_[std::size_t(t) * n + x]; }
};

inline OccupationField estimate_occupation(const BrickwallSpec& spec,
                                           const SupportPattern& p,
                                           std::uint64_t n_samples,
                                           std::uint64_t seed,
                                           unsigned threads = 0) {
  const std::size_t cells = std::size_t(spec.n) * (spec.depth + 1);
  const auto accs = detail::run_trajectories(
      spec, p, n_samples, seed, threads, std::vector<std::uint64_t>(cells, 0),
      [n = spec.n](const std::vector<std::uint8_t>& row, int t,
                   std::vector<std::uint64_t>& acc) {
        std::uint64_t* base = acc.data() + std::size_t(t) * n;
        for (int x = 0; x < n; ++x) base[x] += row[x];
      });
  OccupationField f;
  f.n = spec.n;
  f.depth = spec.depth;
  f.samples = n_samples;
  f.rho.assign(cells, 0.0);
  f.stderr_.assign(cells, 0.0);
  std::vector<std::uint64_t> total(cells, 0);
  for (const auto& a : accs)
    for (std::size_t i = 0; i < cells; ++i) total[i] += a[i];
  const double N = double(n_samples);
  for (std::size_t i = 0; i < cells; ++i) {
    const double m = double(total[i]) / N;
    f.rho[i] = m;
    f.stderr_[i] = std::sqrt(m * (1.0 - m) / N);
  }
  return f;
}

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Mean of 3^{-|b_T|} over final rows.
/// Pauli-weight estimates at every depth 0..spec.depth from one sample set.
inline std::vector<Estimate> estimate_pauli_weight_series(const BrickwallSpec& spec,
                                                          const SupportPattern& p,
                                                          std::uint64_t n_samples,
                                                          std::uint64_t seed,
                                                          unsigned threads = 0) {
  const int n = spec.n;
  const std::size_t cells = std::size_t(spec.depth + 1) * (n + 1);
  // Histogram of the occupied-site count, one row per depth.
  const auto accs = detail::run_trajectories(
      spec, p, n_samples, seed, threads, std::vector<std::uint64_t>(cells, 0),
      [n](const std::vector<std::uint8_t>& row, int t, std::vector<std::uint64_t>& hist) {
        int k = 0;
        for (auto b : row) k += b;
        ++hist[std::size_t(t) * (n + 1) + k];
      });
  std::vector<std::uint64_t> hist(cells, 0);
  for (const auto& a : accs)
    for (std::size_t i = 0; i < cells; ++i) hist[i] += a[i];
  const double N = double(n_samples);
  std::vector<Estimate> out;
  for (int t = 0; t <= spec.depth; ++t) {
    double m1 = 0.0, m2 = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double w = std::pow(3.0, -k);
      const double c = double(hist[std::size_t(t) * (n + 1) + k]);
      m1 += c * w;
      m2 += c * w * w;
    }
    m1 /= N;
    m2 /= N;
    const double var = std::max(0.0, m2 - m1 * m1);
    out.push_back({m1, std::sqrt(var / N)});
  }
  return out;
}

inline Estimate estimate_pauli_weight(const BrickwallSpec& spec,
                                      const SupportPattern& p,
                                      std::uint64_t n_samples, std::uint64_t seed,
                                      unsigned threads = 0) {
  return estimate_pauli_weight_series(spec, p, n_samples, seed, threads).back();
}

/// Translation-averaged covariance f(j) = E[x_i x_{i+j}] - rho^2 at one slice.
struct CovarianceTable {
  double rho = 0.0;
  std::vector<double> f;
  std::vector<double> stderr_;
};

inline CovarianceTable estimate_covariance(const BrickwallSpec& spec,
                                           const SupportPattern& p,
                                           std::uint64_t n_samples,
                                           std::uint64_t seed, int t_slice,
                                           unsigned threads = 0) {
  if (spec.boundary != Boundary::periodic) {
    throw std::invalid_argument("covariance estimator needs a periodic boundary");
  }
  if (p.count() != p.size()) {
    throw std::invalid_argument("covariance estimator needs full support");
  }
  detail::require(t_slice >= 0 && t_slice <= spec.depth, "t_slice out of range");
  BrickwallSpec run = spec;
  run.depth = t_slice;
  const int n = spec.n;
  const int J = n / 2;
  // Layout: [sum m, sum m^2, sum c_j (J+1), sum c_j^2 (J+1), sum c_j m (J+1)].
  const std::size_t width = 2 + 3 * std::size_t(J + 1);
  const auto accs = detail::run_trajectories(
      run, p, n_samples, seed, threads, std::vector<std::uint64_t>(width, 0),
      [n, J, t_slice](const std::vector<std::uint8_t>& row, int t,
                      std::vector<std::uint64_t>& acc) {
        if (t != t_slice) return;
        std::uint64_t m = 0;
        for (auto b : row) m += b;
        acc[0] += m;
        acc[1] += m * m;
        for (int j = 0; j <= J; ++j) {
          std::uint64_t c = 0;
          for (int i = 0; i < n; ++i) c += row[i] & row[(i + j) % n];
          acc[2 + j] += c;
          acc[2 + (J + 1) + j] += c * c;
          acc[2 + 2 * (J + 1) + j] += c * m;
        }
      });
  std::vector<std::uint64_t> tot(width, 0);
  for (const auto& a : accs)
    for (std::size_t i = 0; i < width; ++i) tot[i] += a[i];

  const double N = double(n_samples), dn = double(n);
  const double em = double(tot[0]) / N / dn;           // E[m/n]
  const double emm = double(tot[1]) / N / (dn * dn);   // E[(m/n)^2]
  CovarianceTable out;
  out.rho = em;
  out.f.resize(J + 1);
  out.stderr_.resize(J + 1);
  for (int j = 0; j <= J; ++j) {
    const double ec = double(tot[2 + j]) / N / dn;
    const double ecc = double(tot[2 + (J + 1) + j]) / N / (dn * dn);
    const double ecm = double(tot[2 + 2 * (J + 1) + j]) / N / (dn * dn);
    out.f[j] = ec - em * em;
    // Delta method on y = c/n - 2 rho m/n.
    const double var = (ecc - ec * ec) - 4.0 * em * (ecm - ec * em) +
                       4.0 * em * em * (emm - em * em);
    out.stderr_[j] = std::sqrt(std::max(0.0, var) / N);
  }
  return out;
}

}  // namespace pwdyn
