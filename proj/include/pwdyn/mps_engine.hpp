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
 * Tensor-train form of the support-pattern distribution for open chains.
 *
 * Each site holds two real matrices, one per physical value (empty,
 * occupied). The train is kept in mixed-canonical form with respect to the
 * Euclidean norm: cores left of `center` are left-orthonormal, cores right of
 * it right-orthonormal. Even layers sweep left to right, odd layers right to
 * left, so each two-site update sits next to the orthogonality center and
 * its SVD truncation is locally optimal.
 *
 * A full-support Pauli weight is roughly 2^-n times the total mass, far below
 * the SVD noise floor of a mass-normalized train. Weights are therefore taken
 * from a tilted train that carries W(s) 3^-|s| instead: each block matrix is
 * conjugated by diag(1, 1/3, 1/3, 1/9), which keeps it non-negative, and the
 * train's mass is the weight itself. Its log is accumulated in `log_scale`.
 */

#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pwdyn/dense_engine.hpp"
#include "pwdyn/errors.hpp"
#include "pwdyn/lattice.hpp"

namespace pwdyn {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

inline constexpr int kDefaultMaxBond = 200;
inline constexpr double kDefaultCutoff = 1e-12;

class MpsWeightState {
 public:
  using Core = std::array<MatrixXd, 2>;

  int n() const { return static_cast<int>(cores_.size()); }
  int time() const { return time_; }
  int max_bond() const { return max_bond_; }
  double cutoff() const { return cutoff_; }
  /// Stochastic trains: summed |mass - 1| drift. Tilted trains: summed
  /// discarded fraction of the squared singular values.
  double cumulative_trunc_error() const { return cum_err_; }
  /// |mass - 1| seen just before the most recent renormalization.
  double last_mass_drift() const { return last_drift_; }
  bool tilted() const { return tilted_; }
  /// log of the factor divided out of a tilted train so far.
  double log_scale() const { return log_scale_; }
  const std::vector<Core>& cores() const { return cores_; }

  /// Bond dimension between site x and x+1.
  int bond(int x) const { return static_cast<int>(cores_[x][0].cols()); }
  int max_bond_used() const {
    int m = 1;
    for (int x = 0; x + 1 < n(); ++x) m = std::max(m, bond(x));
    return m;
  }

 private:
  friend MpsWeightState mps_init(const SupportPattern&, int, double);
  friend MpsWeightState mps_init_tilted(const SupportPattern&, int, double);
  friend void mps_apply_layer(MpsWeightState&, const BrickwallSpec&, int);

  std::vector<Core> cores_;
  int center_ = 0;
  int time_ = 0;
  int max_bond_ = kDefaultMaxBond;
  double cutoff_ = kDefaultCutoff;
  double cum_err_ = 0.0;
  double last_drift_ = 0.0;
  bool tilted_ = false;
  double log_scale_ = 0.0;
  double discarded_ = 0.0;

  // QR-shift the orthogonality center one site to the right.
  void shift_right() {
    const int x = center_;
    const Eigen::Index dl = cores_[x][0].rows(), dr = cores_[x][0].cols();
    MatrixXd m(2 * dl, dr);
    m.topRows(dl) = cores_[x][0];
    m.bottomRows(dl) = cores_[x][1];
    Eigen::HouseholderQR<MatrixXd> qr(m);
    const Eigen::Index k = std::min<Eigen::Index>(2 * dl, dr);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(2 * dl, k);
    MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    cores_[x][0] = q.topRows(dl);
    cores_[x][1] = q.bottomRows(dl);
    for (auto& a : cores_[x + 1]) a = r * a;
    ++center_;
  }

  // LQ-shift the orthogonality center one site to the left.
  void shift_left() {
    const int x = center_;
    const Eigen::Index dl = cores_[x][0].rows(), dr = cores_[x][0].cols();
    MatrixXd mt(2 * dr, dl);  // transpose of [A0 A1]
    mt.topRows(dr) = cores_[x][0].transpose();
    mt.bottomRows(dr) = cores_[x][1].transpose();
    Eigen::HouseholderQR<MatrixXd> qr(mt);
    const Eigen::Index k = std::min<Eigen::Index>(2 * dr, dl);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(2 * dr, k);
    MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    cores_[x][0] = q.topRows(dr).transpose();
    cores_[x][1] = q.bottomRows(dr).transpose();
    for (auto& a : cores_[x - 1]) a = a * r.transpose();
    --center_;
  }

  void move_center(int target) {
    while (center_ < target) shift_right();
    while (center_ > target) shift_left();
  }

  // Contract the block (x, x+1), apply the transfer matrix, split by SVD.
  // The center must be at x or x+1 and ends at x+1 if `to_right`, else x.
  void update_block(int x, const std::array<double, 16>& tm, bool to_right) {
    const Eigen::Index dl = cores_[x][0].rows();
    const Eigen::Index dr = cores_[x + 1][0].cols();
    std::array<MatrixXd, 4> theta;
    for (int s1 = 0; s1 < 2; ++s1)
      for (int s2 = 0; s2 < 2; ++s2)
        theta[(s1 << 1) | s2] = cores_[x][s1] * cores_[x + 1][s2];
    MatrixXd m(2 * dl, 2 * dr);
    for (int o = 0; o < 4; ++o) {
      MatrixXd acc = MatrixXd::Zero(dl, dr);
      for (int i = 0; i < 4; ++i) {
        const double c = tm[o * 4 + i];
        if (c != 0.0) acc += c * theta[i];
      }
      m.block((o >> 1) * dl, (o & 1) * dr, dl, dr) = acc;
    }
    Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sv = svd.singularValues();
    Eigen::Index keep = 0;
    if (sv.size() > 0 && sv(0) > 0.0) {
      const double s1 = sv(0);
      while (keep < sv.size() && keep < max_bond_ && sv(keep) / s1 > cutoff_) {
        ++keep;
      }
    }
    keep = std::max<Eigen::Index>(keep, 1);
    const double total = sv.squaredNorm();
    if (total > 0.0) discarded_ += sv.tail(sv.size() - keep).squaredNorm() / total;
    MatrixXd u = svd.matrixU().leftCols(keep);
    MatrixXd vt = svd.matrixV().leftCols(keep).transpose();
    const VectorXd s = sv.head(keep);
    if (to_right) {
      vt = s.asDiagonal() * vt;
      center_ = x + 1;
    } else {
      u = u * s.asDiagonal();
      center_ = x;
    }
    cores_[x][0] = u.topRows(dl);
    cores_[x][1] = u.bottomRows(dl);
    cores_[x + 1][0] = vt.leftCols(dr);
    cores_[x + 1][1] = vt.rightCols(dr);
  }
};

inline MpsWeightState mps_init(const SupportPattern& p,
                               int max_bond = kDefaultMaxBond,
                               double cutoff = kDefaultCutoff) {
  detail::require(p.size() >= 1, "empty support pattern");
  detail::require(max_bond >= 1, "max_bond must be positive");
  detail::require(cutoff >= 0.0, "cutoff must be non-negative");
  MpsWeightState s;
  s.max_bond_ = max_bond;
  s.cutoff_ = cutoff;
  s.cores_.resize(p.size());
  for (int x = 0; x < p.size(); ++x) {
    s.cores_[x][0] = MatrixXd::Constant(1, 1, p[x] ? 0.0 : 1.0);
    s.cores_[x][1] = MatrixXd::Constant(1, 1, p[x] ? 1.0 : 0.0);
  }
  return s;
}

/// Tilted train for Pauli weights: starts from the indicator of `p` with
/// log_scale = -|p| log 3.
inline MpsWeightState mps_init_tilted(const SupportPattern& p,
                                      int max_bond = kDefaultMaxBond,
                                      double cutoff = kDefaultCutoff) {
  MpsWeightState s = mps_init(p, max_bond, cutoff);
  s.tilted_ = true;
  s.log_scale_ = -p.count() * std::log(3.0);
  return s;
}

namespace detail {

/// Block matrix conjugated by 3^-|s|: entry (out, in) gains 3^(|in| - |out|).
inline std::array<double, 16> tilt(const TransferMatrix& tm) {
  std::array<double, 16> e = tm.entries();
  for (int o = 0; o < 4; ++o) {
    for (int i = 0; i < 4; ++i) {
      e[o * 4 + i] *= std::pow(3.0, std::popcount(unsigned(i)) - std::popcount(unsigned(o)));
    }
  }
  return e;
}

/// log|contraction| of the train against per-site weights (w0, w1), with the
/// running environment rescaled at every site.
inline double log_contract(const std::vector<MpsWeightState::Core>& cores,
                           const std::function<std::array<double, 2>(int)>& w,
                           double* sign_out = nullptr) {
  RowVectorXd env = RowVectorXd::Ones(1);
  double log_scale = 0.0;
  for (int x = 0; x < static_cast<int>(cores.size()); ++x) {
    const auto wx = w(x);
    RowVectorXd next = RowVectorXd::Zero(cores[x][0].cols());
    if (wx[0] != 0.0) next += wx[0] * (env * cores[x][0]);
    if (wx[1] != 0.0) next += wx[1] * (env * cores[x][1]);
    const double m = next.cwiseAbs().maxCoeff();
    if (m == 0.0) {
      if (sign_out) *sign_out = 0.0;
      return -std::numeric_limits<double>::infinity();
    }
    env = next / m;
    log_scale += std::log(m);
  }
  const double v = env(0);
  if (sign_out) *sign_out = v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
  return log_scale + std::log(std::abs(v));
}

inline double contract(const std::vector<MpsWeightState::Core>& cores,
                       const std::function<std::array<double, 2>(int)>& w) {
  double sign = 0.0;
  const double l = log_contract(cores, w, &sign);
  return sign == 0.0 ? 0.0 : sign * std::exp(l);
}

}  // namespace detail

inline double mps_mass(const MpsWeightState& s) {
  return detail::contract(s.cores(), [](int) { return std::array{1.0, 1.0}; });
}

/// Applies one layer in place (open boundary only) and renormalizes the
/// mass. A stochastic train adds the pre-renormalization drift to the
/// cumulative error; a tilted one moves the factor into log_scale.
inline void mps_apply_layer(MpsWeightState& s, const BrickwallSpec& spec,
                            int layer_index) {
  detail::require(spec.boundary == Boundary::open,
                  "MPS engine supports open boundaries only");
  detail::require(spec.n == s.n(), "spec and state disagree on n");
  detail::require(s.time_ == layer_index, "state time must equal layer index");
  const auto block = s.tilted_ ? detail::tilt(spec.tm) : spec.tm.entries();
  auto pairs = spec.pairs(layer_index);
  const bool left_to_right = layer_index % 2 == 0;
  if (!left_to_right) std::reverse(pairs.begin(), pairs.end());
  for (const auto& [l, r] : pairs) {
    if (left_to_right) {
      s.move_center(l);
    } else {
      s.move_center(r);
    }
    s.update_block(l, block, left_to_right);
  }
  ++s.time_;
  const double m = mps_mass(s);
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw InvariantViolation("MPS mass collapsed to " + std::to_string(m));
  }
  if (s.tilted_) {
    s.log_scale_ += std::log(m);
    s.cum_err_ = s.discarded_;
  } else {
    s.last_drift_ = std::abs(m - 1.0);
    s.cum_err_ += s.last_drift_;
  }
  for (auto& a : s.cores_[s.center_]) a /= m;
}

namespace detail {

inline MpsWeightState run_layers(const BrickwallSpec& spec, MpsWeightState s,
                                 const std::function<void(const MpsWeightState&)>& observe) {
  if (observe) observe(s);
  for (int t = 0; t < spec.depth; ++t) {
    mps_apply_layer(s, spec, t);
    if (observe) observe(s);
  }
  return s;
}

}  // namespace detail

inline MpsWeightState mps_evolve(
    const BrickwallSpec& spec, const SupportPattern& p,
    int max_bond = kDefaultMaxBond, double cutoff = kDefaultCutoff,
    const std::function<void(const MpsWeightState&)>& observe = {}) {
  spec.validate();
  detail::require(p.size() == spec.n, "support pattern length must equal n");
  return detail::run_layers(spec, mps_init(p, max_bond, cutoff), observe);
}

/// Tilted evolution; only mps_log_pauli_weight is meaningful on its states.
inline MpsWeightState mps_evolve_tilted(
    const BrickwallSpec& spec, const SupportPattern& p,
    int max_bond = kDefaultMaxBond, double cutoff = kDefaultCutoff,
    const std::function<void(const MpsWeightState&)>& observe = {}) {
  spec.validate();
  detail::require(p.size() == spec.n, "support pattern length must equal n");
  return detail::run_layers(spec, mps_init_tilted(p, max_bond, cutoff), observe);
}

/// rho(x) for a 0-based site.
inline double mps_occupation(const MpsWeightState& s, int x) {
  detail::require(!s.tilted(), "occupations need a stochastic train");
  detail::require(x >= 0 && x < s.n(), "site out of range");
  return detail::contract(s.cores(), [x](int y) {
    return y == x ? std::array{0.0, 1.0} : std::array{1.0, 1.0};
  });
}

/// All single-site occupations from left and right environments.
inline std::vector<double> mps_occupation_profile(const MpsWeightState& s) {
  detail::require(!s.tilted(), "occupations need a stochastic train");
  const int n = s.n();
  const auto& c = s.cores();
  std::vector<RowVectorXd> left(n + 1);
  std::vector<VectorXd> right(n + 1);
  left[0] = RowVectorXd::Ones(1);
  for (int x = 0; x < n; ++x) left[x + 1] = left[x] * (c[x][0] + c[x][1]);
  right[n] = VectorXd::Ones(1);
  for (int x = n - 1; x >= 0; --x) right[x] = (c[x][0] + c[x][1]) * right[x + 1];
  std::vector<double> rho(n);
  for (int x = 0; x < n; ++x) rho[x] = (left[x] * c[x][1] * right[x + 1])(0);
  return rho;
}

/// Exact on tilted trains. On stochastic trains the direct contraction is
/// only trustworthy while the weight is not exponentially small in n.
inline double mps_log_pauli_weight(const MpsWeightState& s) {
  if (s.tilted()) {
    return s.log_scale() + detail::log_contract(s.cores(), [](int) {
             return std::array{1.0, 1.0};
           });
  }
  return detail::log_contract(s.cores(),
                              [](int) { return std::array{1.0, 1.0 / 3.0}; });
}

inline double mps_pauli_weight(const MpsWeightState& s) {
  return std::exp(mps_log_pauli_weight(s));
}

/// Amplitude of one basis pattern.
inline double mps_amplitude(const MpsWeightState& s, const SupportPattern& b) {
  detail::require(!s.tilted(), "amplitudes need a stochastic train");
  detail::require(b.size() == s.n(), "pattern length mismatch");
  return detail::contract(s.cores(), [&b](int x) {
    return b[x] ? std::array{0.0, 1.0} : std::array{1.0, 0.0};
  });
}

/// Full contraction into a dense vector (validation mode, n <= 20).
inline WeightState mps_to_dense(const MpsWeightState& s) {
  const int n = s.n();
  detail::require(n <= 20, "mps_to_dense is limited to n <= 20");
  // Rows index the already-contracted left sites; site 0 is the top bit.
  MatrixXd acc = MatrixXd::Ones(1, 1);
  for (int x = 0; x < n; ++x) {
    const auto& c = s.cores()[x];
    MatrixXd next(acc.rows() * 2, c[0].cols());
    for (Eigen::Index r = 0; r < acc.rows(); ++r) {
      next.row(2 * r) = acc.row(r) * c[0];
      next.row(2 * r + 1) = acc.row(r) * c[1];
    }
    acc = std::move(next);
  }
  std::vector<double> amps(acc.rows());
  for (Eigen::Index i = 0; i < acc.rows(); ++i) amps[i] = acc(i, 0);
  return WeightState(n, std::move(amps), s.time());
}

}  // namespace pwdyn
