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
 * Mean-field occupation dynamics, its homogeneous closed form, the shadow
 * norm scaling base beta, the Clifford reference curve, optimal-depth scans
 * and the thermal-bound diagnostics.
 *
 * Mover densities: in a block (l, r) of layer t, the left site holds the
 * incoming right-mover and the right site the incoming left-mover. After the
 * gate the left site holds the outgoing left-mover and vice versa.
 */

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "pwdyn/dense_engine.hpp"
#include "pwdyn/errors.hpp"
#include "pwdyn/lattice.hpp"
#include "pwdyn/mps_engine.hpp"

namespace pwdyn {

inline void require_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 2.0 / 3.0 + 1e-15)) {
    throw std::invalid_argument("alpha must lie in [0, 2/3]");
  }
}

/// rho_R, rho_L -> outgoing (left-mover, right-mover) densities:
///   rho_L' = rho_L + alpha (rho_R - 4/3 rho_L rho_R), symmetric for rho_R'.
inline std::pair<double, double> mf_block(double rho_right_mover,
                                          double rho_left_mover, double alpha) {
  const double prod = 4.0 / 3.0 * rho_left_mover * rho_right_mover;
  return {rho_left_mover + alpha * (rho_right_mover - prod),
          rho_right_mover + alpha * (rho_left_mover - prod)};
}

/// One layer on a row of site occupations. Unpaired open-boundary sites
/// copy through.
inline std::vector<double> mf_step(const std::vector<double>& row, double alpha,
                                   int layer_index, Boundary boundary) {
  require_alpha(alpha);
  const int n = static_cast<int>(row.size());
  for (double v : row) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("mean-field row values must lie in [0, 1]");
    }
  }
  BrickwallSpec geo;
  geo.n = n;
  geo.boundary = boundary;
  geo.validate();
  std::vector<double> out = row;
  for (const auto& [l, r] : geo.pairs(layer_index)) {
    const auto [left_site, right_site] = mf_block(row[l], row[r], alpha);
    out[l] = left_site;
    out[r] = right_site;
  }
  return out;
}

struct MeanFieldGrid {
  int n = 0;
  int depth = 0;
  double alpha = 0.0;
  Boundary boundary = Boundary::open;
  std::vector<double> rho;  ///< [t * n + x]

  double at(int x, int t) const { return rho[std::size_t(t) * n + x]; }
  std::vector<double> row(int t) const {
    return {rho.begin() + std::size_t(t) * n, rho.begin() + std::size_t(t + 1) * n};
  }
};

inline MeanFieldGrid mf_evolve(const std::vector<double>& row0, double alpha,
                               int depth, Boundary boundary) {
  detail::require(depth >= 0, "depth must be non-negative");
  MeanFieldGrid g;
  g.n = static_cast<int>(row0.size());
  g.depth = depth;
  g.alpha = alpha;
  g.boundary = boundary;
  g.rho = row0;
  std::vector<double> row = row0;
  for (int t = 0; t < depth; ++t) {
    row = mf_step(row, alpha, t, boundary);
    g.rho.insert(g.rho.end(), row.begin(), row.end());
  }
  if (depth == 0) mf_step(row, alpha, 0, boundary);  // validates inputs
  return g;
}

/// rho(t+1) = rho(t) + alpha rho(t) (1 - 4 rho(t) / 3); returns t = 0..steps.
inline std::vector<double> homogeneous_recurrence(double rho0, double alpha,
                                                  int steps) {
  detail::require(rho0 >= 0.0 && rho0 <= 1.0, "rho0 must lie in [0, 1]");
  detail::require(steps >= 0, "steps must be non-negative");
  std::vector<double> out{rho0};
  double r = rho0;
  for (int t = 0; t < steps; ++t) {
    r = r + alpha * r * (1.0 - 4.0 * r / 3.0);
    out.push_back(r);
  }
  return out;
}

/// (3/4) / (1 + A exp(-alpha' t)).
inline double homogeneous_closed_form(double t, double alpha_prime, double a) {
  detail::require(alpha_prime >= 0.0, "alpha' must be non-negative");
  return 0.75 / (1.0 + a * std::exp(-alpha_prime * t));
}

struct AlphaPrimeFit {
  double alpha_prime = 0.0;
  double a = 0.0;
  double max_residual = 0.0;  ///< over t in [1, 40]
};

namespace detail {

struct ClosedFormResidual {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  std::vector<double> ts, ys;

  int inputs() const { return 2; }
  int values() const { return static_cast<int>(ts.size()); }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const {
    for (std::size_t i = 0; i < ts.size(); ++i) {
      f(i) = 0.75 / (1.0 + p(1) * std::exp(-p(0) * ts[i])) - ys[i];
    }
    return 0;
  }
  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& j) const {
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double e = std::exp(-p(0) * ts[i]);
      const double den = 1.0 + p(1) * e;
      const double g = -0.75 / (den * den);
      j(i, 0) = g * p(1) * e * (-ts[i]);
      j(i, 1) = g * e;
    }
    return 0;
  }
};

}  // namespace detail

inline constexpr int kFitFirstT = 1;
inline constexpr int kFitLastT = 40;

/// Least-squares fit of the closed form to the recurrence from rho0 = 1 over
/// t in [1, 40].
inline AlphaPrimeFit fit_alpha_prime_full(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0 / 3.0 + 1e-15)) {
    throw std::invalid_argument("alpha' fit needs alpha in (0, 2/3]");
  }
  const auto seq = homogeneous_recurrence(1.0, alpha, kFitLastT);
  detail::ClosedFormResidual fn;
  for (int t = kFitFirstT; t <= kFitLastT; ++t) {
    fn.ts.push_back(t);
    fn.ys.push_back(seq[t]);
  }
  // Start from the small-alpha limit and the A implied by rho(1).
  Eigen::VectorXd p(2);
  p(0) = alpha;
  p(1) = (0.75 / seq[1] - 1.0) * std::exp(alpha);
  Eigen::LevenbergMarquardt<detail::ClosedFormResidual> lm(fn);
  lm.parameters.ftol = 1e-15;
  lm.parameters.xtol = 1e-15;
  lm.parameters.maxfev = 10000;
  lm.minimize(p);
  AlphaPrimeFit r{p(0), p(1), 0.0};
  for (std::size_t i = 0; i < fn.ts.size(); ++i) {
    r.max_residual = std::max(
        r.max_residual,
        std::abs(homogeneous_closed_form(fn.ts[i], r.alpha_prime, r.a) - fn.ys[i]));
  }
  return r;
}

inline double fit_alpha_prime(double alpha) {
  return fit_alpha_prime_full(alpha).alpha_prime;
}

struct QuadraticFit {
  double c2 = 0.0;
  double rel_residual = 0.0;       ///< ||alpha' - model||_2 / ||alpha'||_2
  double max_rel_residual = 0.0;   ///< max_i |alpha'_i - model_i| / alpha'_i
};

/// alpha' = alpha + c2 alpha^2 by least squares over the given points.
inline QuadraticFit fit_quadratic_correction(const std::vector<double>& alphas,
                                             const std::vector<double>& alpha_primes) {
  detail::require(alphas.size() == alpha_primes.size() && !alphas.empty(),
                  "quadratic fit needs matching non-empty inputs");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double a2 = alphas[i] * alphas[i];
    num += a2 * (alpha_primes[i] - alphas[i]);
    den += a2 * a2;
  }
  QuadraticFit q;
  q.c2 = num / den;
  double rr = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double model = alphas[i] + q.c2 * alphas[i] * alphas[i];
    const double r = alpha_primes[i] - model;
    rr += r * r;
    yy += alpha_primes[i] * alpha_primes[i];
    q.max_rel_residual = std::max(q.max_rel_residual, std::abs(r / alpha_primes[i]));
  }
  q.rel_residual = std::sqrt(rr / yy);
  return q;
}

/// beta at t = 1 written as 2 + 1/beta1: beta1 = 1 / (3/sqrt(1 + 4 alpha/3) - 2).
inline double beta1(double alpha) {
  require_alpha(alpha);
  return 1.0 / (3.0 / std::sqrt(1.0 + 4.0 * alpha / 3.0) - 2.0);
}

/// 2 (log(1/2) / log(3)^2 + 3 / (4 log 3)).
inline double sigma2_inf() {
  const double l3 = std::log(3.0);
  return 2.0 * (std::log(0.5) / (l3 * l3) + 3.0 / (4.0 * l3));
}

/// Continuum mean-field scaling base:
/// beta = 2 + 1 / ((1 + beta1) exp(alpha' (t - 1)) - 1).
inline double beta_mft(double t, double alpha, double alpha_prime) {
  if (!(t >= 1.0)) throw std::invalid_argument("beta_mft needs t >= 1");
  return 2.0 + 1.0 / ((1.0 + beta1(alpha)) * std::exp(alpha_prime * (t - 1.0)) - 1.0);
}

inline double beta_mft(double t, double alpha) {
  require_alpha(alpha);
  const double ap = alpha > 0.0 ? fit_alpha_prime(alpha) : 0.0;
  return beta_mft(t, alpha, ap);
}

/// Geometric mean over sites of 1 / (1 - 2 rho(x) / 3).
inline double beta_from_occupation(const std::vector<double>& rho) {
  detail::require(!rho.empty(), "empty occupation row");
  double acc = 0.0;
  for (double r : rho) {
    detail::require(r >= 0.0 && r <= 1.0 + 1e-12, "occupation outside [0, 1]");
    acc -= std::log(1.0 - 2.0 * r / 3.0);
  }
  return std::exp(acc / double(rho.size()));
}

/// c (16/25)^t t^{-3/2} + 3/4.
inline double clifford_rho_reference(double t, double c) {
  detail::require(t >= 1.0, "Clifford reference needs t >= 1");
  return c * std::pow(16.0 / 25.0, t) * std::pow(t, -1.5) + 0.75;
}

inline double clifford_beta_reference(double t, double c) {
  return 1.0 / (1.0 - 2.0 * clifford_rho_reference(t, c) / 3.0);
}

/// Least-squares c for rho(t) - 3/4 = c (16/25)^t t^{-3/2}.
inline double fit_clifford_constant(const std::vector<double>& ts,
                                    const std::vector<double>& rho) {
  detail::require(ts.size() == rho.size() && !ts.empty(),
                  "Clifford fit needs matching non-empty inputs");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double g = std::pow(16.0 / 25.0, ts[i]) * std::pow(ts[i], -1.5);
    num += g * (rho[i] - 0.75);
    den += g * g;
  }
  return num / den;
}

/// The alpha at which alpha' equals the Clifford decay rate log(25/16).
inline double alpha_star_mf() {
  const double target = std::log(25.0 / 16.0);
  double lo = 0.05, hi = 2.0 / 3.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fit_alpha_prime(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Mean-field drift m(rho) = alpha' (1 - 4 rho / 3).
inline double mf_drift(double rho, double alpha_prime) {
  return alpha_prime * (1.0 - 4.0 * rho / 3.0);
}

struct AppendixBound {
  double slack = 0.0;   ///< (1 - 2 rho / 3) - beta_inv
  double sigma2 = 0.0;  ///< 2 log(3^rho beta_inv) / log(3)^2
};

inline AppendixBound appendix_bounds(double rho, double beta_inv) {
  const double l3 = std::log(3.0);
  return {(1.0 - 2.0 * rho / 3.0) - beta_inv,
          2.0 * (rho * l3 + std::log(beta_inv)) / (l3 * l3)};
}

enum class DepthEngine { mps, dense };

/// argmin of a sequence, ties (relative 1e-12) going to the smaller index.
inline int argmin_first(const std::vector<double>& v) {
  detail::require(!v.empty(), "argmin of empty sequence");
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] < v[best] - 1e-12 * std::abs(v[best])) best = i;
  }
  return best;
}

struct DepthScan {
  int t_star = 0;
  std::vector<double> log_norm;  ///< log shadow norm for t = 0..t_max
};

/// Shadow-norm scan of a contiguous size-k operator centred in n sites,
/// open boundary.
inline DepthScan optimal_depth_scan(int k, double alpha, int n, DepthEngine engine,
                                    int t_max, int max_bond = kDefaultMaxBond,
                                    double cutoff = kDefaultCutoff) {
  if (k > n) throw std::invalid_argument("support size k exceeds n");
  detail::require(k >= 1, "k must be positive");
  detail::require(t_max >= 0, "t_max must be non-negative");
  BrickwallSpec spec;
  spec.n = n;
  spec.depth = t_max;
  spec.boundary = Boundary::open;
  spec.tm = dual_unitary_tm(alpha);
  const auto p = SupportPattern::contiguous(n, k, n / 2);
  DepthScan scan;
  if (engine == DepthEngine::dense) {
    evolve(spec, p, [&](const WeightState& s) {
      scan.log_norm.push_back(-std::log(pauli_weight(s)));
    });
  } else {
    mps_evolve_tilted(spec, p, max_bond, cutoff, [&](const MpsWeightState& s) {
      scan.log_norm.push_back(-mps_log_pauli_weight(s));
    });
  }
  scan.t_star = argmin_first(scan.log_norm);
  return scan;
}

inline int optimal_depth(int k, double alpha, int n, DepthEngine engine, int t_max,
                         int max_bond = kDefaultMaxBond,
                         double cutoff = kDefaultCutoff) {
  return optimal_depth_scan(k, alpha, n, engine, t_max, max_bond, cutoff).t_star;
}

/// Slope of y = a x through the origin.
inline double fit_through_origin(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  detail::require(x.size() == y.size() && !x.empty(), "fit needs matching inputs");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += x[i] * y[i];
    den += x[i] * x[i];
  }
  return num / den;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = slope x + intercept.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  detail::require(x.size() == y.size() && x.size() >= 2, "line fit needs at least two points");
  const double m = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  detail::require(sxx > 0, "line fit needs distinct x values");
  return {sxy / sxx, my - sxy / sxx * mx};
}

struct PowerLawFit {
  double c = 0.0;
  double b = 0.0;
};

/// y = c x^b by ordinary least squares in log-log space.
inline PowerLawFit fit_power_law(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  detail::require(x.size() == y.size() && x.size() >= 2,
                  "power-law fit needs at least two points");
  const std::size_t m = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    detail::require(x[i] > 0 && y[i] > 0, "power-law fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double b = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return {std::exp((sy - b * sx) / m), b};
}

}  // namespace pwdyn
