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
 * Closed-form 4x4 Pauli-weight transfer matrices for two-qubit gate
 * ensembles, and the two-qubit shadow norms they imply.
 *
 * Two-site support patterns are indexed 0..3 in the order (00, 01, 10, 11),
 * where the high bit is the LEFT leg of the gate. Entry (out, in) is the
 * probability that input pattern `in` is mapped to output pattern `out`, so
 * every column sums to one.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <ostream>
#include <string>

#include "pwdyn/errors.hpp"

namespace pwdyn {

/// Two-site support pattern index: (left_bit << 1) | right_bit.
enum Pattern : int { p00 = 0, p01 = 1, p10 = 2, p11 = 3 };

inline constexpr const char* pattern_label(int p) {
  constexpr const char* labels[] = {"00", "01", "10", "11"};
  return labels[p];
}

/// Operator-entanglement coordinates (I1, I2) of a gate or gate ensemble.
struct EntanglementCoords {
  double i1 = 0.0;
  double i2 = 0.0;
};

/// True iff (i1, i2) lies in the feasible domain of two-qubit unitaries:
/// the unit box, i1 + i2 >= 1/3 and sqrt(i1) + sqrt(i2) <= 1 (tolerance 1e-9).
inline bool check_feasible(const EntanglementCoords& c) {
  constexpr double tol = 1e-9;
  if (!(c.i1 >= -tol && c.i1 <= 1 + tol && c.i2 >= -tol && c.i2 <= 1 + tol)) {
    return false;
  }
  const double s1 = std::sqrt(std::max(c.i1, 0.0));
  const double s2 = std::sqrt(std::max(c.i2, 0.0));
  return c.i1 + c.i2 >= 1.0 / 3.0 - tol && s1 + s2 <= 1.0 + tol;
}

class TransferMatrix {
 public:
  TransferMatrix() = default;

  /// Row-major entries, entries[out * 4 + in]. Validates the matrix.
  explicit TransferMatrix(const std::array<double, 16>& entries)
      : entries_(entries) {
    validate();
  }

  double operator()(int out, int in) const { return entries_[out * 4 + in]; }
  const std::array<double, 16>& entries() const { return entries_; }

  /// Non-negativity, column stochasticity and vacuum decoupling.
  void validate(double tol = 1e-12) const {
    for (int in = 0; in < 4; ++in) {
      double col = 0.0;
      for (int out = 0; out < 4; ++out) {
        const double v = (*this)(out, in);
        if (v < -tol) {
          throw InvariantViolation("transfer matrix has negative entry at (" +
                                   std::string(pattern_label(out)) + "," +
                                   pattern_label(in) + ")");
        }
        col += v;
      }
      if (std::abs(col - 1.0) > tol) {
        throw InvariantViolation("transfer matrix column " +
                                 std::string(pattern_label(in)) +
                                 " does not sum to one");
      }
    }
    if (std::abs((*this)(p00, p00) - 1.0) > tol) {
      throw InvariantViolation("transfer matrix does not fix the vacuum");
    }
    for (int b = 1; b < 4; ++b) {
      if (std::abs((*this)(p00, b)) > tol || std::abs((*this)(b, p00)) > tol) {
        throw InvariantViolation("transfer matrix couples vacuum to support");
      }
    }
  }

  /// Largest absolute entrywise difference.
  double max_abs_diff(const TransferMatrix& other) const {
    double m = 0.0;
    for (int i = 0; i < 16; ++i) {
      m = std::max(m, std::abs(entries_[i] - other.entries_[i]));
    }
    return m;
  }

  /// `out,in,value` rows with a header, in fixed pattern order.
  void write_csv(std::ostream& os) const {
    os << "out,in,value\n";
    char buf[64];
    for (int out = 0; out < 4; ++out) {
      for (int in = 0; in < 4; ++in) {
        std::snprintf(buf, sizeof(buf), "%.17g", (*this)(out, in));
        os << pattern_label(out) << ',' << pattern_label(in) << ',' << buf
           << '\n';
      }
    }
  }

 private:
  std::array<double, 16> entries_{1, 0, 0, 0, 0, 1, 0, 0,
                                  0, 0, 1, 0, 0, 0, 0, 1};
};

/// The general locally-scrambled two-qubit transfer matrix parameterized by
/// (I1, I2). Infeasible coordinates are accepted with a warning so long as
/// every entry stays non-negative.
inline TransferMatrix general_tm(const EntanglementCoords& c,
                                 bool warn_infeasible = true) {
  const double rest = 1.0 - c.i1 - c.i2;
  // clang-format off
  const std::array<double, 16> e{
      1, 0,    0,    0,
      0, c.i1, c.i2, rest / 3.0,
      0, c.i2, c.i1, rest / 3.0,
      0, rest, rest, (1.0 + 2.0 * (c.i1 + c.i2)) / 3.0};
  // clang-format on
  for (double v : e) {
    if (v < 0.0) {
      throw std::invalid_argument(
          "entanglement coordinates give a negative transfer-matrix entry");
    }
  }
  if (warn_infeasible && !check_feasible(c)) {
    std::cerr << "warning: coordinates (" << c.i1 << ", " << c.i2
              << ") are outside the two-qubit feasible domain\n";
  }
  return TransferMatrix(e);
}

/// Dual-unitary ensemble with scrambling parameter alpha in [0, 2/3].
inline TransferMatrix dual_unitary_tm(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 2.0 / 3.0 + 1e-15)) {
    throw std::invalid_argument("dual-unitary alpha must lie in [0, 2/3]");
  }
  // clang-format off
  return TransferMatrix({
      1, 0,             0,             0,
      0, 0,             1.0 - alpha,   alpha / 3.0,
      0, 1.0 - alpha,   0,             alpha / 3.0,
      0, alpha,         alpha,         1.0 - 2.0 * alpha / 3.0});
  // clang-format on
}

/// Random two-qubit Clifford ensemble, (I1, I2) = (1/5, 1/5).
inline TransferMatrix clifford_tm() {
  constexpr double a = 1.0 / 5.0, b = 3.0 / 5.0;
  // clang-format off
  return TransferMatrix({
      1, 0, 0, 0,
      0, a, a, a,
      0, a, a, a,
      0, b, b, b});
  // clang-format on
}

/// Per-site contraction applied wherever a measurement happens: an empty
/// site counts 1, an occupied one 1/3.
struct MeasurementVector {
  static constexpr double empty = 1.0;
  static constexpr double occupied = 1.0 / 3.0;
};

/// Closed-form shadow norm of a weight-k Pauli (k = 0, 1, 2) on two qubits
/// measured after one gate whose ensemble has I1 + I2 = s.
inline double two_qubit_shadow_norm(int k, double s) {
  switch (k) {
    case 0:
      return 1.0;
    case 1:
      return 9.0 / (1.0 + 2.0 * s);
    case 2:
      return 27.0 / (7.0 - 4.0 * s);
    default:
      throw std::invalid_argument("two-qubit shadow norm needs k in {0,1,2}");
  }
}

}  // namespace pwdyn
