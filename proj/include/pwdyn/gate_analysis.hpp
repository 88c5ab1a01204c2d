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
 * Explicit two-qubit gates, their operator-entanglement coordinates, and the
 * exactly twirled transfer matrix used as an oracle for the closed forms.
 *
 * Basis convention: |q_A q_B> has index 2*q_A + q_B, where A is the left
 * qubit (first tensor factor). Two-qubit Pauli strings are enumerated as
 * (I, X, Y, Z) per site, lexicographic with the left site most significant.
 */

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pwdyn/errors.hpp"
#include "pwdyn/transfer_matrix.hpp"

namespace pwdyn {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

/// Largest entry of |U^dagger U - 1|.
inline double unitarity_residual(const Mat4& u) {
  return (u.adjoint() * u - Mat4::Identity()).cwiseAbs().maxCoeff();
}

/// A two-qubit unitary. Construction checks unitarity.
class GateMatrix {
 public:
  static constexpr double kIngestTol = 1e-8;
  static constexpr double kBuiltTol = 1e-12;

  GateMatrix() : m_(Mat4::Identity()) {}

  explicit GateMatrix(const Mat4& m, double tol = kIngestTol) : m_(m) {
    const double r = unitarity_residual(m_);
    if (!(r <= tol)) {
      throw std::invalid_argument("gate is not unitary (residual " +
                                  std::to_string(r) + ")");
    }
  }

  const Mat4& matrix() const { return m_; }
  cplx operator()(int r, int c) const { return m_(r, c); }

 private:
  Mat4 m_;
};

/// V(J) = exp(-i(pi/4 (XX + YY) + J ZZ)), the dual-unitary core.
inline GateMatrix build_v(double j) {
  using namespace std::complex_literals;
  Mat4 m = Mat4::Zero();
  const cplx corner = std::exp(-1i * j);
  const cplx mid = -1i * std::exp(1i * j);
  m(0, 0) = corner;
  m(3, 3) = corner;
  m(1, 2) = mid;
  m(2, 1) = mid;
  return GateMatrix(m, GateMatrix::kBuiltTol);
}

/// alpha(J) = (2/3) cos^2(2J).
inline double alpha_from_j(double j) {
  const double c = std::cos(2.0 * j);
  return 2.0 / 3.0 * c * c;
}

namespace gates {

inline GateMatrix identity() { return GateMatrix(); }

inline GateMatrix swap() {
  Mat4 m = Mat4::Zero();
  m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
  return GateMatrix(m, GateMatrix::kBuiltTol);
}

/// exp(i pi/4 (XX + YY)).
inline GateMatrix iswap() {
  using namespace std::complex_literals;
  Mat4 m = Mat4::Zero();
  m(0, 0) = m(3, 3) = 1.0;
  m(1, 2) = m(2, 1) = 1i;
  return GateMatrix(m, GateMatrix::kBuiltTol);
}

/// Control on the left qubit.
inline GateMatrix cnot() {
  Mat4 m = Mat4::Zero();
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return GateMatrix(m, GateMatrix::kBuiltTol);
}

inline GateMatrix cz() {
  Mat4 m = Mat4::Identity();
  m(3, 3) = -1.0;
  return GateMatrix(m, GateMatrix::kBuiltTol);
}

inline Mat2 hadamard() {
  Mat2 h;
  h << 1, 1, 1, -1;
  return h / std::numbers::sqrt2;
}

inline Mat2 phase_s() {
  using namespace std::complex_literals;
  Mat2 s;
  s << 1, 0, 0, 1i;
  return s;
}

}  // namespace gates

/// Single-qubit Paulis in the fixed order (I, X, Y, Z).
inline const std::array<Mat2, 4>& single_paulis() {
  using namespace std::complex_literals;
  static const std::array<Mat2, 4> p = [] {
    std::array<Mat2, 4> out;
    out[0] << 1, 0, 0, 1;
    out[1] << 0, 1, 1, 0;
    out[2] << 0, -1i, 1i, 0;
    out[3] << 1, 0, 0, -1;
    return out;
  }();
  return p;
}

inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

/// Dress a gate with single-qubit unitaries: (u_l x u_r) G (v_l x v_r).
inline GateMatrix dress(const GateMatrix& g, const Mat2& u_l, const Mat2& u_r,
                        const Mat2& v_l, const Mat2& v_r) {
  return GateMatrix(kron(u_l, u_r) * g.matrix() * kron(v_l, v_r));
}

struct OperatorPurities {
  double purity_aa = 0.0;  ///< exp(-S2) of inputs+outputs on the left qubit
  double purity_ab = 0.0;  ///< exp(-S2) of left input + right output
};

namespace detail {

/// Choi-state amplitude psi[a][b][a'][b'] = <a'b'|U|ab> / 2 for inputs A,B and
/// outputs A',B'.
inline cplx choi(const Mat4& u, int a, int b, int ap, int bp) {
  return u(2 * ap + bp, 2 * a + b) * 0.5;
}

}  // namespace detail

/// Renyi-2 operator purities from the Choi state, evaluated as the two-copy
/// expectation of SWAP on the chosen pair of legs. Both values lie in [1/4, 1].
inline OperatorPurities operator_purities(const GateMatrix& gate) {
  const Mat4& u = gate.matrix();
  if (unitarity_residual(u) > GateMatrix::kIngestTol) {
    throw std::invalid_argument("operator_purities: gate is not unitary");
  }
  // Two copies with legs (a,b,a',b'); SWAP acts on the listed legs between
  // the copies and identity elsewhere.
  auto two_copy_swap = [&](bool swap_b_out_instead_of_a_out) {
    cplx acc = 0.0;
    for (int a1 = 0; a1 < 2; ++a1)
      for (int b1 = 0; b1 < 2; ++b1)
        for (int ap1 = 0; ap1 < 2; ++ap1)
          for (int bp1 = 0; bp1 < 2; ++bp1) {
            const cplx k1 = detail::choi(u, a1, b1, ap1, bp1);
            if (k1 == 0.0) continue;
            for (int a2 = 0; a2 < 2; ++a2)
              for (int b2 = 0; b2 < 2; ++b2)
                for (int ap2 = 0; ap2 < 2; ++ap2)
                  for (int bp2 = 0; bp2 < 2; ++bp2) {
                    const cplx k2 = detail::choi(u, a2, b2, ap2, bp2);
                    if (k2 == 0.0) continue;
                    // <psi|<psi| SWAP |psi>|psi>: bra legs are the ket legs
                    // with A and the chosen output exchanged between copies.
                    cplx b_1, b_2;
                    if (!swap_b_out_instead_of_a_out) {
                      b_1 = detail::choi(u, a2, b1, ap2, bp1);
                      b_2 = detail::choi(u, a1, b2, ap1, bp2);
                    } else {
                      b_1 = detail::choi(u, a2, b1, ap1, bp2);
                      b_2 = detail::choi(u, a1, b2, ap2, bp1);
                    }
                    acc += std::conj(b_1) * std::conj(b_2) * k1 * k2;
                  }
          }
    return acc.real();
  };
  return {two_copy_swap(false), two_copy_swap(true)};
}

/// I1 = (4 p_AA' - 1) / 3, I2 = (4 p_AB' - 1) / 3.
inline EntanglementCoords entanglement_coords(const GateMatrix& gate) {
  const auto p = operator_purities(gate);
  return {(4.0 * p.purity_aa - 1.0) / 3.0, (4.0 * p.purity_ab - 1.0) / 3.0};
}

/// Transfer matrix of the gate under independent single-qubit Haar twirls on
/// every leg, computed exactly as a Pauli-support sum:
/// T[b, b'] = sum_{P in b} 3^{-|b'|} sum_{P' in b'} (Tr[U P' U^dag P] / 4)^2.
inline TransferMatrix twirled_transfer_matrix(const GateMatrix& gate) {
  const Mat4& u = gate.matrix();
  if (unitarity_residual(u) > GateMatrix::kIngestTol) {
    throw std::invalid_argument("twirled_transfer_matrix: gate is not unitary");
  }
  const auto& s = single_paulis();
  std::array<Mat4, 16> paulis;
  for (int l = 0; l < 4; ++l)
    for (int r = 0; r < 4; ++r) paulis[4 * l + r] = kron(s[l], s[r]);
  auto support = [](int idx) { return ((idx / 4 != 0) << 1) | (idx % 4 != 0); };

  std::array<double, 16> e{};
  for (int in = 0; in < 16; ++in) {
    const Mat4 heis = u * paulis[in] * u.adjoint();
    const int b_in = support(in);
    const double norm_in = std::pow(3.0, -std::popcount(unsigned(b_in)));
    for (int out = 0; out < 16; ++out) {
      const cplx tr = (heis * paulis[out]).trace() / 4.0;
      e[support(out) * 4 + b_in] += norm_in * std::norm(tr);
    }
  }
  // Exact zeros for the vacuum couplings; they vanish analytically.
  for (int b = 1; b < 4; ++b) e[b] = e[b * 4] = 0.0;
  e[0] = 1.0;
  return TransferMatrix(e);
}

/// Haar-random 2x2 / 4x4 unitary via QR of a complex Ginibre matrix.
template <int N, class Rng>
Eigen::Matrix<cplx, N, N> haar_unitary(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Matrix<cplx, N, N> z;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::Matrix<cplx, N, N>> qr(z);
  Eigen::Matrix<cplx, N, N> q = qr.householderQ();
  Eigen::Matrix<cplx, N, N> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (int i = 0; i < N; ++i) {
    const cplx d = r(i, i);
    q.col(i) *= d / std::abs(d);
  }
  return q;
}

namespace detail {

/// Divide out the global phase (set by the first sizeable entry) and round,
/// so that gates equal up to phase map to the same key.
template <int N>
std::vector<std::int64_t> phase_key(const Eigen::Matrix<cplx, N, N>& m) {
  cplx ref = 0.0;
  for (int i = 0; i < m.size() && ref == 0.0; ++i) {
    if (std::abs(m.data()[i]) > 1e-6) ref = m.data()[i] / std::abs(m.data()[i]);
  }
  std::vector<std::int64_t> key;
  key.reserve(2 * m.size());
  for (int i = 0; i < m.size(); ++i) {
    const cplx z = m.data()[i] / ref;
    key.push_back(std::llround(z.real() * 1e6));
    key.push_back(std::llround(z.imag() * 1e6));
  }
  return key;
}

template <int N>
std::vector<Eigen::Matrix<cplx, N, N>> close_group(
    const std::vector<Eigen::Matrix<cplx, N, N>>& generators) {
  using M = Eigen::Matrix<cplx, N, N>;
  std::map<std::vector<std::int64_t>, std::size_t> seen;
  std::vector<M> elems{M::Identity()};
  seen.emplace(phase_key<N>(elems[0]), 0);
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (const M& g : generators) {
      M next = g * elems[head];
      auto key = phase_key<N>(next);
      if (seen.emplace(std::move(key), elems.size()).second) {
        elems.push_back(std::move(next));
      }
    }
  }
  return elems;
}

}  // namespace detail

/// The 24 single-qubit Cliffords modulo phase.
inline const std::vector<Mat2>& single_qubit_cliffords() {
  static const std::vector<Mat2> group =
      detail::close_group<2>({gates::hadamard(), gates::phase_s()});
  return group;
}

/// The 11520 two-qubit Cliffords modulo phase, generated by H, S on each
/// qubit and CNOT.
inline const std::vector<Mat4>& two_qubit_cliffords() {
  static const std::vector<Mat4> group = [] {
    const Mat2 id = Mat2::Identity();
    return detail::close_group<4>({kron(gates::hadamard(), id),
                                   kron(id, gates::hadamard()),
                                   kron(gates::phase_s(), id),
                                   kron(id, gates::phase_s()),
                                   gates::cnot().matrix()});
  }();
  return group;
}

/// Mean (I1, I2) over `count` distinct two-qubit Cliffords drawn uniformly
/// without replacement.
inline EntanglementCoords sampled_clifford_coords(std::size_t count,
                                                  std::uint64_t seed) {
  const auto& group = two_qubit_cliffords();
  detail::require(count >= 1 && count <= group.size(),
                  "clifford sample count out of range");
  std::vector<std::size_t> order(group.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto c = entanglement_coords(GateMatrix(group[order[i]]));
    s1 += c.i1;
    s2 += c.i2;
  }
  return {s1 / double(count), s2 / double(count)};
}

/// Parse a gate file: four lines of four `re,im` pairs separated by
/// whitespace (row-major). Blank lines and `#` comments are skipped.
inline GateMatrix parse_gate(std::istream& in) {
  Mat4 m;
  int row = 0;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    std::vector<cplx> vals;
    while (ls >> tok) {
      const auto comma = tok.find(',');
      if (comma == std::string::npos) {
        throw ConfigError("gate entry '" + tok + "' is not a re,im pair");
      }
      try {
        vals.emplace_back(std::stod(tok.substr(0, comma)),
                          std::stod(tok.substr(comma + 1)));
      } catch (const std::logic_error&) {
        throw ConfigError("gate entry '" + tok + "' is not numeric");
      }
    }
    if (vals.empty()) continue;
    if (vals.size() != 4 || row >= 4) {
      throw ConfigError("gate file must hold 4 rows of 4 complex entries");
    }
    for (int c = 0; c < 4; ++c) m(row, c) = vals[c];
    ++row;
  }
  if (row != 4) throw ConfigError("gate file must hold 4 rows");
  try {
    return GateMatrix(m);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

inline GateMatrix load_gate(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open gate file " + path);
  return parse_gate(f);
}

struct GateRecord {
  EntanglementCoords coords;
  bool feasible = false;
  bool dual_unitary = false;
  double alpha = 0.0;  ///< meaningful only when dual_unitary
};

/// I1 = 0 marks a dual-unitary gate, in which case alpha = 1 - I2.
inline GateRecord analyze_gate(const GateMatrix& g) {
  GateRecord r;
  r.coords = entanglement_coords(g);
  r.feasible = check_feasible(r.coords);
  r.dual_unitary = std::abs(r.coords.i1) < 1e-9;
  if (r.dual_unitary) r.alpha = 1.0 - r.coords.i2;
  return r;
}

inline void write_gate_csv_header(std::ostream& os) {
  os << "i1,i2,feasible,alpha\n";
}

inline void write_gate_csv_row(std::ostream& os, const GateRecord& r) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.15g,%.15g,%s,", r.coords.i1, r.coords.i2,
                r.feasible ? "true" : "false");
  os << buf;
  if (r.dual_unitary) {
    std::snprintf(buf, sizeof(buf), "%.15g", r.alpha);
    os << buf;
  }
  os << '\n';
}

}  // namespace pwdyn
