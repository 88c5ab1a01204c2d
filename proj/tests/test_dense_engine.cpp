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

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "pwdyn/dense_engine.hpp"

namespace pwdyn {
namespace {

BrickwallSpec make_spec(int n, int depth, const TransferMatrix& tm,
                        Boundary b = Boundary::open) {
  BrickwallSpec s;
  s.n = n;
  s.depth = depth;
  s.tm = tm;
  s.boundary = b;
  return s;
}

// Oracle: the full 2^n x 2^n layer matrix, built entry by entry from the
// per-block transfer matrices. Bit order follows the engine (site 0 = MSB).
Eigen::MatrixXd layer_matrix(const BrickwallSpec& spec, int t) {
  const int n = spec.n;
  const int dim = 1 << n;
  const auto pairs = spec.pairs(t);
  std::vector<int> paired(n, 0);
  for (auto [l, r] : pairs) paired[l] = paired[r] = 1;
  auto bit = [n](int idx, int x) { return (idx >> (n - 1 - x)) & 1; };
  Eigen::MatrixXd m(dim, dim);
  for (int out = 0; out < dim; ++out) {
    for (int in = 0; in < dim; ++in) {
      double v = 1.0;
      for (int x = 0; x < n && v != 0.0; ++x)
        if (!paired[x] && bit(out, x) != bit(in, x)) v = 0.0;
      for (auto [l, r] : pairs) {
        if (v == 0.0) break;
        v *= spec.tm((bit(out, l) << 1) | bit(out, r), (bit(in, l) << 1) | bit(in, r));
      }
      m(out, in) = v;
    }
  }
  return m;
}

SupportPattern random_pattern(int n, std::mt19937_64& rng) {
  std::bernoulli_distribution b(0.5);
  std::vector<std::uint8_t> bits(n);
  for (auto& x : bits) x = b(rng);
  return SupportPattern(bits);
}

TEST(DenseInit, BasisStates) {
  const auto s = init_state(SupportPattern::from_sites(4, {2}));
  EXPECT_EQ(s[0b0100], 1.0);
  EXPECT_DOUBLE_EQ(s.mass(), 1.0);
  EXPECT_EQ(init_state(SupportPattern::full(2))[3], 1.0);
  EXPECT_THROW(init_state(SupportPattern::full(27)), std::invalid_argument);
}

TEST(DenseLayer, SingleBlockColumn) {
  const double a = 0.4;
  const auto s = evolve(make_spec(2, 1, dual_unitary_tm(a)),
                        SupportPattern::from_sites(2, {2}));
  EXPECT_EQ(s[0], 0.0);
  EXPECT_EQ(s[1], 0.0);
  EXPECT_DOUBLE_EQ(s[2], 1.0 - a);
  EXPECT_DOUBLE_EQ(s[3], a);
  EXPECT_DOUBLE_EQ(occupation(s, {0}), 1.0);
}

TEST(DenseLayer, UnpairedSiteUnchanged) {
  auto spec = make_spec(3, 1, dual_unitary_tm(0.5));
  WeightState s = init_state(SupportPattern::from_sites(3, {1}));
  s = WeightState(3, s.amplitudes(), 1);
  apply_layer(s, spec, 1);
  EXPECT_EQ(s[0b100], 1.0);
}

TEST(DenseLayer, RejectsTimeMismatch) {
  auto spec = make_spec(4, 2, clifford_tm());
  auto s = init_state(SupportPattern::full(4));
  EXPECT_THROW(apply_layer(s, spec, 1), std::invalid_argument);
}

TEST(DenseEvolve, DepthZeroAndVacuum) {
  const auto p = SupportPattern::from_sites(5, {1, 4});
  const auto s0 = evolve(make_spec(5, 0, clifford_tm()), p);
  EXPECT_EQ(s0[p.to_index()], 1.0);
  const auto v = evolve(make_spec(4, 2, clifford_tm()), SupportPattern::empty(4));
  EXPECT_EQ(v[0], 1.0);
  EXPECT_DOUBLE_EQ(pauli_weight(v), 1.0);
}

TEST(DenseEvolve, CliffordColumn) {
  const auto s = evolve(make_spec(2, 1, clifford_tm()), SupportPattern::full(2));
  EXPECT_DOUBLE_EQ(s[1], 0.2);
  EXPECT_DOUBLE_EQ(s[2], 0.2);
  EXPECT_DOUBLE_EQ(s[3], 0.6);
}

TEST(DenseEvolve, MatchesExplicitMatrixOracle) {
  std::mt19937_64 rng(21);
  for (auto b : {Boundary::open, Boundary::periodic}) {
    for (int n : {4, 5, 6}) {
      if (b == Boundary::periodic && n % 2) continue;
      for (const auto& tm : {clifford_tm(), dual_unitary_tm(0.37),
                             general_tm({0.3, 0.25})}) {
        auto spec = make_spec(n, 5, tm, b);
        const auto p = random_pattern(n, rng);
        Eigen::VectorXd v = Eigen::VectorXd::Zero(1 << n);
        v(p.to_index()) = 1.0;
        for (int t = 0; t < spec.depth; ++t) v = layer_matrix(spec, t) * v;
        const auto s = evolve(spec, p);
        for (int i = 0; i < (1 << n); ++i) EXPECT_NEAR(s[i], v(i), 1e-14);
      }
    }
  }
}

TEST(DenseEvolve, ThreadedLayerIsBitIdentical) {
  auto spec = make_spec(14, 8, dual_unitary_tm(0.5), Boundary::periodic);
  const auto a = evolve(spec, SupportPattern::full(14), {}, 1);
  const auto b = evolve(spec, SupportPattern::full(14), {}, 4);
  EXPECT_EQ(a.amplitudes(), b.amplitudes());
}

TEST(DenseInvariants, ConservationAcrossDepth) {
  for (auto b : {Boundary::open, Boundary::periodic}) {
    auto spec = make_spec(12, 40, general_tm({0.1, 0.5}), b);
    evolve(spec, SupportPattern::from_sites(12, {3, 4, 9}),
           [](const WeightState& s) { EXPECT_NEAR(s.mass(), 1.0, 1e-10); });
  }
}

TEST(DenseInvariants, LightConeSpikeForRightMover) {
  const int n = 16;
  const int x0 = 4;  // even 0-based site: left leg of its layer-0 block
  ASSERT_TRUE(is_right_mover_site(x0, 0));
  for (double a : {1.0 / 3.0, 0.5, 2.0 / 3.0}) {
    auto spec = make_spec(n, n - 1 - x0, dual_unitary_tm(a));
    evolve(spec, SupportPattern::single(n, x0), [&](const WeightState& s) {
      const int t = s.time();
      const auto rho = occupation_profile(s);
      EXPECT_NEAR(rho[x0 + t], 1.0, 1e-14) << "t=" << t;
      for (int x = x0 + t + 1; x < n; ++x) EXPECT_EQ(rho[x], 0.0);
      for (int x = 0; x < x0 - t; ++x) EXPECT_EQ(rho[x], 0.0);
    });
  }
}

TEST(DenseInvariants, CliffordHasNoSharpFront) {
  const int n = 16, x0 = 6;
  auto spec = make_spec(n, 6, clifford_tm());
  evolve(spec, SupportPattern::single(n, x0), [&](const WeightState& s) {
    if (s.time() == 0) return;
    const auto rho = occupation_profile(s);
    int edge = 0;
    for (int x = 0; x < n; ++x)
      if (rho[x] > 0.0) edge = x;
    EXPECT_LT(rho[edge], 1.0);
  });
}

TEST(DenseInvariants, MarginalMonotonicity) {
  std::mt19937_64 rng(5);
  auto spec = make_spec(10, 6, dual_unitary_tm(0.45), Boundary::periodic);
  const auto s = evolve(spec, random_pattern(10, rng));
  std::uniform_int_distribution<int> site(0, 9);
  for (int i = 0; i < 200; ++i) {
    std::vector<int> a{site(rng), site(rng)};
    std::vector<int> b = a;
    b.push_back(site(rng));
    b.push_back(site(rng));
    EXPECT_LE(occupation(s, b), occupation(s, a) + 1e-15);
  }
  EXPECT_DOUBLE_EQ(occupation(s, {}), s.mass());
}

TEST(DenseInvariants, AlphaZeroIsPermutation) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 5; ++rep) {
    const auto p = random_pattern(9, rng);
    auto spec = make_spec(9, 11, dual_unitary_tm(0.0));
    const auto s = evolve(spec, p);
    int ones = 0;
    for (double a : s.amplitudes()) {
      if (a == 1.0) ++ones;
      else EXPECT_EQ(a, 0.0);
    }
    EXPECT_EQ(ones, 1);
    EXPECT_DOUBLE_EQ(pauli_weight(s), std::pow(3.0, -p.count()));
  }
}

TEST(DenseInvariants, BasisStateMarginals) {
  const auto s = init_state(SupportPattern::from_sites(6, {1, 3, 4}));
  EXPECT_EQ(occupation(s, {0, 2}), 1.0);
  EXPECT_EQ(occupation(s, {0, 1}), 0.0);
  EXPECT_EQ(occupation(s, {}), 1.0);
  EXPECT_THROW(occupation(s, {6}), std::invalid_argument);
}

TEST(DenseObservables, PauliWeight) {
  EXPECT_DOUBLE_EQ(pauli_weight(init_state(SupportPattern::full(5))),
                   std::pow(3.0, -5));
  const double a = 0.3;
  const auto s = evolve(make_spec(2, 1, dual_unitary_tm(a)), SupportPattern::full(2));
  EXPECT_NEAR(pauli_weight(s), (7 - 4 * (1 - a)) / 27.0, 1e-15);
}

TEST(DenseObservables, InclusionExclusionRecoversAmplitudes) {
  std::mt19937_64 rng(13);
  auto spec = make_spec(6, 4, general_tm({0.2, 0.4}), Boundary::periodic);
  const auto s = evolve(spec, random_pattern(6, rng));
  std::bernoulli_distribution b(0.4);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<int> a;
    std::uint64_t idx = 0;
    for (int x = 0; x < 6; ++x) {
      if (b(rng)) {
        a.push_back(x);
        idx |= s.site_mask(x);
      }
    }
    EXPECT_NEAR(weight_from_occupations(s, a), s[idx], 1e-12);
  }
  EXPECT_NEAR(weight_from_occupations(s, {}), s[0], 1e-12);
  EXPECT_NEAR(weight_from_occupations(s, {0, 1, 2, 3, 4, 5}),
              occupation(s, {0, 1, 2, 3, 4, 5}), 0.0);
}

TEST(DenseObservables, MeanFieldProductBound) {
  for (int n = 8; n <= 14; n += 2) {
    for (double a : {1.0 / 3.0, 2.0 / 3.0}) {
      auto spec = make_spec(n, 8, dual_unitary_tm(a), Boundary::periodic);
      evolve(spec, SupportPattern::full(n), [&](const WeightState& s) {
        if (s.time() == 0) return;
        double prod = 1.0;
        for (double r : occupation_profile(s)) prod *= 1.0 - 2.0 * r / 3.0;
        EXPECT_LE(pauli_weight(s), prod * (1 + 1e-12)) << n << " " << s.time();
      });
    }
  }
}

TEST(DenseSpec, Geometry) {
  BrickwallSpec s;
  s.n = 6;
  s.boundary = Boundary::periodic;
  const auto odd = s.pairs(1);
  ASSERT_EQ(odd.size(), 3u);
  EXPECT_EQ(odd.back(), std::make_pair(5, 0));
  s.n = 5;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.n = 1;
  s.boundary = Boundary::open;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace pwdyn
