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

#include <random>

#include "pwdyn/dense_engine.hpp"
#include "pwdyn/mps_engine.hpp"

namespace pwdyn {
namespace {

BrickwallSpec make_spec(int n, int depth, const TransferMatrix& tm) {
  BrickwallSpec s;
  s.n = n;
  s.depth = depth;
  s.tm = tm;
  return s;
}

TEST(MpsInit, ProductStates) {
  const auto s = mps_init(SupportPattern::full(100));
  EXPECT_EQ(s.max_bond_used(), 1);
  for (const auto& c : s.cores()) {
    EXPECT_EQ(c[0](0, 0), 0.0);
    EXPECT_EQ(c[1](0, 0), 1.0);
  }
  EXPECT_DOUBLE_EQ(mps_occupation(s, 37), 1.0);
  EXPECT_NEAR(mps_log_pauli_weight(s), -100 * std::log(3.0), 1e-10);
  EXPECT_EQ(s.cumulative_trunc_error(), 0.0);
  const auto p = SupportPattern::from_sites(2, {2});
  EXPECT_EQ(mps_to_dense(mps_init(p)).amplitudes(), init_state(p).amplitudes());
  EXPECT_DOUBLE_EQ(mps_pauli_weight(mps_init(SupportPattern::empty(9))), 1.0);
}

TEST(MpsLayer, RejectsPeriodic) {
  auto spec = make_spec(8, 2, clifford_tm());
  spec.boundary = Boundary::periodic;
  auto s = mps_init(SupportPattern::full(8));
  EXPECT_THROW(mps_apply_layer(s, spec, 0), std::invalid_argument);
}

TEST(MpsOracle, MatchesDenseWithoutTruncation) {
  for (int n : {7, 10, 12}) {
    for (const auto& tm : {dual_unitary_tm(0.0), dual_unitary_tm(1.0 / 3.0),
                           dual_unitary_tm(2.0 / 3.0), clifford_tm()}) {
      for (const auto& p : {SupportPattern::full(n), SupportPattern::single(n, n / 2),
                            SupportPattern::contiguous(n, 3, n / 2)}) {
        auto spec = make_spec(n, 12, tm);
        std::vector<WeightState> dense;
        evolve(spec, p, [&](const WeightState& s) { dense.push_back(s); });
        mps_evolve(spec, p, 1 << ((n + 1) / 2), 0.0, [&](const MpsWeightState& m) {
          const auto& d = dense[m.time()];
          EXPECT_NEAR(mps_pauli_weight(m), pauli_weight(d), 1e-10 * pauli_weight(d));
          const auto rm = mps_occupation_profile(m);
          const auto rd = occupation_profile(d);
          for (int x = 0; x < n; ++x) {
            EXPECT_NEAR(rm[x], rd[x], 1e-10);
            EXPECT_NEAR(mps_occupation(m, x), rd[x], 1e-10);
          }
          if (n <= 10) {
            const auto full = mps_to_dense(m);
            for (std::size_t i = 0; i < full.dim(); ++i)
              EXPECT_NEAR(full[i], d[i], 1e-10);
          }
        });
      }
    }
  }
}

TEST(MpsTilted, WeightMatchesDense) {
  for (const auto& tm : {dual_unitary_tm(0.25), dual_unitary_tm(2.0 / 3.0), clifford_tm()}) {
    for (const auto& p : {SupportPattern::full(12), SupportPattern::contiguous(12, 5, 6)}) {
      auto spec = make_spec(12, 12, tm);
      std::vector<double> dense;
      evolve(spec, p, [&](const WeightState& s) { dense.push_back(pauli_weight(s)); });
      mps_evolve_tilted(spec, p, 64, 0.0, [&](const MpsWeightState& m) {
        EXPECT_NEAR(mps_log_pauli_weight(m), std::log(dense[m.time()]), 1e-10);
      });
    }
  }
  const auto t = mps_init_tilted(SupportPattern::full(5));
  EXPECT_THROW(mps_occupation_profile(t), std::invalid_argument);
}

TEST(MpsTilted, FullSupportBetaStaysAboveTwoAtLargeN) {
  // The direct contraction of a mass-normalized train loses this weight in
  // SVD noise near t = 12 for n = 100.
  const int n = 100;
  auto spec = make_spec(n, 20, dual_unitary_tm(2.0 / 3.0));
  double prev = 3.0;
  mps_evolve_tilted(spec, SupportPattern::full(n), 200, 1e-12, [&](const MpsWeightState& m) {
    const double beta = std::exp(-mps_log_pauli_weight(m) / n);
    EXPECT_GE(beta, 2.0);
    EXPECT_LE(beta, prev + 1e-12);
    prev = beta;
  });
}

TEST(MpsOracle, AlphaHalfDepthTenAtTwelveSites) {
  auto spec = make_spec(12, 10, dual_unitary_tm(0.5));
  const auto p = SupportPattern::single(12, 5);
  const auto d = evolve(spec, p);
  const auto m = mps_evolve(spec, p, 256, 0.0);
  const auto rd = occupation_profile(d);
  const auto rm = mps_occupation_profile(m);
  for (int x = 0; x < 12; ++x) EXPECT_NEAR(rm[x], rd[x], 1e-10);
}

TEST(MpsInvariants, AlphaZeroKeepsBondOne) {
  std::mt19937_64 rng(2);
  std::bernoulli_distribution b(0.5);
  std::vector<std::uint8_t> bits(40);
  for (auto& x : bits) x = b(rng);
  auto spec = make_spec(40, 25, dual_unitary_tm(0.0));
  mps_evolve(spec, SupportPattern(bits), 200, 1e-12,
             [](const MpsWeightState& s) { EXPECT_EQ(s.max_bond_used(), 1); });
}

TEST(MpsInvariants, BondCapAndMassRenormalization) {
  auto spec = make_spec(30, 10, clifford_tm());
  mps_evolve(spec, SupportPattern::full(30), 8, 1e-12, [](const MpsWeightState& s) {
    EXPECT_LE(s.max_bond_used(), 8);
    EXPECT_NEAR(mps_mass(s), 1.0, 1e-12);
  });
}

TEST(MpsInvariants, PositiveSampledAmplitudes) {
  auto spec = make_spec(20, 10, dual_unitary_tm(0.5));
  const auto s = mps_evolve(spec, SupportPattern::contiguous(20, 6, 10), 64, 1e-12);
  std::mt19937_64 rng(4);
  std::bernoulli_distribution b(0.6);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<std::uint8_t> bits(20);
    for (auto& x : bits) x = b(rng);
    EXPECT_GE(mps_amplitude(s, SupportPattern(bits)), -1e-9);
  }
}

TEST(MpsInvariants, SmallMassDriftAtLargeN) {
  auto spec = make_spec(100, 30, dual_unitary_tm(2.0 / 3.0));
  mps_evolve(spec, SupportPattern::full(100), 200, 1e-12,
             [](const MpsWeightState& s) { EXPECT_LT(s.last_mass_drift(), 1e-8); });
}

TEST(MpsInvariants, ConvergedInBondDimension) {
  auto spec = make_spec(40, 12, dual_unitary_tm(2.0 / 3.0));
  const auto p = SupportPattern::full(40);
  const double a = mps_log_pauli_weight(mps_evolve_tilted(spec, p, 64, 1e-12));
  const double b = mps_log_pauli_weight(mps_evolve_tilted(spec, p, 128, 1e-12));
  // Relative change of the shadow norm.
  EXPECT_LT(std::abs(std::expm1(a - b)), 1e-6);
}

}  // namespace
}  // namespace pwdyn
