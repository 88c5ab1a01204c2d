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

#include <sstream>

#include "pwdyn/dense_engine.hpp"
#include "pwdyn/mc_engine.hpp"

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

TEST(SplitMix, KnownSequence) {
  // Reference outputs of SplitMix64 seeded with 1234567.
  SplitMix64 g(1234567);
  EXPECT_EQ(g(), 6457827717110365317ULL);
  EXPECT_EQ(g(), 3203168211198807973ULL);
  const double u = SplitMix64(9).uniform();
  EXPECT_GE(u, 0.0);
  EXPECT_LT(u, 1.0);
}

TEST(Trajectory, RowZeroIsInitialAndVacuumStaysVacuum) {
  const auto p = SupportPattern::from_sites(10, {3, 4, 8});
  const auto g = sample_trajectory(make_spec(10, 7, clifford_tm()), p, 99);
  for (int x = 0; x < 10; ++x) EXPECT_EQ(g.get(x, 0), p[x]);
  const auto v =
      sample_trajectory(make_spec(10, 7, clifford_tm()), SupportPattern::empty(10), 1);
  for (int t = 0; t <= 7; ++t) EXPECT_EQ(v.row_count(t), 0);
}

TEST(Trajectory, AlphaZeroRightMoverIsStraightLine) {
  const int n = 20, x0 = 2;
  const auto g = sample_trajectory(make_spec(n, n - 1 - x0, dual_unitary_tm(0.0)),
                                   SupportPattern::single(n, x0), 5);
  for (int t = 0; t <= n - 1 - x0; ++t) {
    EXPECT_EQ(g.row_count(t), 1);
    EXPECT_TRUE(g.get(x0 + t, t));
  }
}

TEST(Trajectory, AlphaZeroConservesParticleNumber) {
  auto spec = make_spec(16, 20, dual_unitary_tm(0.0), Boundary::periodic);
  std::vector<std::uint8_t> bits{1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 0};
  const SupportPattern p(bits);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = sample_trajectory(spec, p, seed);
    for (int t = 0; t <= 20; ++t) EXPECT_EQ(g.row_count(t), p.count());
  }
}

TEST(Trajectory, BlockBranchingFrequencies) {
  // Input 01 on one block: output 10 w.p. 1 - a and 11 w.p. a;
  // input 11: outputs 01, 10, 11 w.p. a/3, a/3, 1 - 2a/3.
  const double a = 0.45;
  const int N = 200000;
  auto spec = make_spec(2, 1, dual_unitary_tm(a));
  std::array<int, 4> c01{}, c11{};
  const auto p01 = SupportPattern::from_sites(2, {2});
  const auto pfull = SupportPattern::full(2);
  for (int i = 0; i < N; ++i) {
    const auto g = sample_trajectory(spec, p01, 7, i);
    ++c01[(g.get(0, 1) << 1) | g.get(1, 1)];
    const auto h = sample_trajectory(spec, pfull, 8, i);
    ++c11[(h.get(0, 1) << 1) | h.get(1, 1)];
  }
  auto within = [&](int count, double p) {
    const double sd = std::sqrt(p * (1 - p) / N);
    return std::abs(double(count) / N - p) < 4 * sd + 1e-12;
  };
  EXPECT_EQ(c01[0] + c01[1], 0);
  EXPECT_TRUE(within(c01[2], 1 - a));
  EXPECT_TRUE(within(c01[3], a));
  EXPECT_EQ(c11[0], 0);
  EXPECT_TRUE(within(c11[1], a / 3));
  EXPECT_TRUE(within(c11[2], a / 3));
  EXPECT_TRUE(within(c11[3], 1 - 2 * a / 3));
}

TEST(Trajectory, DumpFormat) {
  const auto g = sample_trajectory(make_spec(4, 1, dual_unitary_tm(0.0)),
                                   SupportPattern::from_sites(4, {1}), 3);
  std::ostringstream os;
  g.write_dump(os);
  // Site 1 (0-based 0) at t=0 is a right-mover and moves to site 2 where, at
  // t=1, it is again on a left leg.
  EXPECT_EQ(os.str(), "t,x,kind\n0,1,R\n1,2,R\n");
}

TEST(MoverLabel, ParityConvention) {
  EXPECT_EQ(mover_label(true, 0, 0), MoverKind::right);
  EXPECT_EQ(mover_label(true, 1, 0), MoverKind::left);
  EXPECT_EQ(mover_label(true, 1, 1), MoverKind::right);
  EXPECT_EQ(mover_label(false, 1, 1), MoverKind::empty);
}

TEST(McEstimators, DepthZeroAndAlphaZeroAreExact) {
  const auto p = SupportPattern::contiguous(12, 4, 6);
  const auto e0 = estimate_pauli_weight(make_spec(12, 0, clifford_tm()), p, 100, 1);
  EXPECT_DOUBLE_EQ(e0.mean, std::pow(3.0, -4));
  EXPECT_EQ(e0.stderr_, 0.0);
  const auto ea = estimate_pauli_weight(make_spec(12, 9, dual_unitary_tm(0.0)), p, 500, 2);
  EXPECT_DOUBLE_EQ(ea.mean, std::pow(3.0, -4));
  EXPECT_EQ(ea.stderr_, 0.0);
  const auto vac = estimate_occupation(make_spec(8, 5, clifford_tm()),
                                       SupportPattern::empty(8), 100, 3);
  for (double r : vac.rho) EXPECT_EQ(r, 0.0);
}

TEST(McEstimators, SeedDeterminismIndependentOfThreads) {
  auto spec = make_spec(14, 8, dual_unitary_tm(0.5));
  const auto p = SupportPattern::single(14, 6);
  const auto a = estimate_occupation(spec, p, 5000, 42, 1);
  const auto b = estimate_occupation(spec, p, 5000, 42, 3);
  EXPECT_EQ(a.rho, b.rho);
  EXPECT_EQ(a.stderr_, b.stderr_);
  const auto wa = estimate_pauli_weight(spec, p, 5000, 42, 1);
  const auto wb = estimate_pauli_weight(spec, p, 5000, 42, 4);
  EXPECT_EQ(wa.mean, wb.mean);
  const auto c = estimate_occupation(spec, p, 5000, 43, 1);
  EXPECT_NE(a.rho, c.rho);
}

TEST(McEstimators, AgreeWithDenseWithinThreeSigma) {
  const int n = 12;
  int points = 0, misses = 0;
  for (double a : {1.0 / 3.0, 2.0 / 3.0}) {
    for (int t : {4, 8}) {
      auto spec = make_spec(n, t, dual_unitary_tm(a));
      const auto p = SupportPattern::single(n, 5);
      const auto d = evolve(spec, p);
      const auto rd = occupation_profile(d);
      const auto f = estimate_occupation(spec, p, 20000, 1000 + t);
      for (int x = 0; x < n; ++x) {
        ++points;
        const double se = f.err(x, t);
        const double diff = std::abs(f.at(x, t) - rd[x]);
        if (se == 0.0 ? diff > 1e-12 : diff > 3 * se) ++misses;
      }
      const auto w = estimate_pauli_weight(spec, p, 20000, 2000 + t);
      ++points;
      if (std::abs(w.mean - pauli_weight(d)) > 3 * w.stderr_) ++misses;
    }
  }
  EXPECT_LE(double(misses), 0.01 * points + 1.0) << misses << "/" << points;
}

TEST(McEstimators, RightFrontHasUnitOccupation) {
  const int n = 30, x0 = 4;
  auto spec = make_spec(n, 20, dual_unitary_tm(0.42));
  const auto f = estimate_occupation(spec, SupportPattern::single(n, x0), 2000, 8);
  for (int t = 0; t <= 20; ++t) {
    EXPECT_EQ(f.at(x0 + t, t), 1.0);
    EXPECT_EQ(f.err(x0 + t, t), 0.0);
  }
}

TEST(Covariance, RejectsOpenBoundaryAndPartialSupport) {
  auto spec = make_spec(8, 2, clifford_tm());
  EXPECT_THROW(estimate_covariance(spec, SupportPattern::full(8), 10, 1, 2),
               std::invalid_argument);
  spec.boundary = Boundary::periodic;
  EXPECT_THROW(estimate_covariance(spec, SupportPattern::single(8, 0), 10, 1, 2),
               std::invalid_argument);
}

TEST(Covariance, DepthZeroIsExactlyZero) {
  auto spec = make_spec(12, 0, dual_unitary_tm(0.5), Boundary::periodic);
  const auto c = estimate_covariance(spec, SupportPattern::full(12), 50, 1, 0);
  for (double f : c.f) EXPECT_EQ(f, 0.0);
}

TEST(Covariance, VarianceAndWindow) {
  const int n = 40, t = 3;
  auto spec = make_spec(n, t, dual_unitary_tm(2.0 / 3.0), Boundary::periodic);
  const auto c = estimate_covariance(spec, SupportPattern::full(n), 40000, 77, t);
  EXPECT_NEAR(c.f[0], c.rho * (1 - c.rho), 1e-12);
  int misses = 0, tested = 0;
  for (int j = 2 * t + 1; j <= n / 2; ++j) {
    ++tested;
    if (std::abs(c.f[j]) > 3 * c.stderr_[j]) ++misses;
  }
  EXPECT_LE(misses, 1) << "of " << tested;
}

}  // namespace
}  // namespace pwdyn
