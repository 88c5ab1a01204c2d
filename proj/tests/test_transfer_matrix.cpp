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
#include <sstream>

#include "pwdyn/dense_engine.hpp"
#include "pwdyn/transfer_matrix.hpp"

namespace pwdyn {
namespace {

TEST(TransferMatrix, CliffordMatchesGeneralFormAtOneFifth) {
  EXPECT_LT(clifford_tm().max_abs_diff(general_tm({0.2, 0.2})), 1e-15);
  EXPECT_DOUBLE_EQ(clifford_tm()(p11, p01), 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(clifford_tm()(p01, p10), 1.0 / 5.0);
}

TEST(TransferMatrix, DualUnitaryMatchesGeneralForm) {
  for (int i = 0; i <= 10; ++i) {
    const double a = 2.0 / 3.0 * i / 10.0;
    EXPECT_LT(dual_unitary_tm(a).max_abs_diff(general_tm({0.0, 1.0 - a})), 1e-15);
  }
}

TEST(TransferMatrix, IdentityCoordsGiveIdentityOnWeightOneBlock) {
  const auto t = general_tm({1.0, 0.0});
  EXPECT_EQ(t(p01, p01), 1.0);
  EXPECT_EQ(t(p10, p10), 1.0);
  EXPECT_EQ(t(p01, p10), 0.0);
  EXPECT_EQ(t(p11, p11), 1.0);
}

TEST(TransferMatrix, DualUnitaryEntries) {
  const auto t0 = dual_unitary_tm(0.0);
  EXPECT_EQ(t0(p01, p10), 1.0);
  EXPECT_EQ(t0(p10, p01), 1.0);
  EXPECT_EQ(t0(p11, p11), 1.0);
  const auto t = dual_unitary_tm(2.0 / 3.0);
  EXPECT_NEAR(t(p01, p11), 2.0 / 9.0, 1e-15);
  EXPECT_NEAR(t(p11, p11), 5.0 / 9.0, 1e-15);
}

TEST(TransferMatrix, RejectsAlphaOutsideRange) {
  EXPECT_THROW(dual_unitary_tm(-0.01), std::invalid_argument);
  EXPECT_THROW(dual_unitary_tm(0.7), std::invalid_argument);
}

TEST(TransferMatrix, RejectsNegativeEntries) {
  EXPECT_THROW(general_tm({0.8, 0.8}, false), std::invalid_argument);
  EXPECT_THROW(general_tm({-0.1, 0.5}, false), std::invalid_argument);
}

TEST(TransferMatrix, InfeasibleButNonNegativeIsAccepted) {
  EXPECT_NO_THROW(general_tm({0.0, 0.2}, false));
}

TEST(TransferMatrix, ValidateCatchesBrokenColumns) {
  std::array<double, 16> e{1, 0, 0, 0, 0, 0.5, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
  EXPECT_THROW(TransferMatrix{e}, InvariantViolation);
  std::array<double, 16> vac{1, 0.1, 0, 0, 0, 0.9, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
  EXPECT_THROW(TransferMatrix{vac}, InvariantViolation);
}

TEST(TransferMatrix, SymmetryConstraintsHoldOnRandomFeasibleCoords) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int tested = 0;
  while (tested < 200) {
    EntanglementCoords c{u(rng), u(rng)};
    if (!check_feasible(c)) continue;
    ++tested;
    const auto t = general_tm(c);
    EXPECT_EQ(t(p01, p10), t(p10, p01));
    EXPECT_EQ(t(p11, p01), t(p11, p10));
    EXPECT_NO_THROW(t.validate());
  }
}

TEST(TransferMatrix, GeneralFormIsAffine) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    EntanglementCoords a{0.3 * u(rng), 0.3 * u(rng) + 0.3};
    EntanglementCoords b{0.3 * u(rng) + 0.3, 0.3 * u(rng)};
    const double lam = u(rng);
    const auto mix = general_tm({lam * a.i1 + (1 - lam) * b.i1,
                                 lam * a.i2 + (1 - lam) * b.i2},
                                false);
    const auto ta = general_tm(a, false), tb = general_tm(b, false);
    for (int o = 0; o < 4; ++o)
      for (int in = 0; in < 4; ++in)
        EXPECT_NEAR(mix(o, in), lam * ta(o, in) + (1 - lam) * tb(o, in), 1e-15);
  }
}

TEST(Feasibility, DomainCorners) {
  EXPECT_TRUE(check_feasible({0.2, 0.2}));
  EXPECT_FALSE(check_feasible({0.0, 0.2}));
  EXPECT_FALSE(check_feasible({0.5, 0.5}));
  EXPECT_TRUE(check_feasible({1.0, 0.0}));
  EXPECT_TRUE(check_feasible({0.0, 1.0}));
  EXPECT_TRUE(check_feasible({0.0, 1.0 / 3.0}));
  EXPECT_FALSE(check_feasible({1.1, 0.0}));
}

TEST(ShadowNorm, TableValues) {
  EXPECT_DOUBLE_EQ(two_qubit_shadow_norm(1, 0.4), 5.0);
  EXPECT_NEAR(two_qubit_shadow_norm(2, 1.0 / 3.0), 81.0 / 17.0, 1e-14);
  EXPECT_EQ(two_qubit_shadow_norm(0, 0.7), 1.0);
  EXPECT_THROW(two_qubit_shadow_norm(3, 0.5), std::invalid_argument);
}

// Independent route: contract the transfer-matrix column with (1, 1/3)
// per site by hand and compare with the dense one-layer pipeline.
TEST(ShadowNorm, DenseOneLayerReproducesClosedForm) {
  for (int i = 0; i < 10; ++i) {
    const double alpha = 2.0 / 3.0 * i / 9.0;
    const double s = 1.0 - alpha;
    BrickwallSpec spec;
    spec.n = 2;
    spec.depth = 1;
    spec.tm = dual_unitary_tm(alpha);
    const auto w1 = pauli_weight(evolve(spec, SupportPattern::from_sites(2, {2})));
    const auto w2 = pauli_weight(evolve(spec, SupportPattern::full(2)));
    EXPECT_NEAR(1.0 / w1, two_qubit_shadow_norm(1, s), 1e-12);
    EXPECT_NEAR(1.0 / w2, two_qubit_shadow_norm(2, s), 1e-12);
    EXPECT_NEAR(w1, (1 + 2 * s) / 9.0, 1e-12);
    EXPECT_NEAR(w2, (7 - 4 * s) / 27.0, 1e-12);
  }
}

TEST(TransferMatrix, CsvHasHeaderAndSixteenRows) {
  std::ostringstream os;
  clifford_tm().write_csv(os);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("out,in,value\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 17);
  EXPECT_NE(s.find("11,01,0.59999999999999998"), std::string::npos);
}

}  // namespace
}  // namespace pwdyn
