// SPDX-FileCopyrightText: 2026 kacgap contributors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "kacgap/kacgap.hpp"
#include "oracles.hpp"

using namespace kacgap;

namespace {

std::vector<AngularDensity> sample_densities() {
  return {AngularDensity::uniform(), AngularDensity::from_cosine_moments({{2, 0.5}}),
          AngularDensity::from_cosine_moments({{4, 0.5}}), AngularDensity::from_cosine_moments({{1, 0.3}, {2, 0.2}}),
          AngularDensity::from_cosine_moments({{4, 0.3}, {8, 0.1}})};
}

}  // namespace

TEST(KacGap, UniformDensityIsSharp) {
  for (int N = 3; N <= 50; ++N) {
    const auto r = kac_gap_exact(AngularDensity::uniform(), N);
    ASSERT_TRUE(r.sharp);
    EXPECT_NEAR(*r.delta_exact, oracle::kac_gap_uniform(N), 1e-13);
    EXPECT_NEAR(r.kappa, oracle::kac_kappa(N), 1e-15);
  }
  const auto r3 = kac_gap_exact(AngularDensity::uniform(), 3);
  EXPECT_DOUBLE_EQ(*r3.delta_exact, 1.25);
  EXPECT_NEAR(r3.mu, 7.0 / 12.0, 1e-15);
}

TEST(KacGap, Sandwich) {
  for (const auto& rho : sample_densities())
    for (int N = 3; N <= 30; ++N) {
      const auto r = kac_gap_exact(rho, N);
      ASSERT_TRUE(r.delta_upper.has_value());
      EXPECT_LE(r.delta_lower, *r.delta_upper + 1e-12);
      EXPECT_EQ(r.sharp, quartic_condition(rho));
      EXPECT_EQ(r.sharp, std::abs(r.delta_lower - *r.delta_upper) <= 1e-12);
      if (r.delta_exact) {
        EXPECT_GE(*r.delta_exact, r.delta_lower - 1e-12);
        EXPECT_LE(*r.delta_exact, *r.delta_upper + 1e-12);
      }
    }
}

TEST(KacGap, SharpOnlyWhenQuarticMomentDominates) {
  EXPECT_FALSE(kac_gap_exact(AngularDensity::from_cosine_moments({{2, 0.5}}), 5).sharp);
  EXPECT_TRUE(kac_gap_exact(AngularDensity::from_cosine_moments({{4, 0.5}}), 5).sharp);
  EXPECT_FALSE(kac_gap_exact(AngularDensity::from_cosine_moments({{4, 0.3}, {8, 0.4}}), 5).sharp);
}

TEST(Recursion, KacTelescopesToClosedForm) {
  for (const auto& rho : sample_densities()) {
    const double d2 = 2.0 * (1.0 - lambda2_kac(rho));
    const auto reps = gap_recursion_lower(KacSphere{2, rho}, 200, d2);
    ASSERT_EQ(reps.size(), 199u);
    for (const auto& r : reps)
      if (r.N >= 3)
        EXPECT_NEAR(r.delta_lower, 0.5 * (1.0 - lambda2_kac(rho)) * (r.N + 2.0) / (r.N - 1.0), 1e-12);
  }
  for (int N = 3; N <= 200; ++N) EXPECT_NEAR(kac_product_literal(N), kac_product_closed_form(N), 1e-14);
}

TEST(Recursion, ShuffleTelescopesToClosedForm) {
  for (double p : {0.1, 0.5, 0.9}) {
    const auto reps = gap_recursion_lower(Shuffle{2, p}, 100, 4.0 * p);
    for (const auto& r : reps) EXPECT_NEAR(r.delta_lower, oracle::shuffle_gap(r.N, p), 1e-12);
  }
}

TEST(Recursion, BoltzmannStartsAtThree) {
  const ModelSpec m = Boltzmann3D{3, ScatteringWeight::uniform()};
  const auto reps = gap_recursion_lower(m, 40, 1.0);
  EXPECT_EQ(reps.front().N, 3);
  for (std::size_t k = 1; k < reps.size(); ++k) {
    EXPECT_GT(reps[k].delta_lower, 0.0);
    EXPECT_LT(reps[k].delta_lower, reps[k - 1].delta_lower);
  }
  EXPECT_THROW(gap_recursion_lower(m, 40, 0.0), UsageError);
}

TEST(MuFromK, Formula) {
  EXPECT_NEAR(mu_from_K(3, 0.375, 0.25), 7.0 / 12.0, 1e-15);
  EXPECT_NEAR(mu_from_K(4, 0.1, 0.2), 0.4, 1e-15);
  EXPECT_THROW(mu_from_K(1, 0.1, 0.1), UsageError);
}

TEST(QuarticGap, MatchesQuarticEigenvalueFromOperator) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ud(-0.1, 0.1);
  std::uniform_int_distribution<int> pickN(3, 5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto rho = AngularDensity::from_cosine_moments({{1, ud(rng)}, {2, ud(rng)}, {3, ud(rng)}, {4, ud(rng)}});
    const int N = pickN(rng);
    const auto q = quartic_residual(N, rho);
    EXPECT_NEAR(quartic_gap(rho, N), N * (1.0 - q.eigenvalue), 1e-12);
    EXPECT_NEAR(quartic_eigenvalue(rho, N), q.eigenvalue, 1e-13);
    EXPECT_LT(q.residual, 1e-10);
  }
}

TEST(Alpha8Product, ClosedFormAndLimit) {
  EXPECT_NEAR(alpha8_product_literal(50), oracle::alpha8_product_N50, 1e-14);
  EXPECT_NEAR(alpha8_product_closed_form(50), alpha8_product_literal(50), 1e-10);
  for (int N : {3, 7, 20, 200}) EXPECT_NEAR(alpha8_product_closed_form(N), alpha8_product_literal(N), 1e-11);
  EXPECT_NEAR(alpha8_product_limit(), oracle::alpha8_limit_L, 1e-14);
  EXPECT_NEAR(alpha8_product_literal(20000), oracle::alpha8_limit_L, 1e-6);
  for (int N = 3; N <= 40; ++N) EXPECT_NEAR(alpha8(N), oracle::kac_alpha8(N), 1e-16);
}

TEST(Theorem71, UniformHoldsAndActivates) {
  const auto t = theorem71_check(AngularDensity::uniform());
  EXPECT_TRUE(t.holds);
  EXPECT_TRUE(t.product_match);
  ASSERT_TRUE(t.activation_N.has_value());
  for (int N = *t.activation_N; N <= 400; ++N)
    EXPECT_GT(alpha8_product_literal(N) * t.delta2_sym, quartic_gap(AngularDensity::uniform(), N));
}

TEST(Theorem71, FailsForConcentratedDensity) {
  // 1 - m_1 = 0.4 falls below 0.45 (1 - m_4) = 0.45
  const auto rho = AngularDensity::from_cosine_moments({{1, 0.6}, {2, 0.3}});
  const auto t = theorem71_check(rho);
  EXPECT_EQ(t.holds, t.delta2_sym > 0.45 * t.gamma_2_cap);
  EXPECT_FALSE(t.holds);
}

TEST(Shuffle, ClosedFormAndRescaling) {
  const auto r = shuffle_gap_closed_form(100, 0.5);
  EXPECT_NEAR(*r.delta_exact, 100.0 / 99.0, 1e-14);
  EXPECT_EQ(*r.multiplicity, 99LL * 99LL);
  for (int N = 2; N <= 6; ++N) {
    const double l1 = 1.0 - oracle::shuffle_gap(N, 1.0) / N;
    for (double p : {0.25, 0.5})
      EXPECT_NEAR(shuffle_rescale_eigenvalue(l1, 1.0, p), 1.0 - oracle::shuffle_gap(N, p) / N, 1e-14);
  }
  EXPECT_NEAR(shuffle_rescale_eigenvalue(1.0, 0.3, 0.7), 1.0, 1e-15);
}

TEST(LinearizedKac, UniformValues) {
  const auto rho = AngularDensity::uniform();
  // 2 * (E sin^2 + E cos^2 - 1) = 0 and odd powers give -2
  EXPECT_NEAR(linearized_kac_eigenvalue(rho, 2), 0.0, 1e-14);
  EXPECT_NEAR(linearized_kac_eigenvalue(rho, 3), -2.0, 1e-14);
  EXPECT_NEAR(linearized_kac_eigenvalue(rho, 4), 2.0 * (0.75 - 1.0), 1e-14);
}

TEST(SymmetricDelta2, EqualsFullDelta2) {
  for (const auto& rho : sample_densities())
    EXPECT_NEAR(symmetric_delta2(rho), 2.0 * (1.0 - lambda2_kac(rho)), 1e-15);
}

TEST(KMax, GridDensityCutoff) {
  std::vector<double> v(128, 1.0);
  const auto rho = AngularDensity::from_grid(v);
  EXPECT_EQ(default_k_max(rho), 16);
  EXPECT_THROW(lambda2_kac(rho, 100), UsageError);
  EXPECT_NEAR(lambda2_kac(rho), 0.0, 1e-14);
}
