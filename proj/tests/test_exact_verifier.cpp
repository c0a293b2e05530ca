// SPDX-FileCopyrightText: 2026 kacgap contributors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "kacgap/kacgap.hpp"
#include "oracles.hpp"

using namespace kacgap;

TEST(SphereMoments, MatchClosedForm) {
  for (int N = 2; N <= 9; ++N)
    for (int k = 0; k <= 10; k += 2) {
      Monomial e(N, 0);
      e[0] = k;
      EXPECT_NEAR(sphere_moment(N, e), oracle::sphere_even_moment(N, k), 1e-15);
      EXPECT_NEAR(nu_moment_quadrature(N, k), oracle::sphere_even_moment(N, k), 1e-12);
    }
  EXPECT_NEAR(sphere_moment(5, {4, 0, 0, 0, 0}), 3.0 / 35.0, 1e-16);
  // E v1^2 v2^2 on S^2 = 1/15
  EXPECT_NEAR(sphere_moment(3, {2, 2, 0}), 1.0 / 15.0, 1e-16);
  EXPECT_EQ(sphere_moment(4, {1, 2, 0, 0}), 0.0);
}

TEST(SphereMoments, ReductionPreservesInnerProducts) {
  Poly p;
  p[{4, 0, 0}] = 1.0;
  p[{2, 2, 0}] = -0.5;
  p[{0, 0, 2}] = 2.0;
  const Poly r = reduce_on_sphere(p, 3);
  Poly one;
  one[{0, 0, 0}] = 1.0;
  EXPECT_NEAR(sphere_inner(3, r, one), sphere_inner(3, p, one), 1e-15);
  EXPECT_NEAR(sphere_inner(3, r, r), sphere_inner(3, p, p), 1e-14);
  for (const auto& [m, c] : r) EXPECT_LE(m[2], 1);
}

TEST(RestrictedQ, UniformGapIsExact) {
  const auto rho = AngularDensity::uniform();
  for (int N = 3; N <= 6; ++N) {
    const auto q = build_restricted_q(N, rho, 4);
    EXPECT_NEAR(N * (1.0 - q.second_eigenvalue()), oracle::kac_gap_uniform(N), 1e-9);
    EXPECT_LT(q.symmetry_defect, 1e-10);
    EXPECT_LT(q.constant_defect, 1e-12);
  }
}

TEST(RestrictedQ, SecondEigenvectorIsTheQuartic) {
  const auto q = build_restricted_q(4, AngularDensity::uniform(), 4);
  Eigen::Index k = 0;
  const double l2 = q.second_eigenvalue();
  (q.eigenvalues.array() - l2).abs().minCoeff(&k);
  const Poly f = q.eigenfunction(k), g = quartic_polynomial(4);
  ASSERT_EQ(q.basis.size(), static_cast<std::size_t>(q.eigenvectors.rows()));
  EXPECT_GT(sphere_inner(4, f, f), 1e-3);
  const double c = sphere_inner(4, f, g);
  EXPECT_NEAR(c * c, sphere_inner(4, f, f) * sphere_inner(4, g, g), 1e-10);
}

TEST(RestrictedP, SecondEigenvalueFromKExtremes) {
  for (int N = 3; N <= 5; ++N) {
    const auto p = build_restricted_p(N, 4);
    EXPECT_NEAR(p.second_eigenvalue(), (1.0 + (N - 1.0) * oracle::kac_kappa(N)) / N, 1e-10);
    EXPECT_LT(p.symmetry_defect, 1e-10);
  }
  EXPECT_NEAR(build_restricted_p(3, 4).second_eigenvalue(), 7.0 / 12.0, 1e-12);
}

TEST(RestrictedQ, EigenvalueTransferEquality) {
  const auto rho = AngularDensity::uniform();
  double prev = 1.0 - oracle::kac_gap_uniform(2) / 2.0;
  for (int N = 3; N <= 5; ++N) {
    const double lam = build_restricted_q(N, rho, 4).second_eigenvalue();
    const double mu = build_restricted_p(N, 4).second_eigenvalue();
    EXPECT_NEAR(lam, prev + (1.0 - prev) * mu, 1e-10);
    prev = lam;
  }
}

TEST(RestrictedQ, SymmetricSector) {
  const auto rho = AngularDensity::uniform();
  const auto q = build_restricted_q(4, rho, 4, Sector::symmetric);
  EXPECT_NEAR(q.second_eigenvalue(), quartic_eigenvalue(rho, 4), 1e-10);
  EXPECT_LT(q.basis.size(), build_restricted_q(4, rho, 4).basis.size());
}

TEST(QuarticResidual, ThreeDensities) {
  for (const auto& rho : {AngularDensity::uniform(), AngularDensity::from_cosine_moments({{2, 0.5}}),
                          AngularDensity::from_cosine_moments({{4, 0.5}})})
    for (int N = 3; N <= 5; ++N) {
      const auto r = quartic_residual(N, rho);
      EXPECT_LE(r.residual, 1e-10);
      EXPECT_NEAR(r.eigenvalue, 1.0 - 2.0 * gamma_coefficient(rho) * (N + 2.0) / (N * (N - 1.0)), 1e-12);
    }
}

TEST(ShuffleBruteForce, GapAndMultiplicity) {
  for (int N = 2; N <= 6; ++N)
    for (double p : {0.25, 0.5, 1.0}) {
      const auto s = shuffle_q_bruteforce(N, p);
      EXPECT_NEAR(s.gap, oracle::shuffle_gap(N, p), 1e-10) << N << " " << p;
      EXPECT_EQ(s.multiplicity, (N - 1LL) * (N - 1LL));
    }
  EXPECT_THROW(shuffle_q_bruteforce(8, 0.5), UsageError);
}

TEST(KQuadrature, ReproducesAlphaValues) {
  for (int N = 4; N <= 12; ++N) {
    const auto q = kac_k_quadrature(N);
    EXPECT_NEAR(nearest_eigenvalue(q.eigenvalues, oracle::kac_kappa(N)), oracle::kac_kappa(N), 1e-8);
    EXPECT_NEAR(nearest_eigenvalue(q.eigenvalues, oracle::kac_alpha2(N)), oracle::kac_alpha2(N), 1e-8);
    EXPECT_NEAR(nearest_eigenvalue(q.eigenvalues, oracle::kac_alpha6(N)), oracle::kac_alpha6(N), 1e-8);
    EXPECT_NEAR(nearest_eigenvalue(q.eigenvalues, oracle::kac_alpha8(N)), oracle::kac_alpha8(N), 1e-8);
    EXPECT_NEAR(q.eigenvalues.front(), 1.0, 1e-10);
    EXPECT_LT(q.symmetry_defect, 1e-10);
    EXPECT_LT(q.constant_defect, 1e-10);
    EXPECT_LT(q.odd_defect, 1e-10);
  }
}

TEST(BoltzmannResidual, LowModesAtNFive) {
  for (auto [n, l] : std::vector<std::pair<int, int>>{{0, 1}, {1, 0}, {2, 0}, {1, 1}, {3, 0}}) {
    const auto r = boltzmann_eigen_residual(5, n, l, 12, 7);
    EXPECT_LE(r.residual, 1e-6) << n << " " << l;
    EXPECT_NEAR(r.lambda, boltzmann_lambda(5, n, l), 1e-15);
  }
  EXPECT_NEAR(boltzmann_lambda(5, 1, 1), 0.11458333333333333, 1e-15);
  BallQuadratureOptions coarse{2, 2, 4};
  EXPECT_THROW(boltzmann_eigen_residual(5, 3, 0, 4, 1, coarse), UsageError);
}

TEST(FourierSpectrum, MultisetMatchesMoments) {
  const auto rho = AngularDensity::from_cosine_moments({{1, 0.1}, {3, -0.05}, {4, 0.2}});
  const auto f = fourier_q2_spectrum(rho, 6);
  EXPECT_LT(f.multiset_defect, 1e-12);
  EXPECT_NEAR(f.moments[4], 0.2, 1e-14);
  EXPECT_NEAR(f.moments[2], 0.0, 1e-14);
  EXPECT_NEAR(f.lambda2, 0.2, 1e-14);
}
