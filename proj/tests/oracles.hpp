// SPDX-FileCopyrightText: 2026 kacgap contributors
// SPDX-License-Identifier: Apache-2.0
//
// Reference values computed without the library. Numbers marked frozen were
// produced once at high precision (mpmath, 40 digits) and pasted here.
#pragma once

#include <cmath>
#include <numbers>

namespace oracle {

constexpr double pi = std::numbers::pi;

/// C_d^lam(0) / C_d^lam(1) from the Gamma-function values of the Gegenbauer polynomial.
inline double gegenbauer_ratio(int N, int d) {
  if (d % 2 == 1) return 0.0;
  const long double lam = (N - 2) / 2.0L;
  const int k = d / 2;
  const long double at0 = std::lgamma(k + lam) - std::lgamma(lam) - std::lgamma(k + 1.0L);
  const long double at1 = std::lgamma(d + 2.0L * lam) - std::lgamma(d + 1.0L) - std::lgamma(2.0L * lam);
  return static_cast<double>((k % 2 ? -1.0L : 1.0L) * std::exp(at0 - at1));
}

/// Normalized Jacobi value P_n^{(a,b)}(x)/P_n^{(a,b)}(1) as the terminating 2F1(-n, n+a+b+1; a+1; (1-x)/2).
inline double jacobi_ratio_series(int n, double a, double b, double x) {
  const long double z = (1.0L - x) / 2.0L;
  long double term = 1.0L, sum = 1.0L;
  for (int k = 0; k < n; ++k) {
    term *= (-n + k) * (n + a + b + 1.0L + k) / ((a + 1.0L + k) * (k + 1.0L)) * z;
    sum += term;
  }
  return static_cast<double>(sum);
}

/// E[v_1^{2k}] for v uniform on the unit sphere in R^N.
inline double sphere_even_moment(int N, int k2) {
  long double r = 1.0L;
  for (int i = 0; i < k2 / 2; ++i) r *= (2.0L * i + 1.0L) / (N + 2.0L * i);
  return static_cast<double>(r);
}

/// E|x|^k, k even, for x in the unit ball of R^3 with density proportional to (1-|x|^2)^{(3N-8)/2}.
inline double ball_even_moment(int N, int k) {
  const long double a = (3.0L * N - 8.0L) / 2.0L;
  long double r = 1.0L;
  for (int i = 0; i < k / 2; ++i) r *= (1.5L + i) / (2.5L + a + i);
  return static_cast<double>(r);
}

inline double kac_gap_uniform(int N) { return 0.5 * (N + 2.0) / (N - 1.0); }
inline double kac_kappa(int N) { return 3.0 / (N * N - 1.0); }
inline double kac_alpha2(int N) { return -1.0 / (N - 1.0); }
inline double kac_alpha6(int N) { return -15.0 / ((N - 1.0) * (N + 1.0) * (N + 3.0)); }
inline double kac_alpha8(int N) { return 105.0 / ((N - 1.0) * (N + 1.0) * (N + 3.0) * (N + 5.0)); }

/// Eigenvalue of K on the (n,l) = (1,1) Boltzmann mode, from a hand moment computation.
inline double boltzmann_l11(int N) { return (5.0 * N / 3.0 - 1.0) / std::pow(N - 1.0, 3); }

inline double shuffle_gap(int N, double p) { return 2.0 * p * N / (N - 1.0); }

// frozen
constexpr double boltzmann_l20_N4 = 23.0 / 243.0;
constexpr double alpha8_limit_L = 0.556417563439111387607614289422;
constexpr double alpha8_product_N50 = 0.556552432540789585537264055035;

}  // namespace oracle
