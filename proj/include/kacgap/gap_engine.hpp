// SPDX-FileCopyrightText: 2026 kacgap contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kacgap/collision_models.hpp"
#include "kacgap/errors.hpp"
#include "kacgap/k_spectra.hpp"
#include "kacgap/quadrature.hpp"

namespace kacgap {

enum class Sector { full, symmetric };

inline const char* sector_name(Sector s) { return s == Sector::full ? "full" : "symmetric"; }

struct GapReport {
  int N = 0;
  double lambda2 = 0.0;
  double delta2 = 0.0;
  double kappa = 0.0;
  double beta = 0.0;
  double mu = 0.0;
  double delta_lower = 0.0;
  std::optional<double> delta_upper;
  std::optional<double> delta_exact;
  std::optional<long long> multiplicity;
  bool sharp = false;
  Sector sector = Sector::full;
  std::vector<std::string> notes;
};

/// @brief Second eigenvalue of P from the extreme K eigenvalues.
inline double mu_from_K(int N, double kappa, double beta) {
  detail::require(N >= 2, "mu_from_K needs N >= 2");
  return std::max((1.0 + (N - 1.0) * kappa) / N, (1.0 + (N - 1.0) * beta) / N);
}

/// @brief Default moment cutoff: exact series degree, or grid/8 for grid densities.
inline int default_k_max(const AngularDensity& rho) {
  return rho.is_series() ? std::max(1, rho.degree()) : rho.grid_resolution() / 8;
}

namespace detail {
inline int checked_k_max(const AngularDensity& rho, int k_max) {
  if (k_max <= 0) k_max = default_k_max(rho);
  if (rho.is_series()) return std::max(k_max, rho.degree() + 1);
  require(k_max <= rho.grid_resolution() / 2, "k_max exceeds the Nyquist limit of the density grid");
  return k_max;
}
}  // namespace detail

/// @brief Largest cosine moment over k >= 1; the N = 2 second eigenvalue.
inline double lambda2_kac(const AngularDensity& rho, int k_max = 0) {
  k_max = detail::checked_k_max(rho, k_max);
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_max; ++k) best = std::max(best, rho.cosine_moment(k));
  return best;
}

inline double gamma_coefficient(const AngularDensity& rho) { return 0.25 * (1.0 - rho.cosine_moment(4)); }

/// @brief Gap upper bound from the quartic eigenfunction.
inline double quartic_gap(const AngularDensity& rho, int N) {
  return 2.0 * gamma_coefficient(rho) * (N + 2.0) / (N - 1.0);
}

/// @brief Eigenvalue of Q on the symmetric quartic f_N.
inline double quartic_eigenvalue(const AngularDensity& rho, int N) {
  return 1.0 - 2.0 * gamma_coefficient(rho) * (N + 2.0) / (N * (N - 1.0));
}

/// @brief True when the k = 4 moment is the largest over the scanned range.
inline bool quartic_condition(const AngularDensity& rho, int k_max = 0) {
  k_max = detail::checked_k_max(rho, k_max);
  const double m4 = rho.cosine_moment(4);
  for (int k = 1; k <= k_max; ++k)
    if (rho.cosine_moment(k) > m4 + 1e-15) return false;
  return true;
}

inline double kac_product_literal(int N) {
  detail::require(N >= 2, "product needs N >= 2");
  double p = 1.0;
  for (int j = 3; j <= N; ++j) p *= (j - 2.0) * (j + 2.0) / ((j - 1.0) * (j + 1.0));
  return p;
}

inline double kac_product_closed_form(int N) {
  detail::require(N >= 3, "closed-form product needs N >= 3");
  return 0.25 * (N + 2.0) / (N - 1.0);
}

inline GapReport kac_gap_exact(const AngularDensity& rho, int N, int k_max = 0) {
  detail::require(N >= 2, "kac_gap_exact needs N >= 2");
  GapReport r;
  r.N = N;
  r.lambda2 = lambda2_kac(rho, k_max);
  r.delta2 = 2.0 * (1.0 - r.lambda2);
  if (N >= 3) {
    r.kappa = kac_alpha(N, 4);
    r.beta = std::abs(kac_alpha(N, 2)) / (N - 1.0);
    r.mu = mu_from_K(N, r.kappa, r.beta);
  }
  r.delta_lower = 0.5 * (1.0 - r.lambda2) * (N + 2.0) / (N - 1.0);
  r.delta_upper = quartic_gap(rho, N);
  r.notes.push_back("lower: telescoped recursion with kappa_j = 3/(j^2-1)");
  r.notes.push_back("upper: Rayleigh quotient of the symmetric quartic");
  if (quartic_condition(rho, k_max)) {
    if (std::abs(r.delta_lower - *r.delta_upper) > 1e-12)
      throw VerificationFailure("quartic condition holds but lower and upper gap bounds differ");
    r.sharp = true;
    r.delta_exact = r.delta_lower;
    r.multiplicity = 1;
    r.notes.push_back("sharp: k = 4 cosine moment is maximal");
  }
  return r;
}

/// @brief 2 min_k integral of (1 - cos k theta) rho over 1 <= k <= k_max.
inline double symmetric_delta2(const AngularDensity& rho, int k_max = 0) {
  k_max = detail::checked_k_max(rho, k_max);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_max; ++k) best = std::min(best, 1.0 - rho.cosine_moment(k));
  return 2.0 * best;
}

/// @brief 2 integral of (sin^n + cos^n - 1) rho.
inline double linearized_kac_eigenvalue(const AngularDensity& rho, int n) {
  detail::require(n >= 1, "linearized eigenvalue needs n >= 1");
  return 2.0 * (rho.trig_moment(0, n) + rho.trig_moment(n, 0) - 1.0);
}

/// @brief Second eigenvalue at success probability p from the one at p_ref.
inline double shuffle_rescale_eigenvalue(double lambda_ref, double p_ref, double p) {
  detail::require(p_ref > 0.0 && p > 0.0, "success probabilities must be positive");
  return (p / p_ref) * lambda_ref + (1.0 - p / p_ref);
}

inline GapReport shuffle_gap_closed_form(int N, double p) {
  detail::require(N >= 2, "shuffle gap needs N >= 2");
  detail::require(p > 0.0 && p <= 1.0, "shuffle success probability must lie in (0,1]");
  GapReport r;
  r.N = N;
  r.lambda2 = 1.0 - 2.0 * p;
  r.delta2 = 4.0 * p;
  if (N >= 3) {
    r.kappa = -1.0 / (N - 1.0);
    r.beta = 1.0 / ((N - 1.0) * (N - 1.0));
    r.mu = mu_from_K(N, r.kappa, r.beta);
  }
  const double d = 2.0 * p * N / (N - 1.0);
  r.delta_lower = d;
  r.delta_upper = d;
  r.delta_exact = d;
  r.multiplicity = static_cast<long long>(N - 1) * (N - 1);
  r.sharp = true;
  r.notes.push_back("exact: eigenfunction h(pi_1) - h(pi_2) with sum h = 0");
  return r;
}

/// @brief Lower bounds from the one-step recursion Delta_N >= (1 - max(kappa_N, beta_N)) Delta_{N-1}.
///
/// Kac, SO(N) and shuffle start at N = 2; Boltzmann starts at N = 3 with delta_base the N = 3 gap.
inline std::vector<GapReport> gap_recursion_lower(const ModelSpec& model, int N_max, double delta_base, int n_max = 8) {
  detail::require(delta_base > 0.0, "base gap must be positive");
  const bool boltz = std::holds_alternative<Boltzmann3D>(model);
  const int base = boltz ? 3 : 2;
  detail::require(N_max >= base, "N_max below the recursion base");
  std::vector<GapReport> out;
  GapReport first;
  first.N = base;
  first.delta2 = delta_base;
  first.delta_lower = delta_base;
  first.notes.push_back(boltz ? "base gap at N = 3 (supplied)" : "base gap at N = 2");
  out.push_back(first);
  double lower = delta_base;
  for (int j = base + 1; j <= N_max; ++j) {
    GapReport r;
    r.N = j;
    r.delta2 = delta_base;
    if (const auto* k = std::get_if<KacSphere>(&model)) {
      r.kappa = kac_alpha(j, 4);
      r.beta = std::abs(kac_alpha(j, 2)) / (j - 1.0);
      r.delta_upper = quartic_gap(k->rho, j);
    } else if (const auto* s = std::get_if<SpecialOrthogonal>(&model)) {
      r.kappa = kac_alpha(j, 4);
      r.beta = std::abs(kac_alpha(j, 2)) / (j - 1.0);
      r.delta_upper = quartic_gap(s->rho, j);
    } else if (const auto* sh = std::get_if<Shuffle>(&model)) {
      r.kappa = -1.0 / (j - 1.0);
      r.beta = 1.0 / ((j - 1.0) * (j - 1.0));
      r.delta_upper = 2.0 * sh->p * j / (j - 1.0);
    } else {
      const auto e = boltzmann_extremes(j, n_max);
      r.kappa = e.kappa;
      r.beta = e.beta;
      r.notes.push_back("kappa attained at (n,l) = (" + std::to_string(e.kappa_n) + "," + std::to_string(e.kappa_l) +
                        ")");
    }
    r.mu = mu_from_K(j, r.kappa, r.beta);
    const double factor = 1.0 - std::max(r.kappa, r.beta);
    if (!(factor > 0.0)) throw std::domain_error("recursion factor is not positive at N = " + std::to_string(j));
    lower *= factor;
    r.delta_lower = lower;
    out.push_back(r);
  }
  if (const auto* k = std::get_if<KacSphere>(&model)) {
    out.front().lambda2 = lambda2_kac(k->rho);
    out.front().delta_upper = quartic_gap(k->rho, 2);
  }
  return out;
}

/// @brief alpha_8 of the Kac K operator, positive for every N >= 2.
inline double alpha8(int N) { return 105.0 / ((N + 5.0) * (N + 3.0) * (N + 1.0) * (N - 1.0)); }

inline double alpha8_product_literal(int N) {
  double p = 1.0;
  for (int j = 3; j <= N; ++j) p *= 1.0 - alpha8(j);
  return p;
}

/// @brief Closed form of the alpha_8 product via Gamma functions at complex argument.
inline double alpha8_product_closed_form(int N) {
  detail::require(N >= 2, "alpha_8 product needs N >= 2");
  const double r6 = std::sqrt(6.0);
  const std::complex<double> zN(N + 3.0, r6), z5(5.0, r6);
  const double logv = std::log(90.0) + std::lgamma(N - 1.0) + std::lgamma(N + 7.0) + 2.0 * lgamma_complex(zN).real() -
                      std::lgamma(static_cast<double>(N)) - 2.0 * lgamma_complex(z5).real() - std::lgamma(N + 6.0) -
                      std::lgamma(N + 4.0) - std::lgamma(N + 2.0);
  return std::exp(logv);
}

/// @brief Limit of the alpha_8 product as N grows.
inline double alpha8_product_limit() {
  const double a = std::sqrt(6.0) * kPi;
  return 3.0 / 770.0 * std::sinh(a) / a;
}

struct Theorem71Result {
  double gamma_2_cap = 0.0;
  double delta2_sym = 0.0;
  bool holds = false;
  double L = 0.0;
  double product_literal = 0.0;
  double product_closed = 0.0;
  bool product_match = false;
  int product_check_N = 50;
  std::optional<int> activation_N;
};

/// @brief Symmetric-sector criterion for the quartic to be the gap eigenfunction at large N.
inline Theorem71Result theorem71_check(const AngularDensity& rho, int check_N = 50, int scan_N = 1000) {
  Theorem71Result t;
  t.gamma_2_cap = 8.0 * gamma_coefficient(rho);
  t.delta2_sym = symmetric_delta2(rho);
  t.holds = t.delta2_sym > 0.45 * t.gamma_2_cap;
  t.L = alpha8_product_limit();
  t.product_check_N = check_N;
  t.product_literal = alpha8_product_literal(check_N);
  t.product_closed = alpha8_product_closed_form(check_N);
  t.product_match = std::abs(t.product_literal - t.product_closed) <= 1e-10;
  double prod = 1.0;
  for (int N = 3; N <= scan_N; ++N) {
    prod *= 1.0 - alpha8(N);
    if (prod * t.delta2_sym > quartic_gap(rho, N)) {
      t.activation_N = N;
      break;
    }
  }
  return t;
}

}  // namespace kacgap
