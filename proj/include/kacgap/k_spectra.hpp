// SPDX-FileCopyrightText: 2026 kacgap contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "kacgap/collision_models.hpp"
#include "kacgap/errors.hpp"
#include "kacgap/quadrature.hpp"

namespace kacgap {

struct SpectrumEntry {
  int n = 0;
  int l = 0;
  double value = 0.0;
  long long multiplicity = 1;
};

struct SpectrumTable {
  std::string model;
  int N = 0;
  std::vector<SpectrumEntry> entries;
  std::map<std::string, double> scan_bounds;

  void sort_descending() {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.value > b.value; });
  }
};

struct JacobiIndex {
  int n = 0;
  double alpha = 0.0;
  double beta = 0.0;

  void validate() const {
    detail::require(n >= 0, "Jacobi degree must be >= 0");
    detail::require(alpha > -1.0 && beta > -1.0, "Jacobi parameters must exceed -1");
  }
};

/// @brief Eigenvalue of the Kac K operator on degree-n polynomials of one coordinate.
inline double kac_alpha(int N, int n) {
  detail::require(N >= 3, "kac_alpha needs N >= 3");
  detail::require(n >= 0, "kac_alpha needs n >= 0");
  if (n % 2 == 1) return 0.0;
  const int k = n / 2;
  // cos^{2k} against sin^{N-3}: each reduction step contributes (2i-1)/(2i+N-3)
  double prod = 1.0;
  for (int i = 1; i <= k; ++i) prod *= (2.0 * i - 1.0) / (N - 3.0 + 2.0 * i);
  return (k % 2 == 0) ? prod : -prod;
}

/// @brief Jacobi polynomial P_n^{(a,b)}(x) in the conventional normalization.
inline double jacobi_p(int n, double a, double b, double x) {
  if (n == 0) return 1.0;
  double p0 = 1.0;
  double p1 = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
  for (int m = 2; m <= n; ++m) {
    const double s = 2.0 * m + a + b;
    const double c1 = 2.0 * m * (m + a + b) * (s - 2.0);
    const double c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
    const double c3 = 2.0 * (m + a - 1.0) * (m + b - 1.0) * s;
    const double p2 = (c2 * p1 - c3 * p0) / c1;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

/// @brief J_n^{(a,b)}(x) / J_n^{(a,b)}(1) by the three-term recurrence.
inline double jacobi_ratio(const JacobiIndex& idx, double x) {
  idx.validate();
  detail::require(std::abs(x) <= 1.0 + 1e-15, "jacobi_ratio: |x| must not exceed 1");
  double at1 = 1.0;
  for (int m = 1; m <= idx.n; ++m) at1 *= (m + idx.alpha) / m;
  return jacobi_p(idx.n, idx.alpha, idx.beta, x) / at1;
}

struct KoornwinderOptions {
  int theta_nodes = 64;
  int r_nodes = 64;
  double imag_tol = 1e-10;
};

namespace detail {

/// Tensor rule for the probability measure m_{a,b}(r, theta) on [0,1] x [0,pi].
struct KoornwinderRule {
  std::vector<double> r, wr, cth, wth;
};

inline KoornwinderRule koornwinder_rule(double a, double b, const KoornwinderOptions& opt) {
  require(a > b, "Koornwinder representation needs alpha > beta");
  KoornwinderRule k;
  // s = r^2 carries weight (1-s)^{a-b-1} s^b
  const auto rs = gauss_jacobi(opt.r_nodes, a - b - 1.0, b);
  for (std::size_t i = 0; i < rs.nodes.size(); ++i) {
    k.r.push_back(std::sqrt((1.0 + rs.nodes[i]) / 2.0));
    k.wr.push_back(rs.weights[i]);
  }
  const auto th = gauss_legendre(opt.theta_nodes, 0.0, kPi);
  NeumaierSum total;
  for (std::size_t i = 0; i < th.nodes.size(); ++i) {
    const double w = th.weights[i] * std::pow(std::sin(th.nodes[i]), 2.0 * b);
    k.cth.push_back(std::cos(th.nodes[i]));
    k.wth.push_back(w);
    total.add(w);
  }
  for (double& w : k.wth) w /= total.value();
  return k;
}

inline std::complex<double> koornwinder_z(double x, double r, double c) {
  return {(1.0 + x - (1.0 - x) * r * r) / 2.0, std::sqrt(std::max(0.0, 1.0 - x * x)) * r * c};
}

inline std::complex<double> ipow(std::complex<double> z, int n) {
  std::complex<double> out = 1.0;
  while (n > 0) {
    if (n & 1) out *= z;
    z *= z;
    n >>= 1;
  }
  return out;
}

}  // namespace detail

struct KoornwinderValue {
  double real = 0.0;
  double imag = 0.0;
};

/// @brief Koornwinder's double-integral representation of the Jacobi ratio, returned as (real, imag).
inline KoornwinderValue koornwinder_integral(const JacobiIndex& idx, double x, const KoornwinderOptions& opt = {}) {
  idx.validate();
  detail::require(std::abs(x) <= 1.0, "koornwinder_ratio: |x| must not exceed 1");
  const auto q = detail::koornwinder_rule(idx.alpha, idx.beta, opt);
  NeumaierSum re, im;
  for (std::size_t i = 0; i < q.r.size(); ++i) {
    for (std::size_t j = 0; j < q.cth.size(); ++j) {
      const auto z = detail::ipow(detail::koornwinder_z(x, q.r[i], q.cth[j]), idx.n);
      const double w = q.wr[i] * q.wth[j];
      re.add(w * z.real());
      im.add(w * z.imag());
    }
  }
  return {re.value(), im.value()};
}

inline double koornwinder_ratio(const JacobiIndex& idx, double x, const KoornwinderOptions& opt = {}) {
  const auto v = koornwinder_integral(idx, x, opt);
  if (std::abs(v.imag) > opt.imag_tol)
    throw VerificationFailure("koornwinder_ratio: imaginary part " + std::to_string(v.imag) + " is not negligible");
  return v.real;
}

/// @brief Point at which the radial Jacobi polynomial is evaluated for the Boltzmann K eigenvalues.
inline double boltzmann_eval_point(int N) { return -1.0 + 2.0 / ((N - 1.0) * (N - 1.0)); }

inline double boltzmann_l0(int N) { return (3.0 * N - 9.0) / 2.0; }

inline JacobiIndex boltzmann_index(int N, int n, int l) { return {n, (3.0 * N - 8.0) / 2.0, l + 0.5}; }

/// @brief Closed forms for n in {0, 1, 2}.
inline double boltzmann_lambda_closed_form(int N, int n, int l) {
  detail::require(n >= 0 && n <= 2, "closed form available for n <= 2 only");
  const double eps = 1.0 / ((N - 1.0) * (N - 1.0));
  const double sgn = std::pow(-1.0 / (N - 1.0), l);
  if (n == 0) return sgn;
  if (n == 1) return (eps - (1.0 - eps) * (2.0 * l + 3.0) / (3.0 * N - 6.0)) * sgn;
  return (eps * eps - (4.0 * l + 10.0) / (3.0 * N - 6.0) * eps * (1.0 - eps) +
          (1.0 - eps) * (1.0 - eps) * (2.0 * l + 5.0) * (2.0 * l + 3.0) / ((3.0 * N - 6.0) * (3.0 * N - 4.0))) *
         sgn;
}

struct BoltzmannEigenvalue {
  double value = 0.0;
  bool beyond_jacobi_range = false;
};

/// @brief lambda_{n,l}; for l >= l_0 reports 0 with the range flag set.
inline BoltzmannEigenvalue boltzmann_lambda_flagged(int N, int n, int l) {
  detail::require(N >= 4, "boltzmann_lambda needs N >= 4");
  detail::require(n >= 0 && l >= 0, "boltzmann_lambda needs n, l >= 0");
  if (l >= boltzmann_l0(N)) return {0.0, true};
  const double v = jacobi_ratio(boltzmann_index(N, n, l), boltzmann_eval_point(N)) * std::pow(-1.0 / (N - 1.0), l);
  if (n <= 2) {
    const double c = boltzmann_lambda_closed_form(N, n, l);
    if (std::abs(v - c) > 1e-12)
      throw VerificationFailure("boltzmann_lambda: recurrence and closed form disagree at N=" + std::to_string(N));
  }
  return {v, false};
}

inline double boltzmann_lambda(int N, int n, int l) {
  detail::require(N >= 4, "boltzmann_lambda needs N >= 4");
  detail::require(l < boltzmann_l0(N), "boltzmann_lambda: l must be below (3N-9)/2");
  return boltzmann_lambda_flagged(N, n, l).value;
}

/// @brief Upper bound mu_{n,l} on |lambda_{n,l}|; integrand is the modulus raised to n.
inline double boltzmann_mu_bound(int N, int n, int l, const KoornwinderOptions& opt = {}) {
  detail::require(N >= 4, "boltzmann_mu_bound needs N >= 4");
  detail::require(n >= 0 && l >= 0, "boltzmann_mu_bound needs n, l >= 0");
  detail::require(l < boltzmann_l0(N), "boltzmann_mu_bound: l must be below (3N-9)/2");
  const auto idx = boltzmann_index(N, n, l);
  const double x = boltzmann_eval_point(N);
  const double scale = std::pow(1.0 / (N - 1.0), l);
  if (n == 0) return scale;
  const auto q = detail::koornwinder_rule(idx.alpha, idx.beta, opt);
  NeumaierSum s;
  for (std::size_t i = 0; i < q.r.size(); ++i)
    for (std::size_t j = 0; j < q.cth.size(); ++j)
      s.add(q.wr[i] * q.wth[j] * std::pow(std::abs(detail::koornwinder_z(x, q.r[i], q.cth[j])), n));
  return s.value() * scale;
}

/// @brief The K matrix of the shuffle on positions: uniform over the other N-1 positions.
inline Eigen::MatrixXd shuffle_k_matrix(int N) {
  detail::require(N >= 2, "shuffle needs N >= 2");
  Eigen::MatrixXd k = Eigen::MatrixXd::Constant(N, N, 1.0 / (N - 1.0));
  k.diagonal().setZero();
  return k;
}

inline SpectrumTable shuffle_k_spectrum(int N) {
  detail::require(N >= 2, "shuffle needs N >= 2");
  SpectrumTable t{"shuffle", N, {}, {}};
  t.entries.push_back({0, 0, 1.0, 1});
  t.entries.push_back({1, 0, -1.0 / (N - 1.0), N - 1});
  return t;
}

/// @brief C_d^{lambda}(0) / C_d^{lambda}(1) for the zonal harmonics of S^{N-1}, lambda = (N-2)/2.
inline double son_zonal_ratio(int N, int d) {
  detail::require(N >= 3, "son_zonal_ratio needs N >= 3");
  detail::require(d >= 0, "son_zonal_ratio needs d >= 0");
  const double lam = (N - 2.0) / 2.0;
  auto gegenbauer = [lam](int deg, double x) {
    double c0 = 1.0, c1 = 2.0 * lam * x;
    if (deg == 0) return c0;
    for (int m = 2; m <= deg; ++m) {
      const double c2 = (2.0 * x * (m + lam - 1.0) * c1 - (m + 2.0 * lam - 2.0) * c0) / m;
      c0 = c1;
      c1 = c2;
    }
    return c1;
  };
  return gegenbauer(d, 0.0) / gegenbauer(d, 1.0);
}

/// @brief Dimension of degree-d spherical harmonics on S^{N-1}.
inline long long harmonic_dimension(int N, int d) {
  auto binom = [](long long n, long long k) -> long long {
    if (k < 0 || n < k) return 0;
    long long r = 1;
    for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  return binom(N + d - 1, d) - binom(N + d - 3, d - 2);
}

inline SpectrumTable kac_k_spectrum(int N, int max_degree) {
  SpectrumTable t{"kac", N, {}, {}};
  for (int d = 0; d <= max_degree; ++d) t.entries.push_back({d, 0, kac_alpha(N, d), 1});
  t.scan_bounds["max_degree"] = max_degree;
  t.sort_descending();
  return t;
}

inline SpectrumTable son_k_spectrum(int N, int max_degree) {
  SpectrumTable t{"son", N, {}, {}};
  for (int d = 0; d <= max_degree; ++d) t.entries.push_back({d, 0, son_zonal_ratio(N, d), harmonic_dimension(N, d)});
  t.scan_bounds["max_degree"] = max_degree;
  t.sort_descending();
  return t;
}

inline SpectrumTable boltzmann_k_spectrum(int N, int n_max) {
  detail::require(N >= 4, "Boltzmann spectrum needs N >= 4");
  SpectrumTable t{"boltzmann", N, {}, {}};
  for (int total = 0; total <= n_max; ++total)
    for (int l = 0; l <= total; ++l)
      if (l < boltzmann_l0(N)) t.entries.push_back({total - l, l, boltzmann_lambda(N, total - l, l), 2LL * l + 1});
  t.scan_bounds["n_max"] = n_max;
  t.scan_bounds["l0"] = boltzmann_l0(N);
  t.sort_descending();
  return t;
}

struct KExtremes {
  double kappa = 0.0;
  double beta = 0.0;
  int kappa_n = -1;
  int kappa_l = -1;
  int n_max = 0;
  double tail_bound = 0.0;
  bool tail_dominated = true;
  bool l0_regime_flag = false;
};

/// @brief Boltzmann scan over n + l <= n_max, l < l_0, excluding the constant.
inline KExtremes boltzmann_extremes(int N, int n_max = 8) {
  detail::require(N >= 4, "Boltzmann extremes need N >= 4");
  KExtremes e;
  e.n_max = n_max;
  e.kappa = -2.0;
  double lo = 2.0;
  for (int total = 1; total <= n_max; ++total) {
    for (int l = 0; l <= total && l < boltzmann_l0(N); ++l) {
      const double v = boltzmann_lambda(N, total - l, l);
      if (v > e.kappa) {
        e.kappa = v;
        e.kappa_n = total - l;
        e.kappa_l = l;
      }
      lo = std::min(lo, v);
    }
  }
  e.beta = std::abs(lo) / (N - 1.0);
  double tail = std::pow(1.0 / (N - 1.0), n_max + 1);
  for (int l = 0; l <= n_max && l < boltzmann_l0(N); ++l)
    tail = std::max(tail, boltzmann_mu_bound(N, n_max - l + 1, l));
  e.tail_bound = tail;
  e.tail_dominated = tail < e.kappa;
  e.l0_regime_flag = true;
  return e;
}

/// @brief Smallest N in [lo, hi] from which lambda_{2,0} is the scanned maximum for every larger N in range.
inline std::optional<int> boltzmann_lambda20_dominance_start(int lo, int hi, int n_max = 8) {
  std::optional<int> start;
  for (int N = hi; N >= std::max(lo, 4); --N) {
    const auto e = boltzmann_extremes(N, n_max);
    if (e.kappa_n == 2 && e.kappa_l == 0)
      start = N;
    else
      break;
  }
  return start;
}

inline KExtremes k_extremes(const ModelSpec& m, int n_max = 8) {
  validate_model(m, true);
  const int N = model_size(m);
  detail::require(N >= 3, "k_extremes needs N >= 3");
  KExtremes e;
  if (std::holds_alternative<KacSphere>(m) || std::holds_alternative<SpecialOrthogonal>(m)) {
    e.kappa = -2.0;
    for (int d = 1; d <= 2 * n_max; ++d) {
      const double a = kac_alpha(N, d);
      if (a > e.kappa) {
        e.kappa = a;
        e.kappa_n = d;
        e.kappa_l = 0;
      }
    }
    e.beta = std::abs(kac_alpha(N, 2)) / (N - 1.0);
    e.n_max = 2 * n_max;
    e.tail_bound = std::abs(kac_alpha(N, 2 * n_max + 2));
    e.tail_dominated = e.tail_bound < e.kappa;
    return e;
  }
  if (std::holds_alternative<Shuffle>(m)) {
    e.kappa = -1.0 / (N - 1.0);
    e.beta = 1.0 / ((N - 1.0) * (N - 1.0));
    e.kappa_n = 1;
    e.kappa_l = 0;
    return e;
  }
  return boltzmann_extremes(N, n_max);
}

}  // namespace kacgap
