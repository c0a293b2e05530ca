// SPDX-FileCopyrightText: 2026 kacgap contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kacgap/collision_models.hpp"
#include "kacgap/errors.hpp"
#include "kacgap/gap_engine.hpp"
#include "kacgap/k_spectra.hpp"
#include "kacgap/quadrature.hpp"

namespace kacgap {

/// Exponent vector of length N.
using Monomial = std::vector<int>;
/// Polynomial on R^N as monomial -> coefficient.
using Poly = std::map<Monomial, double>;

namespace detail {
inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline double double_factorial_odd(int e) {
  double r = 1.0;
  for (int k = e - 1; k > 1; k -= 2) r *= k;
  return r;
}

inline void add_term(Poly& p, const Monomial& m, double c) {
  if (c == 0.0) return;
  p[m] += c;
}
}  // namespace detail

/// @brief Integral of prod v_i^{e_i} against the uniform probability measure on S^{N-1}.
inline double sphere_moment(int N, const Monomial& e) {
  detail::require(N >= 1, "sphere_moment needs N >= 1");
  detail::require(static_cast<int>(e.size()) <= N, "sphere_moment: more exponents than coordinates");
  int total = 0;
  double num = 1.0;
  for (int x : e) {
    detail::require(x >= 0, "sphere_moment: exponents must be nonnegative");
    if (x % 2) return 0.0;
    total += x;
    num *= detail::double_factorial_odd(x);
  }
  double den = 1.0;
  for (int k = 0; k < total / 2; ++k) den *= N + 2.0 * k;
  return num / den;
}

/// @brief <p, q> in L^2 of the uniform measure on S^{N-1}.
inline double sphere_inner(int N, const Poly& p, const Poly& q) {
  NeumaierSum s;
  Monomial e(N);
  for (const auto& [a, ca] : p)
    for (const auto& [b, cb] : q) {
      for (int i = 0; i < N; ++i) e[i] = a[i] + b[i];
      s.add(ca * cb * sphere_moment(N, e));
    }
  return s.value();
}

/// @brief Rewrites p so the last coordinate appears with exponent 0 or 1, using |v|^2 = 1.
inline Poly reduce_on_sphere(const Poly& p, int N) {
  Poly out;
  std::vector<std::pair<Monomial, double>> work(p.begin(), p.end());
  while (!work.empty()) {
    auto [m, c] = work.back();
    work.pop_back();
    if (m[N - 1] < 2) {
      detail::add_term(out, m, c);
      continue;
    }
    Monomial base = m;
    base[N - 1] -= 2;
    work.emplace_back(base, c);
    for (int i = 0; i < N - 1; ++i) {
      Monomial t = base;
      t[i] += 2;
      work.emplace_back(t, -c);
    }
  }
  for (auto it = out.begin(); it != out.end();) it = (it->second == 0.0) ? out.erase(it) : std::next(it);
  return out;
}

inline double sphere_norm(int N, const Poly& p) {
  const Poly r = reduce_on_sphere(p, N);
  return std::sqrt(std::max(0.0, sphere_inner(N, r, r)));
}

/// @brief Q on polynomials: pair-averaged rotation integrated against rho, expanded exactly.
class QAction {
 public:
  QAction(int N, const AngularDensity& rho) : N_(N), rho_(rho) { detail::require(N >= 2, "Q needs N >= 2"); }

  Poly apply(const Poly& f) {
    Poly out;
    const double pairs = N_ * (N_ - 1.0) / 2.0;
    for (const auto& [m, c] : f) {
      for (int i = 0; i < N_; ++i)
        for (int j = i + 1; j < N_; ++j) {
          const int a = m[i], b = m[j];
          for (int p = 0; p <= a; ++p)
            for (int q = 0; q <= b; ++q) {
              const double t = trig(a - p + q, p + b - q);
              if (t == 0.0) continue;
              Monomial e = m;
              e[i] = a - p + b - q;
              e[j] = p + q;
              const double sign = ((b - q) % 2) ? -1.0 : 1.0;
              detail::add_term(out, e, c / pairs * sign * detail::binom(a, p) * detail::binom(b, q) * t);
            }
        }
    }
    return out;
  }

  double trig(int p, int q) {
    if (q % 2) return 0.0;
    const auto key = std::make_pair(p, q);
    const auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double v = rho_.trig_moment(p, q);
    cache_[key] = v;
    return v;
  }

 private:
  int N_;
  const AngularDensity& rho_;
  std::map<std::pair<int, int>, double> cache_;
};

/// @brief P = (1/N) sum_j E[ . | v_j ] on polynomials.
inline Poly apply_p(const Poly& f, int N) {
  Poly out;
  for (const auto& [m, c] : f) {
    for (int j = 0; j < N; ++j) {
      Monomial rest;
      int s = 0;
      for (int i = 0; i < N; ++i)
        if (i != j) {
          rest.push_back(m[i]);
          s += m[i];
        }
      const double mom = sphere_moment(N - 1, rest);
      if (mom == 0.0) continue;
      for (int t = 0; t <= s / 2; ++t) {
        Monomial e(N, 0);
        e[j] = m[j] + 2 * t;
        const double sign = (t % 2) ? -1.0 : 1.0;
        detail::add_term(out, e, c * mom * sign * detail::binom(s / 2, t) / N);
      }
    }
  }
  return out;
}

struct RestrictedOperator {
  int N = 0;
  std::vector<Poly> basis;
  Eigen::MatrixXd gram;
  Eigen::MatrixXd action;
  /// Descending.
  Eigen::VectorXd eigenvalues;
  /// Columns are eigenvectors as coefficients on the basis.
  Eigen::MatrixXd eigenvectors;
  int pruned = 0;
  double symmetry_defect = 0.0;
  double constant_defect = 0.0;

  /// Largest eigenvalue after removing the one closest to 1.
  double second_eigenvalue() const {
    Eigen::Index k = 0;
    (eigenvalues.array() - 1.0).abs().minCoeff(&k);
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
      if (i != k) best = std::max(best, eigenvalues(i));
    return best;
  }

  Poly eigenfunction(Eigen::Index col) const {
    Poly p;
    for (std::size_t a = 0; a < basis.size(); ++a)
      for (const auto& [m, c] : basis[a]) detail::add_term(p, m, c * eigenvectors(a, col));
    return p;
  }
};

inline constexpr std::size_t kMaxRestrictedBasis = 2000;

/// @brief Monomials of degree <= d with exponent of the last coordinate in {0, 1}.
inline std::vector<Poly> full_sector_basis(int N, int d) {
  std::vector<Poly> out;
  Monomial e(N, 0);
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == N - 1) {
      for (int x = 0; x <= std::min(1, left); ++x) {
        e[i] = x;
        out.push_back(Poly{{e, 1.0}});
        detail::require(out.size() <= kMaxRestrictedBasis, "restricted basis exceeds the size guard");
      }
      e[i] = 0;
      return;
    }
    for (int x = 0; x <= left; ++x) {
      e[i] = x;
      self(self, i + 1, left - x);
    }
    e[i] = 0;
  };
  rec(rec, 0, d);
  return out;
}

/// @brief Monomial symmetric functions m_lambda for partitions with |lambda| <= d and at most N parts.
inline std::vector<Poly> symmetric_sector_basis(int N, int d) {
  std::vector<Poly> out;
  std::vector<int> parts;
  auto emit = [&]() {
    Monomial e(N, 0);
    for (std::size_t k = 0; k < parts.size(); ++k) e[k] = parts[k];
    std::sort(e.begin(), e.end());
    Poly p;
    do {
      p[e] = 1.0;
    } while (std::next_permutation(e.begin(), e.end()));
    out.push_back(std::move(p));
    detail::require(out.size() <= kMaxRestrictedBasis, "restricted basis exceeds the size guard");
  };
  auto rec = [&](auto&& self, int left, int maxpart) -> void {
    emit();
    if (static_cast<int>(parts.size()) == N) return;
    for (int x = std::min(left, maxpart); x >= 1; --x) {
      parts.push_back(x);
      self(self, left - x, x);
      parts.pop_back();
    }
  };
  rec(rec, d, d);
  return out;
}

namespace detail {

template <class Op>
RestrictedOperator build_restricted(int N, std::vector<Poly> basis, Op&& op) {
  RestrictedOperator r;
  r.N = N;
  const auto n = static_cast<Eigen::Index>(basis.size());
  r.gram.resize(n, n);
  r.action.resize(n, n);
  std::vector<Poly> images;
  images.reserve(basis.size());
  for (const auto& b : basis) images.push_back(op(b));
  r.basis = basis;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      if (b >= a) r.gram(a, b) = r.gram(b, a) = sphere_inner(N, basis[a], basis[b]);
      r.action(a, b) = sphere_inner(N, basis[a], images[b]);
    }
  const double scale = std::max(1e-300, r.action.cwiseAbs().maxCoeff());
  r.symmetry_defect = (r.action - r.action.transpose()).cwiseAbs().maxCoeff() / scale;
  const Eigen::MatrixXd sym = 0.5 * (r.action + r.action.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ge(r.gram);
  const double gmax = ge.eigenvalues().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < n; ++k)
    if (ge.eigenvalues()(k) > 1e-11 * gmax) keep.push_back(k);
  r.pruned = static_cast<int>(n - static_cast<Eigen::Index>(keep.size()));
  Eigen::MatrixXd W(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    W.col(c) = ge.eigenvectors().col(keep[c]) / std::sqrt(ge.eigenvalues()(keep[c]));
  const Eigen::MatrixXd C = W.transpose() * sym * W;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (C + C.transpose()));
  const auto m = es.eigenvalues().size();
  r.eigenvalues.resize(m);
  r.eigenvectors.resize(n, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    r.eigenvalues(k) = es.eigenvalues()(m - 1 - k);
    r.eigenvectors.col(k) = W * es.eigenvectors().col(m - 1 - k);
  }

  Poly one{{Monomial(N, 0), 1.0}};
  const Poly img = op(one);
  Poly diff = img;
  diff[Monomial(N, 0)] -= 1.0;
  r.constant_defect = sphere_norm(N, diff);
  return r;
}

}  // namespace detail

/// @brief Q restricted to polynomials of degree <= d in the chosen sector.
inline RestrictedOperator build_restricted_q(int N, const AngularDensity& rho, int d, Sector sector = Sector::full) {
  detail::require(N >= 2, "build_restricted_q needs N >= 2");
  detail::require(d >= 0, "degree must be >= 0");
  auto basis = sector == Sector::full ? full_sector_basis(N, d) : symmetric_sector_basis(N, d);
  QAction q(N, rho);
  return detail::build_restricted(N, std::move(basis), [&](const Poly& p) { return q.apply(p); });
}

/// @brief P restricted to polynomials of degree <= d.
inline RestrictedOperator build_restricted_p(int N, int d, Sector sector = Sector::full) {
  detail::require(N >= 2, "build_restricted_p needs N >= 2");
  detail::require(d >= 0, "degree must be >= 0");
  auto basis = sector == Sector::full ? full_sector_basis(N, d) : symmetric_sector_basis(N, d);
  return detail::build_restricted(N, std::move(basis), [&](const Poly& p) { return apply_p(p, N); });
}

/// @brief f_N = sum_j (v_j^4 - 3/(N(N+2))).
inline Poly quartic_polynomial(int N) {
  Poly f;
  for (int j = 0; j < N; ++j) {
    Monomial e(N, 0);
    e[j] = 4;
    f[e] = 1.0;
  }
  f[Monomial(N, 0)] = -3.0 / (N + 2.0);
  return f;
}

struct QuarticResidual {
  double residual = 0.0;
  double eigenvalue = 0.0;
  double norm = 0.0;
};

/// @brief || Q f_N - (1 - 2 gamma (N+2)/(N(N-1))) f_N || on the sphere.
inline QuarticResidual quartic_residual(int N, const AngularDensity& rho) {
  detail::require(N >= 2, "quartic_residual needs N >= 2");
  QuarticResidual out;
  out.eigenvalue = quartic_eigenvalue(rho, N);
  const Poly f = quartic_polynomial(N);
  QAction q(N, rho);
  Poly r = q.apply(f);
  for (const auto& [m, c] : f) r[m] -= out.eigenvalue * c;
  out.residual = sphere_norm(N, r);
  out.norm = sphere_norm(N, f);
  return out;
}

struct ShuffleSpectrum {
  std::vector<double> eigenvalues;
  double lambda2 = 0.0;
  double gap = 0.0;
  long long multiplicity = 0;
  SpectrumTable table;
};

/// @brief Dense Q on all N! permutations.
inline ShuffleSpectrum shuffle_q_bruteforce(int N, double p) {
  detail::require(N >= 2, "shuffle brute force needs N >= 2");
  detail::require(N <= 7, "shuffle brute force supports N <= 7");
  detail::require(p > 0.0 && p <= 1.0, "shuffle success probability must lie in (0,1]");
  std::vector<std::vector<int>> perms;
  std::vector<int> s(N);
  std::iota(s.begin(), s.end(), 0);
  do perms.push_back(s);
  while (std::next_permutation(s.begin(), s.end()));
  std::map<std::vector<int>, Eigen::Index> index;
  for (std::size_t k = 0; k < perms.size(); ++k) index[perms[k]] = static_cast<Eigen::Index>(k);
  const auto M = static_cast<Eigen::Index>(perms.size());
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(M, M);
  const double w = 1.0 / (N * (N - 1.0) / 2.0);
  for (Eigen::Index a = 0; a < M; ++a) {
    Q(a, a) += 1.0 - p;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) {
        const Perm t = shuffle_step(Perm{perms[a]}, i, j, true);
        Q(a, index.at(t.sigma)) += p * w;
      }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, Eigen::EigenvaluesOnly);
  ShuffleSpectrum out;
  for (Eigen::Index k = M - 1; k >= 0; --k) out.eigenvalues.push_back(es.eigenvalues()(k));
  out.lambda2 = M > 1 ? out.eigenvalues[1] : 1.0;
  out.gap = N * (1.0 - out.lambda2);
  for (double v : out.eigenvalues)
    if (std::abs(v - out.lambda2) <= 1e-8) ++out.multiplicity;
  out.table.model = "shuffle";
  out.table.N = N;
  for (std::size_t k = 0; k < out.eigenvalues.size();) {
    std::size_t e = k;
    while (e < out.eigenvalues.size() && std::abs(out.eigenvalues[e] - out.eigenvalues[k]) <= 1e-8) ++e;
    out.table.entries.push_back({static_cast<int>(out.table.entries.size()), 0, out.eigenvalues[k],
                                 static_cast<long long>(e - k)});
    k = e;
  }
  return out;
}

struct KQuadrature {
  std::vector<double> eigenvalues;
  double symmetry_defect = 0.0;
  double constant_defect = 0.0;
  double odd_defect = 0.0;
  SpectrumTable table;
};

namespace detail {
/// Barycentric weights scaled to avoid overflow.
inline std::vector<double> barycentric_weights(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> logw(n, 0.0), sign(n, 1.0), w(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      if (k != j) {
        const double d = x[j] - x[k];
        logw[j] -= std::log(std::abs(d));
        if (d < 0) sign[j] = -sign[j];
      }
  const double m = *std::max_element(logw.begin(), logw.end());
  for (std::size_t j = 0; j < n; ++j) w[j] = sign[j] * std::exp(logw[j] - m);
  return w;
}

inline void lagrange_row(const std::vector<double>& x, const std::vector<double>& w, double z, std::vector<double>& out) {
  const std::size_t n = x.size();
  out.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    if (z == x[j]) {
      out[j] = 1.0;
      return;
    }
  double den = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = w[j] / (z - x[j]);
    den += out[j];
  }
  for (double& v : out) v /= den;
}
}  // namespace detail

/// @brief Nystrom discretization of the Kac K operator on L^2(nu_N) at Gauss-Jacobi nodes.
inline KQuadrature kac_k_quadrature(int N, int grid = 64) {
  detail::require(N >= 4, "kac_k_quadrature needs N >= 4");
  detail::require(grid >= 64, "kac_k_quadrature needs at least 64 nodes");
  const double a = (N - 3.0) / 2.0;
  const auto outer = gauss_jacobi(grid, a, a);
  const auto inner = gauss_jacobi(grid, a - 0.5, a - 0.5);
  const auto bw = detail::barycentric_weights(outer.nodes);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(grid, grid);
  std::vector<double> row;
  for (int i = 0; i < grid; ++i) {
    const double r = std::sqrt(std::max(0.0, 1.0 - outer.nodes[i] * outer.nodes[i]));
    for (int b = 0; b < grid; ++b) {
      detail::lagrange_row(outer.nodes, bw, r * inner.nodes[b], row);
      for (int c = 0; c < grid; ++c) K(i, c) += inner.weights[b] * row[c];
    }
  }
  Eigen::MatrixXd S(grid, grid);
  for (int i = 0; i < grid; ++i)
    for (int c = 0; c < grid; ++c) S(i, c) = std::sqrt(outer.weights[i] / outer.weights[c]) * K(i, c);
  KQuadrature out;
  out.symmetry_defect = (S - S.transpose()).cwiseAbs().maxCoeff();
  Eigen::VectorXd one = Eigen::VectorXd::Ones(grid), odd(grid);
  for (int i = 0; i < grid; ++i) odd(i) = outer.nodes[i] * outer.nodes[i] * outer.nodes[i];
  out.constant_defect = (K * one - one).cwiseAbs().maxCoeff();
  out.odd_defect = (K * odd).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  for (int k = grid - 1; k >= 0; --k) out.eigenvalues.push_back(es.eigenvalues()(k));
  out.table.model = "kac";
  out.table.N = N;
  for (std::size_t k = 0; k < out.eigenvalues.size(); ++k)
    out.table.entries.push_back({static_cast<int>(k), 0, out.eigenvalues[k], 1});
  out.table.scan_bounds["grid"] = grid;
  return out;
}

/// @brief Quadrature eigenvalue closest to target.
inline double nearest_eigenvalue(const std::vector<double>& ev, double target) {
  double best = ev.front();
  for (double v : ev)
    if (std::abs(v - target) < std::abs(best - target)) best = v;
  return best;
}

struct BallQuadratureOptions {
  int radial_nodes = 16;
  int polar_nodes = 16;
  int azimuthal_nodes = 32;
};

struct EigenResidual {
  double residual = 0.0;
  double lambda = 0.0;
  double max_abs_g = 0.0;
  int samples = 0;
};

namespace detail {
/// r^l P_l(z/r) as a polynomial in (z, r^2).
inline double solid_zonal(int l, double z, double r2) {
  double q0 = 1.0, q1 = z;
  if (l == 0) return q0;
  for (int k = 1; k < l; ++k) {
    const double q2 = ((2.0 * k + 1.0) * z * q1 - k * r2 * q0) / (k + 1.0);
    q0 = q1;
    q1 = q2;
  }
  return q1;
}

inline double boltzmann_g(int N, int n, int l, const Vec3& v) {
  const double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  return jacobi_p(n, (3.0 * N - 8.0) / 2.0, l + 0.5, 2.0 * r2 - 1.0) * solid_zonal(l, v[2], r2);
}
}  // namespace detail

/// @brief Applies K by ball quadrature to the (n, l, m = 0) eigenfunction and compares with lambda_{n,l}.
inline EigenResidual boltzmann_eigen_residual(int N, int n, int l, int samples = 16, std::uint64_t seed = 1,
                                              const BallQuadratureOptions& opt = {}) {
  detail::require(N >= 4, "boltzmann_eigen_residual needs N >= 4");
  detail::require(n >= 0 && l >= 0, "indices must be nonnegative");
  detail::require(l < boltzmann_l0(N), "boltzmann_eigen_residual: l must be below (3N-9)/2");
  detail::require(samples >= 1, "need at least one sample point");
  const int deg = 2 * n + l;
  if (opt.radial_nodes < deg / 2 + 1 || 2 * opt.polar_nodes < deg + 1 || opt.azimuthal_nodes < deg + 1 ||
      opt.azimuthal_nodes % 2)
    throw UsageError("boltzmann_eigen_residual: quadrature under-resolved for degree " + std::to_string(deg));
  const auto rad = gauss_jacobi(opt.radial_nodes, (3.0 * N - 11.0) / 2.0, 0.5);
  const auto pol = gauss_legendre(opt.polar_nodes);
  std::vector<Vec3> dirs;
  std::vector<double> dw;
  for (std::size_t i = 0; i < pol.nodes.size(); ++i) {
    const double u = pol.nodes[i], st = std::sqrt(std::max(0.0, 1.0 - u * u));
    for (int k = 0; k < opt.azimuthal_nodes; ++k) {
      const double phi = 2.0 * kPi * k / opt.azimuthal_nodes;
      dirs.push_back({st * std::cos(phi), st * std::sin(phi), u});
      dw.push_back(pol.weights[i] / opt.azimuthal_nodes);
    }
  }
  const double a = std::sqrt(N * N - 2.0 * N) / (N - 1.0);
  EigenResidual out;
  out.lambda = boltzmann_lambda(N, n, l);
  out.samples = samples;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec3 v{nd(gen), nd(gen), nd(gen)};
    const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    const double rad_s = 0.98 * std::cbrt(ud(gen));
    for (double& c : v) c *= rad_s / len;
    const double c1 = a * std::sqrt(std::max(0.0, 1.0 - rad_s * rad_s));
    NeumaierSum kg;
    for (std::size_t i = 0; i < rad.nodes.size(); ++i) {
      const double rr = std::sqrt((1.0 + rad.nodes[i]) / 2.0);
      for (std::size_t k = 0; k < dirs.size(); ++k) {
        Vec3 w;
        for (int c = 0; c < 3; ++c) w[c] = c1 * rr * dirs[k][c] - v[c] / (N - 1.0);
        kg.add(rad.weights[i] * dw[k] * detail::boltzmann_g(N, n, l, w));
      }
    }
    const double g = detail::boltzmann_g(N, n, l, v);
    out.max_abs_g = std::max(out.max_abs_g, std::abs(g));
    worst = std::max(worst, std::abs(kg.value() - out.lambda * g));
  }
  out.residual = out.max_abs_g > 0.0 ? worst / out.max_abs_g : worst;
  return out;
}

struct FourierSpectrum {
  /// Rayleigh quotients of cos(k psi) under the circulant operator, k = 0..k_max.
  std::vector<double> moments;
  /// Largest mismatch between sorted circulant eigenvalues and the sorted moment multiset.
  double multiset_defect = 0.0;
  double lambda2 = 0.0;
  SpectrumTable table;
};

/// @brief N = 2 spectrum: Q acts on the circle by convolution with rho.
inline FourierSpectrum fourier_q2_spectrum(const AngularDensity& rho, int k_max) {
  detail::require(k_max >= 1, "k_max must be >= 1");
  const int deg = rho.is_series() ? rho.degree() : rho.grid_resolution() / 2;
  int G = 2 * std::max(k_max, deg) + 2;
  if (!rho.is_series()) G = rho.grid_resolution();
  detail::require(k_max < G / 2, "k_max exceeds the Nyquist limit of the density grid");
  const double h = 2.0 * kPi / G;
  Eigen::MatrixXd C(G, G);
  for (int a = 0; a < G; ++a)
    for (int b = 0; b < G; ++b) {
      int d = (a - b) % G;
      if (d < 0) d += G;
      C(a, b) = rho.value(d * h) * h;
    }
  FourierSpectrum out;
  Eigen::VectorXd c(G);
  for (int k = 0; k <= k_max; ++k) {
    for (int a = 0; a < G; ++a) c(a) = std::cos(k * a * h);
    out.moments.push_back(c.dot(C * c) / c.squaredNorm());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (C + C.transpose()), Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + G), ms;
  for (int k = 0; k < G; ++k) {
    NeumaierSum s;
    for (int a = 0; a < G; ++a) s.add(rho.value(a * h) * std::cos(k * a * h) * h);
    ms.push_back(s.value());
  }
  std::sort(ms.begin(), ms.end());
  for (int k = 0; k < G; ++k) out.multiset_defect = std::max(out.multiset_defect, std::abs(ms[k] - ev[k]));
  out.lambda2 = *std::max_element(out.moments.begin() + 1, out.moments.end());
  out.table.model = "kac";
  out.table.N = 2;
  for (int k = 0; k <= k_max; ++k) out.table.entries.push_back({k, 0, out.moments[k], k == 0 ? 1 : 2});
  out.table.scan_bounds["k_max"] = k_max;
  out.table.sort_descending();
  return out;
}

/// @brief Integral of v^k against nu_N, the law of one coordinate under the sphere measure, by Gauss-Jacobi.
inline double nu_moment_quadrature(int N, int k) {
  detail::require(N >= 2, "nu_N needs N >= 2");
  const double a = (N - 3.0) / 2.0;
  const auto r = gauss_jacobi(k / 2 + 2, a, a);
  return r.integrate([k](double x) { return std::pow(x, k); });
}

}  // namespace kacgap
