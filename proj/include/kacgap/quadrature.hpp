// SPDX-FileCopyrightText: 2026 kacgap contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "kacgap/errors.hpp"

namespace kacgap {

inline constexpr double kPi = std::numbers::pi;

/// @brief Nodes and probability-normalized weights (weights sum to one).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0, c = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double term = weights[k] * f(nodes[k]);
      const double t = s + term;
      c += std::abs(s) >= std::abs(term) ? (s - t) + term : (term - t) + s;
      s = t;
    }
    return s + c;
  }
};

/// @brief Gauss-Jacobi rule for (1-x)^a (1+x)^b on [-1,1] by Golub-Welsch.
inline QuadratureRule gauss_jacobi(int n, double a, double b) {
  detail::require(n >= 1, "gauss_jacobi: need at least one node");
  detail::require(a > -1.0 && b > -1.0, "gauss_jacobi: exponents must exceed -1");
  Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 1);
  const double ab = a + b;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    if (k == 0)
      diag(k) = (b - a) / (ab + 2.0);
    else
      diag(k) = (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    double v;
    if (k == 1)
      v = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    else
      v = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    sub(k - 1) = std::sqrt(v);
  }
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = diag(0);
    rule.weights[0] = 1.0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    rule.weights[k] = v0 * v0;
  }
  return rule;
}

/// @brief Gauss-Legendre rule on [lo, hi], weights normalized to one.
inline QuadratureRule gauss_legendre(int n, double lo = -1.0, double hi = 1.0) {
  QuadratureRule r = gauss_jacobi(n, 0.0, 0.0);
  for (auto& x : r.nodes) x = lo + (hi - lo) * (x + 1.0) / 2.0;
  return r;
}

/// @brief Compensated running sum; order of additions fixes the result.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = s_ + x;
    c_ += std::abs(s_) >= std::abs(x) ? (s_ - t) + x : (x - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

/// @brief log Gamma for complex arguments (Lanczos, g = 7).
inline std::complex<double> lgamma_complex(std::complex<double> z) {
  static constexpr double g = 7.0;
  static constexpr double coef[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                     771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                     -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (z.real() < 0.5) {
    // reflection
    return std::log(kPi) - std::log(std::sin(kPi * z)) - lgamma_complex(1.0 - z);
  }
  z -= 1.0;
  std::complex<double> x = coef[0];
  for (int i = 1; i < 9; ++i) x += coef[i] / (z + static_cast<double>(i));
  const std::complex<double> t = z + g + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace kacgap
