// SPDX-FileCopyrightText: 2026 kacgap contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "kacgap/errors.hpp"
#include "kacgap/quadrature.hpp"

namespace kacgap {

/// @brief Default tolerances; all overridable per call.
struct Tolerances {
  double state = 1e-10;
  double per_call = 1e-13;
  double unit_vector = 1e-12;
  double nonnegativity = 1e-12;
};

/// @brief Even probability density on the circle, either a cosine series or samples on a uniform grid.
///
/// Series form: rho(theta) = 1/(2 pi) + sum_k a_k cos(k theta), k = 1..M.
/// Grid form: values at theta_i = -pi + 2 pi i / G, i = 0..G-1, rescaled to unit mass.
class AngularDensity {
 public:
  enum class Form { series, grid };

  static AngularDensity uniform(int grid = 4096) { return from_cosine_coefficients({}, grid); }

  /// @param a literal coefficients a_1..a_M
  static AngularDensity from_cosine_coefficients(std::vector<double> a, int grid = 4096) {
    AngularDensity d;
    d.form_ = Form::series;
    d.a_ = std::move(a);
    d.grid_ = grid;
    d.finish();
    return d;
  }

  /// @brief Builds a series density from prescribed moments c_k = integral of rho cos(k theta).
  static AngularDensity from_cosine_moments(const std::vector<std::pair<int, double>>& moments, int grid = 4096) {
    int m = 0;
    for (const auto& [k, c] : moments) {
      detail::require(k >= 1, "cosine moment index must be >= 1");
      m = std::max(m, k);
    }
    std::vector<double> a(m, 0.0);
    for (const auto& [k, c] : moments) a[k - 1] += c / kPi;
    return from_cosine_coefficients(std::move(a), grid);
  }

  static AngularDensity from_grid(std::vector<double> values) {
    AngularDensity d;
    d.form_ = Form::grid;
    d.grid_ = static_cast<int>(values.size());
    d.values_ = std::move(values);
    d.finish();
    return d;
  }

  Form form() const { return form_; }
  bool is_series() const { return form_ == Form::series; }
  int grid_resolution() const { return grid_; }
  const std::vector<double>& coefficients() const { return a_; }
  const std::vector<double>& grid_values() const { return values_; }
  /// @brief Highest nonzero cosine degree for series form, grid resolution otherwise.
  int degree() const {
    if (!is_series()) return grid_;
    int m = static_cast<int>(a_.size());
    while (m > 0 && a_[m - 1] == 0.0) --m;
    return m;
  }

  double value(double theta) const {
    if (is_series()) {
      double s = 1.0 / (2.0 * kPi);
      for (std::size_t k = 0; k < a_.size(); ++k) s += a_[k] * std::cos((k + 1.0) * theta);
      return s;
    }
    const double x = (theta + kPi) / (2.0 * kPi) * grid_;
    double fl = std::floor(x);
    const double fr = x - fl;
    long i = static_cast<long>(fl) % grid_;
    if (i < 0) i += grid_;
    const long j = (i + 1) % grid_;
    return (1.0 - fr) * values_[i] + fr * values_[j];
  }

  /// @brief Integral of rho(theta) cos(k theta); exact for the series form and for the periodic
  /// piecewise-linear interpolant of the grid form.
  double cosine_moment(int k) const {
    detail::require(k >= 0, "cosine moment index must be >= 0");
    if (k == 0) return 1.0;
    if (is_series()) return k <= static_cast<int>(a_.size()) ? kPi * a_[k - 1] : 0.0;
    NeumaierSum s;
    const double h = 2.0 * kPi / grid_;
    for (int i = 0; i < grid_; ++i) s.add(values_[i] * std::cos(k * (-kPi + h * i)));
    const double x = 0.5 * k * h;
    const double sinc = std::sin(x) / x;
    return s.value() * h * sinc * sinc;
  }

  /// @brief Integral of cos^p sin^q rho; exact for series form (trapezoid rule above the trig degree).
  double trig_moment(int p, int q) const {
    const int deg = p + q + (is_series() ? degree() : 0);
    const int m = is_series() ? 2 * deg + 8 : grid_;
    const double h = 2.0 * kPi / m;
    NeumaierSum s;
    for (int i = 0; i < m; ++i) {
      const double t = -kPi + h * i;
      s.add(std::pow(std::cos(t), p) * std::pow(std::sin(t), q) * value(t));
    }
    return s.value() * h;
  }

  /// @brief Inverse-CDF sample; u in [0,1] maps to theta in [-pi, pi].
  double sample(double u) const {
    detail::require(u >= 0.0 && u <= 1.0, "sample_angle: u must lie in [0,1]");
    const double x = u * (inverse_.size() - 1);
    std::size_t i = static_cast<std::size_t>(x);
    if (i >= inverse_.size() - 1) return inverse_.back();
    const double fr = x - i;
    return (1.0 - fr) * inverse_[i] + fr * inverse_[i + 1];
  }

  /// @brief Exact CDF on [-pi, pi] for series form, piecewise-linear for grid form.
  double cdf(double theta) const {
    if (is_series()) {
      double f = (theta + kPi) / (2.0 * kPi);
      for (std::size_t k = 0; k < a_.size(); ++k) f += a_[k] * std::sin((k + 1.0) * theta) / (k + 1.0);
      return f;
    }
    const double x = (theta + kPi) / (2.0 * kPi) * grid_;
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, x)), grid_ - 1);
    const double fr = x - i;
    return (1.0 - fr) * cdf_[i] + fr * cdf_[i + 1];
  }

  double min_grid_value() const { return min_value_; }

 private:
  void finish() {
    detail::require(grid_ >= 16, "density grid resolution must be at least 16");
    const double h = 2.0 * kPi / grid_;
    if (form_ == Form::grid) {
      double vmax = 0.0;
      for (double v : values_) vmax = std::max(vmax, std::abs(v));
      detail::require(vmax > 0.0, "density grid is identically zero");
      for (int i = 1; i < grid_; ++i)
        detail::require(std::abs(values_[i] - values_[grid_ - i]) <= 1e-12 * vmax,
                        "density grid is not even in theta");
      NeumaierSum s;
      for (double v : values_) s.add(v);
      const double mass = s.value() * h;
      for (double& v : values_) v /= mass;
    }
    min_value_ = value(-kPi);
    for (int i = 0; i < grid_; ++i) min_value_ = std::min(min_value_, value(-kPi + h * i));
    detail::require(min_value_ >= -Tolerances{}.nonnegativity, "density is negative on the grid");
    detail::require(value(0.0) > 0.0, "density must be positive at theta = 0");

    cdf_.assign(grid_ + 1, 0.0);
    if (is_series()) {
      for (int i = 0; i <= grid_; ++i) cdf_[i] = cdf(-kPi + h * i);
    } else {
      for (int i = 0; i < grid_; ++i)
        cdf_[i + 1] = cdf_[i] + 0.5 * h * (values_[i] + values_[(i + 1) % grid_]);
      for (double& c : cdf_) c /= cdf_.back();
    }
    cdf_.front() = 0.0;
    cdf_.back() = 1.0;

    inverse_.assign(grid_ + 1, 0.0);
    std::size_t seg = 0;
    for (int k = 0; k <= grid_; ++k) {
      const double u = static_cast<double>(k) / grid_;
      while (seg + 1 < static_cast<std::size_t>(grid_) && cdf_[seg + 1] < u) ++seg;
      double lo = -kPi + h * seg, hi = lo + h;
      if (k == grid_) {
        inverse_[k] = kPi;
        continue;
      }
      if (is_series()) {
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          (cdf(mid) < u ? lo : hi) = mid;
        }
        inverse_[k] = 0.5 * (lo + hi);
      } else {
        const double d = cdf_[seg + 1] - cdf_[seg];
        inverse_[k] = d > 0.0 ? lo + h * (u - cdf_[seg]) / d : lo;
      }
    }
  }

  Form form_ = Form::series;
  std::vector<double> a_;
  std::vector<double> values_;
  int grid_ = 4096;
  double min_value_ = 0.0;
  std::vector<double> cdf_;
  std::vector<double> inverse_;
};

inline double density_cosine_moment(const AngularDensity& rho, int k) { return rho.cosine_moment(k); }

inline double sample_angle(const AngularDensity& rho, double u) { return rho.sample(u); }

/// @brief Weight b(x) on [-1,1] for the Boltzmann scattering direction; normalized so 2 pi * int b = 1.
class ScatteringWeight {
 public:
  static ScatteringWeight uniform() { return ScatteringWeight{}; }

  /// @param values b at equally spaced nodes x_i = -1 + 2i/(G-1); rescaled to unit sphere mass.
  static ScatteringWeight from_grid(std::vector<double> values) {
    detail::require(values.size() >= 2, "scattering grid needs at least two nodes");
    ScatteringWeight w;
    w.uniform_ = false;
    for (double v : values) detail::require(v >= 0.0, "scattering weight must be nonnegative");
    const double h = 2.0 / (values.size() - 1);
    NeumaierSum s;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) s.add(0.5 * h * (values[i] + values[i + 1]));
    detail::require(s.value() > 0.0, "scattering weight has zero mass");
    const double scale = 1.0 / (2.0 * kPi * s.value());
    for (double& v : values) v *= scale;
    w.values_ = std::move(values);
    return w;
  }

  bool is_uniform() const { return uniform_; }
  const std::vector<double>& grid_values() const { return values_; }

  double value(double x) const {
    if (uniform_) return 1.0 / (4.0 * kPi);
    x = std::clamp(x, -1.0, 1.0);
    const double pos = (x + 1.0) / 2.0 * (values_.size() - 1);
    std::size_t i = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
    const double fr = pos - i;
    return (1.0 - fr) * values_[i] + fr * values_[i + 1];
  }

  double max_value() const {
    if (uniform_) return 1.0 / (4.0 * kPi);
    return *std::max_element(values_.begin(), values_.end());
  }

  /// @brief 2 pi int_0^pi b(cos t) sin t dt by trapezoid in cos t.
  double sphere_mass() const {
    if (uniform_) return 1.0;
    const double h = 2.0 / (values_.size() - 1);
    NeumaierSum s;
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) s.add(0.5 * h * (values_[i] + values_[i + 1]));
    return 2.0 * kPi * s.value();
  }

 private:
  bool uniform_ = true;
  std::vector<double> values_;
};

struct KacSphere {
  int n;
  AngularDensity rho;
};
struct Boltzmann3D {
  int n;
  ScatteringWeight b;
};
struct Shuffle {
  int n;
  double p;
};
struct SpecialOrthogonal {
  int n;
  AngularDensity rho;
};
using ModelSpec = std::variant<KacSphere, Boltzmann3D, Shuffle, SpecialOrthogonal>;

inline int model_size(const ModelSpec& m) {
  return std::visit([](const auto& s) { return s.n; }, m);
}

inline std::string model_name(const ModelSpec& m) {
  switch (m.index()) {
    case 0: return "kac";
    case 1: return "boltzmann";
    case 2: return "shuffle";
    default: return "son";
  }
}

/// @param allow_p_one accept p = 1 (closed-form gap evaluation only)
inline void validate_model(const ModelSpec& m, bool allow_p_one = false) {
  const int n = model_size(m);
  detail::require(n >= 2, "model needs N >= 2");
  if (std::holds_alternative<Boltzmann3D>(m)) detail::require(n >= 3, "Boltzmann model needs N >= 3");
  if (const auto* s = std::get_if<Shuffle>(&m)) {
    const bool ok = s->p > 0.0 && (s->p < 1.0 || (allow_p_one && s->p == 1.0));
    detail::require(ok, "shuffle success probability must lie in (0,1)");
  }
}

using Vec3 = std::array<double, 3>;

struct SphereVec {
  std::vector<double> v;
};
struct MomentumVec {
  std::vector<Vec3> v;
};
struct Perm {
  std::vector<int> sigma;
};
struct OrthMat {
  Eigen::MatrixXd g;
};
using WalkState = std::variant<SphereVec, MomentumVec, Perm, OrthMat>;

namespace detail {
inline void check_pair(int n, int i, int j) {
  require(i >= 0 && j >= 0 && i < n && j < n, "pair index out of range");
  require(i != j, "pair indices must differ");
}
}  // namespace detail

/// @brief Largest deviation of the state's conserved quantities.
inline double invariant_defect(const WalkState& s) {
  return std::visit(
      [](const auto& st) -> double {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, SphereVec>) {
          NeumaierSum e;
          for (double x : st.v) e.add(x * x);
          return std::abs(e.value() - 1.0);
        } else if constexpr (std::is_same_v<T, MomentumVec>) {
          NeumaierSum e, p[3];
          for (const auto& x : st.v) {
            for (int c = 0; c < 3; ++c) {
              e.add(x[c] * x[c]);
              p[c].add(x[c]);
            }
          }
          double d = std::abs(e.value() - 1.0);
          for (auto& pc : p) d = std::max(d, std::abs(pc.value()));
          return d;
        } else if constexpr (std::is_same_v<T, Perm>) {
          std::vector<char> seen(st.sigma.size(), 0);
          for (int x : st.sigma) {
            if (x < 0 || x >= static_cast<int>(st.sigma.size()) || seen[x]) return 1.0;
            seen[x] = 1;
          }
          return 0.0;
        } else {
          const auto n = st.g.rows();
          if (st.g.cols() != n) return 1.0;
          const Eigen::MatrixXd e = st.g.transpose() * st.g - Eigen::MatrixXd::Identity(n, n);
          return e.cwiseAbs().maxCoeff();
        }
      },
      s);
}

inline void check_invariants(const WalkState& s, double tol = Tolerances{}.state) {
  const double d = invariant_defect(s);
  if (!(d <= tol)) {
    std::ostringstream os;
    os << "state invariant violated: defect " << d << " exceeds " << tol;
    throw InvariantViolation(os.str());
  }
}

/// @brief Replaces (v_i, v_j) by (v_i cos t + v_j sin t, -v_i sin t + v_j cos t). Indices are 0-based.
inline SphereVec rotate_pair(SphereVec v, int i, int j, double theta) {
  detail::check_pair(static_cast<int>(v.v.size()), i, j);
  const double c = std::cos(theta), s = std::sin(theta);
  const double a = v.v[i], b = v.v[j];
  v.v[i] = a * c + b * s;
  v.v[j] = -a * s + b * c;
  return v;
}

/// @brief Momentum- and energy-conserving binary collision with impact direction omega.
inline std::pair<Vec3, Vec3> boltzmann_collide(const Vec3& vi, const Vec3& vj, const Vec3& omega,
                                               double unit_tol = Tolerances{}.unit_vector) {
  const double norm2 = omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2];
  detail::require(std::abs(std::sqrt(norm2) - 1.0) <= unit_tol, "boltzmann_collide: omega is not a unit vector");
  double proj = 0.0;
  for (int c = 0; c < 3; ++c) proj += omega[c] * (vj[c] - vi[c]);
  Vec3 a = vi, b = vj;
  for (int c = 0; c < 3; ++c) {
    a[c] += proj * omega[c];
    b[c] -= proj * omega[c];
  }
  return {a, b};
}

/// @brief Applies the transposition of values i and j to sigma when success is true.
inline Perm shuffle_step(Perm s, int i, int j, bool success) {
  const int n = static_cast<int>(s.sigma.size());
  detail::require(i >= 0 && j >= 0 && i < n && j < n, "shuffle_step: index out of range");
  detail::require(i < j, "shuffle_step: need i < j");
  if (!success) return s;
  for (int& x : s.sigma) {
    if (x == i)
      x = j;
    else if (x == j)
      x = i;
  }
  return s;
}

/// @brief 0 for even permutations, 1 for odd.
inline int parity(const Perm& s) {
  const std::size_t n = s.sigma.size();
  std::vector<char> seen(n, 0);
  int p = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (seen[k]) continue;
    std::size_t len = 0;
    for (std::size_t x = k; !seen[x]; x = static_cast<std::size_t>(s.sigma[x])) {
      seen[x] = 1;
      ++len;
    }
    p ^= static_cast<int>((len + 1) % 2);
  }
  return p;
}

namespace detail {
inline void rotate_rows(Eigen::MatrixXd& g, int i, int j, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  for (Eigen::Index k = 0; k < g.cols(); ++k) {
    const double a = g(i, k), b = g(j, k);
    g(i, k) = a * c + b * s;
    g(j, k) = -a * s + b * c;
  }
}
}  // namespace detail

/// @brief Returns R_ij(theta) G; each column moves exactly as under rotate_pair.
inline OrthMat son_left_rotate(OrthMat g, int i, int j, double theta, double tol = Tolerances{}.state) {
  detail::require(g.g.rows() == g.g.cols(), "son_left_rotate: matrix must be square");
  detail::check_pair(static_cast<int>(g.g.rows()), i, j);
  detail::require(i < j, "son_left_rotate: need i < j");
  detail::require(invariant_defect(WalkState{g}) <= tol, "son_left_rotate: input is not orthogonal");
  detail::rotate_rows(g.g, i, j, theta);
  return g;
}

/// @brief Text record "rho: {a_k: [..], grid: M}".
inline std::string to_record(const AngularDensity& rho) {
  detail::require(rho.is_series(), "only series densities have a text record");
  std::ostringstream os;
  os.precision(17);
  os << "rho: {a_k: [";
  for (std::size_t k = 0; k < rho.coefficients().size(); ++k) os << (k ? ", " : "") << rho.coefficients()[k];
  os << "], grid: " << rho.grid_resolution() << "}";
  return os.str();
}

/// @brief Text record "b: {grid: [..]}"; the uniform weight writes an empty grid.
inline std::string to_record(const ScatteringWeight& b) {
  std::ostringstream os;
  os.precision(17);
  os << "b: {grid: [";
  for (std::size_t k = 0; k < b.grid_values().size(); ++k) os << (k ? ", " : "") << b.grid_values()[k];
  os << "]}";
  return os.str();
}

namespace detail {
inline std::vector<double> parse_list(const std::string& body) {
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    try {
      out.push_back(std::stod(item.substr(b)));
    } catch (const std::exception&) {
      throw UsageError("malformed number in record: " + item);
    }
  }
  return out;
}
}  // namespace detail

inline AngularDensity parse_rho_record(const std::string& text) {
  static const std::regex re(R"(rho:\s*\{\s*a_k:\s*\[([^\]]*)\]\s*(?:,\s*grid:\s*(\d+)\s*)?\})");
  std::smatch m;
  if (!std::regex_search(text, m, re)) throw UsageError("malformed rho record: " + text);
  const int grid = m[2].matched ? std::stoi(m[2].str()) : 4096;
  return AngularDensity::from_cosine_coefficients(detail::parse_list(m[1].str()), grid);
}

inline ScatteringWeight parse_b_record(const std::string& text) {
  static const std::regex re(R"(b:\s*\{\s*grid:\s*\[([^\]]*)\]\s*\})");
  std::smatch m;
  if (!std::regex_search(text, m, re)) throw UsageError("malformed b record: " + text);
  auto v = detail::parse_list(m[1].str());
  if (v.empty()) return ScatteringWeight::uniform();
  return ScatteringWeight::from_grid(std::move(v));
}

}  // namespace kacgap
