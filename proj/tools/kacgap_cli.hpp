// SPDX-FileCopyrightText: 2026 kacgap contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kacgap/kacgap.hpp"

#ifndef KACGAP_VERSION
#define KACGAP_VERSION "0.0.0"
#endif

namespace kacgap::cli {

enum ExitCode { ok = 0, failure = 1, usage = 2, invariant = 3, verification = 4 };

struct RunConfig {
  std::string command;
  std::string model = "kac";
  int n = 3;
  int n_max = 0;
  std::string rho = "uniform";
  std::string b = "uniform";
  double p = 0.5;
  int max_degree = 8;
  int k_max = 0;
  int grid = 4096;
  double tol = 1e-10;
  std::optional<std::uint64_t> seed;
  int traj = 2000;
  std::string times = "0:4.5:0.25";
  std::string out;
  int workers = 1;
  std::string suite;
  std::optional<double> check_tol;
  std::string format = "json";
  double delta_base = 1.0;
  std::string observable = "default";
  std::string file;
};

inline json config_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["model"] = c.model;
  j["n"] = c.n;
  j["n_max"] = c.n_max;
  j["rho"] = c.rho;
  j["b"] = c.b;
  j["p"] = c.p;
  j["max_degree"] = c.max_degree;
  j["k_max"] = c.k_max;
  j["grid"] = c.grid;
  j["tol"] = c.tol;
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["traj"] = c.traj;
  j["times"] = c.times;
  j["workers"] = c.workers;
  if (!c.suite.empty()) j["suite"] = c.suite;
  if (c.check_tol) j["check_tol"] = *c.check_tol;
  j["format"] = c.format;
  j["delta_base"] = c.delta_base;
  j["observable"] = c.observable;
  return j;
}

/// @brief "uniform", "a2=0.5,a4=-0.1" (cosine moments), or a record "rho: {a_k: [...], grid: M}".
inline AngularDensity parse_rho(const std::string& text, int grid) {
  if (text.empty() || text == "uniform") return AngularDensity::uniform(grid);
  if (text.find("rho:") != std::string::npos) return parse_rho_record(text);
  std::vector<std::pair<int, double>> moments;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    const auto b = item.find_first_not_of(" \t");
    if (eq == std::string::npos || b == std::string::npos || item[b] != 'a')
      throw UsageError("malformed density term '" + item + "'; expected ak=value");
    try {
      std::size_t used = 0;
      const std::string ks = item.substr(b + 1, eq - b - 1);
      const int k = std::stoi(ks, &used);
      if (used != ks.size()) throw std::invalid_argument("index");
      moments.emplace_back(k, std::stod(item.substr(eq + 1)));
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception&) {
      throw UsageError("malformed density term '" + item + "'");
    }
  }
  return AngularDensity::from_cosine_moments(moments, grid);
}

inline ScatteringWeight parse_b(const std::string& text) {
  if (text.empty() || text == "uniform") return ScatteringWeight::uniform();
  return parse_b_record(text);
}

/// @brief "start:stop:step" or a comma list.
inline std::vector<double> parse_times(const std::string& text) {
  std::vector<double> out;
  try {
    if (text.find(':') != std::string::npos) {
      std::stringstream ss(text);
      std::string a, b, c;
      std::getline(ss, a, ':');
      std::getline(ss, b, ':');
      std::getline(ss, c, ':');
      const double lo = std::stod(a), hi = std::stod(b), st = std::stod(c);
      if (!(st > 0.0) || hi < lo) throw UsageError("bad time range " + text);
      const long n = std::lround(std::floor((hi - lo) / st + 1e-9));
      for (long k = 0; k <= n; ++k) out.push_back(lo + k * st);
    } else {
      out = detail::parse_list(text);
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("malformed times '" + text + "'");
  }
  if (out.empty()) throw UsageError("no sample times given");
  return out;
}

inline ModelSpec make_model(const RunConfig& c) {
  ModelSpec m;
  if (c.model == "kac")
    m = KacSphere{c.n, parse_rho(c.rho, c.grid)};
  else if (c.model == "son")
    m = SpecialOrthogonal{c.n, parse_rho(c.rho, c.grid)};
  else if (c.model == "shuffle")
    m = Shuffle{c.n, c.p};
  else if (c.model == "boltzmann")
    m = Boltzmann3D{c.n, parse_b(c.b)};
  else
    throw UsageError("unknown model '" + c.model + "'");
  return m;
}

inline json artifact(const RunConfig& c, json result) {
  json j;
  j["tool"] = "kacgap";
  j["version"] = KACGAP_VERSION;
  j["config"] = config_json(c);
  j["result"] = std::move(result);
  return j;
}

inline void emit(const RunConfig& c, const std::string& text, std::ostream& os) {
  if (c.out.empty()) {
    os << text;
    if (text.empty() || text.back() != '\n') os << "\n";
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw UsageError("cannot open output file " + c.out);
  f << text;
  if (text.empty() || text.back() != '\n') f << "\n";
}

inline int cmd_spectrum(const RunConfig& c, std::ostream& os) {
  const ModelSpec m = make_model(c);
  validate_model(m);
  SpectrumTable t;
  if (c.model == "kac")
    t = kac_k_spectrum(c.n, c.max_degree);
  else if (c.model == "son")
    t = son_k_spectrum(c.n, c.max_degree);
  else if (c.model == "shuffle")
    t = shuffle_k_spectrum(c.n);
  else
    t = boltzmann_k_spectrum(c.n, c.max_degree);
  json r = to_json(t);
  if (c.n >= 3 && (c.model != "boltzmann" || c.n >= 4)) r["extremes"] = to_json(k_extremes(m, c.max_degree));
  emit(c, dump17(artifact(c, r)), os);
  return ok;
}

inline std::vector<GapReport> gap_reports(const RunConfig& c) {
  const ModelSpec m = make_model(c);
  validate_model(m, true);
  const int hi = std::max(c.n, c.n_max);
  std::vector<GapReport> out;
  if (c.model == "kac" || c.model == "son") {
    const auto rho = parse_rho(c.rho, c.grid);
    for (int N = c.n; N <= hi; ++N) {
      auto r = kac_gap_exact(rho, N, c.k_max);
      if (c.model == "son") r.notes.push_back("SO(N) walk: K spectrum coincides with the sphere walk");
      out.push_back(r);
    }
  } else if (c.model == "shuffle") {
    for (int N = c.n; N <= hi; ++N) out.push_back(shuffle_gap_closed_form(N, c.p));
  } else {
    detail::require(c.n >= 3, "Boltzmann gap recursion starts at N = 3");
    for (auto& r : gap_recursion_lower(m, hi, c.delta_base, c.max_degree)) {
      if (r.N < c.n) continue;
      r.notes.push_back("delta_lower scales with the supplied N = 3 gap");
      out.push_back(r);
    }
  }
  return out;
}

inline std::string gap_csv(const std::vector<GapReport>& reports) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "N,kappa,beta,mu,delta_lower,delta_upper,delta_exact,sharp\n";
  for (const auto& r : reports) {
    os << r.N << "," << r.kappa << "," << r.beta << "," << r.mu << "," << r.delta_lower << ",";
    if (r.delta_upper) os << *r.delta_upper;
    os << ",";
    if (r.delta_exact) os << *r.delta_exact;
    os << "," << (r.sharp ? "true" : "false") << "\n";
  }
  return os.str();
}

inline int cmd_gap(const RunConfig& c, std::ostream& os) {
  const auto reports = gap_reports(c);
  if (c.format == "csv") {
    emit(c, gap_csv(reports), os);
    return ok;
  }
  json r;
  r["reports"] = json::array();
  for (const auto& g : reports) r["reports"].push_back(to_json(g));
  emit(c, dump17(artifact(c, r)), os);
  return ok;
}

struct Check {
  std::string id;
  std::string reference;
  double computed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool one_sided = false;
};

inline Check check(std::string id, std::string ref, double computed, double expected, double tol) {
  return {std::move(id), std::move(ref), computed, expected, tol, std::abs(computed - expected) <= tol};
}

inline Check check_at_most(std::string id, std::string ref, double computed, double bound) {
  return {std::move(id), std::move(ref), computed, bound, 0.0, computed <= bound, true};
}

inline std::vector<Check> suite_kac_small_n(const RunConfig& c) {
  std::vector<Check> out;
  const auto rho = parse_rho(c.rho, c.grid);
  const int lo = std::max(3, c.n), hi = std::max(lo, c.n_max > 0 ? c.n_max : 6);
  double prev = lo == 3 ? lambda2_kac(rho, c.k_max) : build_restricted_q(lo - 1, rho, 4).second_eigenvalue();
  for (int N = lo; N <= hi; ++N) {
    const auto q = build_restricted_q(N, rho, 4);
    const double lam = q.second_eigenvalue();
    const double gap = N * (1.0 - lam);
    const auto rep = kac_gap_exact(rho, N, c.k_max);
    const std::string s = std::to_string(N);
    if (rep.delta_exact)
      out.push_back(check("restricted_q_gap_N" + s, "degree-4 restricted Q gap vs exact Kac gap", gap,
                          *rep.delta_exact, 1e-9));
    else
      out.push_back(check_at_most("lower_bound_N" + s, "recursion lower bound vs degree-4 restricted gap",
                                  rep.delta_lower - 1e-10, gap));
    out.push_back(check("restricted_q_symmetry_N" + s, "Q self-adjoint on the restricted basis", q.symmetry_defect,
                        0.0, 1e-10));
    out.push_back(check("quartic_residual_N" + s, "symmetric quartic is a Q eigenfunction",
                        quartic_residual(N, rho).residual, 0.0, 1e-10));
    if (N <= 5) {
      const auto p = build_restricted_p(N, 4);
      const auto e = k_extremes(KacSphere{N, rho});
      const double mu = mu_from_K(N, e.kappa, e.beta);
      out.push_back(check("restricted_p_mu_N" + s, "P second eigenvalue vs K extremes", p.second_eigenvalue(), mu,
                          1e-10));
      if (rep.sharp)
        out.push_back(check("eigenvalue_transfer_N" + s, "lambda_N = lambda_{N-1} + (1 - lambda_{N-1}) mu_N", lam,
                            prev + (1.0 - prev) * p.second_eigenvalue(), 1e-10));
    }
    prev = lam;
  }
  return out;
}

inline std::vector<Check> suite_shuffle(const RunConfig& c) {
  std::vector<Check> out;
  const int hi = std::min(6, c.n_max > 0 ? c.n_max : 6);
  for (int N = 2; N <= hi; ++N)
    for (double p : {0.25, 0.5, 1.0}) {
      const auto s = shuffle_q_bruteforce(N, p);
      const std::string id = "N" + std::to_string(N) + "_p" + std::to_string(p).substr(0, 4);
      out.push_back(check("shuffle_gap_" + id, "brute-force gap vs 2pN/(N-1)", s.gap, 2.0 * p * N / (N - 1.0), 1e-10));
      out.push_back(check("shuffle_multiplicity_" + id, "second eigenvalue multiplicity (N-1)^2",
                          static_cast<double>(s.multiplicity), (N - 1.0) * (N - 1.0), 0.0));
    }
  return out;
}

inline std::vector<Check> suite_boltzmann(const RunConfig& c) {
  std::vector<Check> out;
  const int N = std::max(5, c.n);
  for (auto [n, l] : std::vector<std::pair<int, int>>{{0, 1}, {1, 0}, {2, 0}, {1, 1}}) {
    if (l >= boltzmann_l0(N)) continue;
    const auto r = boltzmann_eigen_residual(N, n, l, 16, c.seed.value_or(1));
    out.push_back(check_at_most("eigen_residual_N" + std::to_string(N) + "_n" + std::to_string(n) + "_l" +
                                    std::to_string(l),
                                "K applied by ball quadrature vs lambda_{n,l} g", r.residual, 1e-6));
  }
  const int hi = std::max(N, c.n_max > 0 ? c.n_max : 12);
  double worst_k = 0.0, worst_c = 0.0, worst_dom = -1.0;
  for (int M = 4; M <= hi; ++M)
    for (int n = 0; n <= 6; ++n)
      for (int l = 0; l <= 4 && l < boltzmann_l0(M); ++l) {
        const auto idx = boltzmann_index(M, n, l);
        const double x = boltzmann_eval_point(M);
        worst_k = std::max(worst_k, std::abs(jacobi_ratio(idx, x) - koornwinder_ratio(idx, x)));
        const double lam = boltzmann_lambda(M, n, l);
        if (n <= 2) worst_c = std::max(worst_c, std::abs(lam - boltzmann_lambda_closed_form(M, n, l)));
        if (n >= 1) worst_dom = std::max(worst_dom, std::abs(lam) - boltzmann_mu_bound(M, n, l));
      }
  out.push_back(check("jacobi_vs_koornwinder", "two evaluations of the Jacobi ratio", worst_k, 0.0, 1e-8));
  out.push_back(check("closed_forms_n_le_2", "closed forms for n <= 2 vs recurrence", worst_c, 0.0, 1e-12));
  out.push_back(check_at_most("mu_domination", "max |lambda| - mu over the sweep", worst_dom, 0.0));
  return out;
}

inline std::vector<Check> suite_marginals(const RunConfig& c) {
  std::vector<Check> out;
  const int hi = std::max(c.n, 3);
  for (int N = 2; N <= hi; ++N)
    for (int k = 2; k <= 8; k += 2) {
      Monomial e(N, 0);
      e[0] = k;
      out.push_back(check("sphere_marginal_N" + std::to_string(N) + "_k" + std::to_string(k),
                          "sphere moment vs one-coordinate law by quadrature", sphere_moment(N, e),
                          nu_moment_quadrature(N, k), 1e-10));
    }
  std::mt19937_64 rng(c.seed.value_or(1));
  for (int N : {4, 5}) {
    const ModelSpec m = Boltzmann3D{N, ScatteringWeight::uniform()};
    const int T = std::max(1000, c.traj);
    for (int k : {2, 4}) {
      NeumaierSum s, s2;
      std::vector<double> xs;
      for (int t = 0; t < T; ++t) {
        const auto st = stationary_state(m, rng);
        const auto& v = std::get<MomentumVec>(st).v[N - 1];
        xs.push_back(std::pow(N / (N - 1.0) * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]), k / 2.0));
        s.add(xs.back());
      }
      const double mean = s.value() / T;
      for (double x : xs) s2.add((x - mean) * (x - mean));
      const double se = std::sqrt(s2.value() / (T - 1.0) / T);
      out.push_back(check("boltzmann_marginal_N" + std::to_string(N) + "_k" + std::to_string(k),
                          "Monte Carlo momentum marginal vs ball density (3 standard errors)", mean,
                          boltzmann_radial_moment(N, k), 3.0 * se));
    }
  }
  return out;
}

inline std::vector<Check> suite_recursion(const RunConfig& c) {
  std::vector<Check> out;
  const int hi = std::max(c.n_max, 200);
  const auto rho = parse_rho(c.rho, c.grid);
  const ModelSpec kac = KacSphere{2, rho};
  const auto reps = gap_recursion_lower(kac, hi, 2.0 * (1.0 - lambda2_kac(rho, c.k_max)));
  double worst = 0.0;
  for (const auto& r : reps)
    if (r.N >= 3) worst = std::max(worst, std::abs(r.delta_lower - kac_gap_exact(rho, r.N, c.k_max).delta_lower));
  out.push_back(check("kac_recursion_vs_closed_form", "telescoped recursion vs closed form", worst, 0.0, 1e-12));
  double wp = 0.0;
  for (int N = 3; N <= hi; ++N) wp = std::max(wp, std::abs(kac_product_literal(N) - kac_product_closed_form(N)));
  out.push_back(check("kac_product_closed_form", "literal product vs (N+2)/(4(N-1))", wp, 0.0, 1e-14));
  const ModelSpec sh = Shuffle{2, c.p};
  double ws = 0.0;
  for (const auto& r : gap_recursion_lower(sh, hi, 4.0 * c.p))
    ws = std::max(ws, std::abs(r.delta_lower - 2.0 * c.p * r.N / (r.N - 1.0)));
  out.push_back(check("shuffle_recursion_vs_closed_form", "telescoped recursion vs 2pN/(N-1)", ws, 0.0, 1e-12));
  int chain_fail = 0;
  auto prev = boltzmann_extremes(4);
  for (int N = 5; N <= std::min(hi, 60); ++N) {
    const auto e = boltzmann_extremes(N);
    if (prev.kappa < 0.5 && e.kappa > prev.kappa / (1.0 - prev.kappa)) ++chain_fail;
    if (e.beta > prev.beta) ++chain_fail;
    prev = e;
  }
  out.push_back(check("boltzmann_extreme_chains", "kappa_N <= kappa_{N-1}/(1-kappa_{N-1}), beta decreasing",
                      chain_fail, 0.0, 0.0));
  return out;
}

inline std::vector<Check> suite_theorem71(const RunConfig& c) {
  std::vector<Check> out;
  const auto rho = parse_rho(c.rho, c.grid);
  const auto t = theorem71_check(rho);
  out.push_back(check("alpha8_product_closed_form_N50", "literal alpha_8 product vs Gamma-function closed form",
                      t.product_literal, t.product_closed, 1e-10));
  out.push_back(check("limit_constant_L", "(3/770) sinh(sqrt6 pi)/(sqrt6 pi)", t.L, 0.5564, 5e-4));
  return out;
}

inline int cmd_verify(const RunConfig& c, std::ostream& os) {
  std::vector<Check> checks;
  if (c.suite == "kac-small-n")
    checks = suite_kac_small_n(c);
  else if (c.suite == "shuffle-bruteforce")
    checks = suite_shuffle(c);
  else if (c.suite == "boltzmann-eigen")
    checks = suite_boltzmann(c);
  else if (c.suite == "marginals")
    checks = suite_marginals(c);
  else if (c.suite == "recursion-consistency")
    checks = suite_recursion(c);
  else if (c.suite == "theorem71")
    checks = suite_theorem71(c);
  else
    throw UsageError("unknown suite '" + c.suite + "'");
  if (c.check_tol)
    for (auto& k : checks)
      if (!k.one_sided) {
        k.tolerance = *c.check_tol;
        k.pass = std::abs(k.computed - k.expected) <= k.tolerance;
      }
  json r;
  r["suite"] = c.suite;
  r["checks"] = json::array();
  bool all = true;
  for (const auto& k : checks) {
    r["checks"].push_back({{"check_id", k.id},
                           {"reference", k.reference},
                           {"computed", k.computed},
                           {"expected", k.expected},
                           {"tolerance", k.tolerance},
                           {"pass", k.pass}});
    all = all && k.pass;
  }
  r["pass"] = all;
  if (c.suite == "theorem71") r["details"] = to_json(theorem71_check(parse_rho(c.rho, c.grid)));
  emit(c, dump17(artifact(c, r)), os);
  return all ? ok : verification;
}

inline Observable pick_observable(const RunConfig& c, const ModelSpec& m) {
  if (c.observable == "default") return default_observable(m);
  if (c.observable == "quartic") return quartic_observable(c.n);
  if (c.observable == "fixed-points") return fixed_points();
  if (c.observable == "shuffle-eigen") return shuffle_eigenfunction(c.n);
  if (c.observable == "coord2") return coordinate_power(0, 2);
  throw UsageError("unknown observable '" + c.observable + "'");
}

inline int cmd_simulate(const RunConfig& c, std::ostream& os) {
  if (!c.seed) throw UsageError("simulate requires --seed");
  const ModelSpec m = make_model(c);
  SimulationOptions opt;
  opt.times = parse_times(c.times);
  opt.trajectories = c.traj;
  opt.seed = *c.seed;
  opt.workers = c.workers;
  opt.audit_tol = c.tol;
  const auto obs = pick_observable(c, m);
  const auto ens = run_walk(m, opt, {obs});
  json r;
  r["observable"] = obs.name;
  r["trajectories"] = ens.trajectories;
  r["n_events"] = ens.n_events;
  r["max_audit_defect"] = ens.max_defect;
  try {
    const auto g = estimate_gap(ens, 0);
    r["fit"] = to_json(g);
  } catch (const FitRefused& e) {
    r["fit"] = nullptr;
    r["fit_refused"] = e.what();
  }
  if (!c.out.empty()) {
    std::ofstream csv(c.out + ".csv");
    if (!csv) throw UsageError("cannot open " + c.out + ".csv");
    csv << std::setprecision(17) << "trajectory,t,observable_name,value\n";
    for (int t = 0; t < ens.trajectories; ++t)
      for (std::size_t k = 0; k < ens.times.size(); ++k)
        csv << t << "," << ens.times[k] << "," << obs.name << "," << ens.at(t, static_cast<int>(k), 0) << "\n";
    std::ofstream js(c.out + ".json");
    if (!js) throw UsageError("cannot open " + c.out + ".json");
    js << dump17(artifact(c, r)) << "\n";
  } else {
    os << dump17(artifact(c, r)) << "\n";
  }
  return ok;
}

inline std::string fmt(const json& v) {
  if (v.is_number_float()) {
    std::ostringstream os;
    os << std::setprecision(10) << v.get<double>();
    return os.str();
  }
  if (v.is_null()) return "-";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline void print_rows(const json& rows, const std::vector<std::string>& cols, std::ostream& os) {
  for (const auto& c : cols) os << std::setw(20) << c;
  os << "\n";
  for (const auto& r : rows) {
    for (const auto& c : cols) os << std::setw(20) << (r.contains(c) ? fmt(r[c]) : "-");
    os << "\n";
  }
}

inline int cmd_table(const RunConfig& c, std::ostream& os) {
  std::ifstream f(c.file);
  if (!f) throw UsageError("cannot open " + c.file);
  json j;
  try {
    j = json::parse(f);
  } catch (const std::exception& e) {
    throw UsageError(std::string("not a JSON artifact: ") + e.what());
  }
  const json& r = j.contains("result") ? j["result"] : j;
  if (r.contains("reports"))
    print_rows(r["reports"], {"N", "kappa", "beta", "mu", "delta_lower", "delta_upper", "delta_exact", "sharp"}, os);
  else if (r.contains("entries"))
    print_rows(r["entries"], {"n", "l", "value", "multiplicity"}, os);
  else if (r.contains("checks"))
    print_rows(r["checks"], {"check_id", "computed", "expected", "tolerance", "pass"}, os);
  else
    for (auto it = r.begin(); it != r.end(); ++it) os << std::setw(24) << it.key() << "  " << fmt(it.value()) << "\n";
  return ok;
}

/// @brief Parses argv and dispatches; returns the process exit code.
inline int run(int argc, char** argv, std::ostream& os = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  if (const char* w = std::getenv("KACGAP_WORKERS")) {
    try {
      c.workers = std::max(1, std::stoi(w));
    } catch (const std::exception&) {
      err << "ignoring malformed KACGAP_WORKERS\n";
    }
  }
  CLI::App app{"Spectral gaps of Kac-type collision models"};
  app.set_config("--config", "", "key = value file mirroring the flags");
  app.require_subcommand(1);
  app.add_option("--model", c.model, "kac | boltzmann | shuffle | son")
      ->check(CLI::IsMember({"kac", "boltzmann", "shuffle", "son"}));
  app.add_option("--n", c.n, "number of particles");
  app.add_option("--n-max", c.n_max, "upper end of an N range");
  app.add_option("--rho", c.rho, "uniform | ak=c,... (cosine moments) | rho record");
  app.add_option("--b", c.b, "uniform | b record");
  app.add_option("--p", c.p, "shuffle success probability");
  app.add_option("--max-degree", c.max_degree, "degree or n+l scan bound");
  app.add_option("--k-max", c.k_max, "cosine-moment cutoff (0 = automatic)");
  app.add_option("--grid", c.grid, "density grid resolution");
  app.add_option("--tol", c.tol, "state invariant tolerance");
  app.add_option("--seed", c.seed, "master seed");
  app.add_option("--traj", c.traj, "number of trajectories");
  app.add_option("--times", c.times, "start:stop:step or comma list");
  app.add_option("--out", c.out, "output path (simulate: prefix for .csv and .json)");
  app.add_option("--workers", c.workers, "worker threads");
  app.add_option("--format", c.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--delta-base", c.delta_base, "Boltzmann gap at N = 3");
  app.add_option("--observable", c.observable, "default | quartic | fixed-points | shuffle-eigen | coord2");
  app.add_option("--suite", c.suite, "verification suite");
  app.add_option("--check-tol", c.check_tol, "replace the tolerance of every two-sided verify check");
  auto* spectrum = app.add_subcommand("spectrum", "K spectrum table")->fallthrough();
  auto* gap = app.add_subcommand("gap", "gap bounds per N")->fallthrough();
  auto* verify = app.add_subcommand("verify", "run a verification suite")->fallthrough();
  verify->add_option("suite", c.suite, "suite name");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo walk and gap fit")->fallthrough();
  auto* table = app.add_subcommand("table", "pretty-print a JSON artifact")->fallthrough();
  table->add_option("file", c.file, "artifact path")->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, os, err);
    return rc == 0 ? ok : usage;
  }
  try {
    if (c.workers < 1) throw UsageError("--workers must be >= 1");
    if (*spectrum) {
      c.command = "spectrum";
      return cmd_spectrum(c, os);
    }
    if (*gap) {
      c.command = "gap";
      return cmd_gap(c, os);
    }
    if (*verify) {
      c.command = "verify";
      return cmd_verify(c, os);
    }
    if (*simulate) {
      c.command = "simulate";
      return cmd_simulate(c, os);
    }
    if (*table) {
      c.command = "table";
      return cmd_table(c, os);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const InvariantViolation& e) {
    err << "invariant breach: " << e.what() << "\n";
    return invariant;
  } catch (const VerificationFailure& e) {
    err << "verification failure: " << e.what() << "\n";
    return verification;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return failure;
  }
  return usage;
}

}  // namespace kacgap::cli
