// SPDX-FileCopyrightText: 2026 kacgap contributors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "kacgap/kacgap.hpp"
#include "oracles.hpp"

using namespace kacgap;

namespace {

SimulationOptions options(std::vector<double> times, int traj, std::uint64_t seed) {
  SimulationOptions o;
  o.times = std::move(times);
  o.trajectories = traj;
  o.seed = seed;
  return o;
}

double mean(const TrajectoryEnsemble& e, int k, int obs = 0) {
  NeumaierSum s;
  for (int t = 0; t < e.trajectories; ++t) s.add(e.at(t, k, obs));
  return s.value() / e.trajectories;
}

double stderr_of(const TrajectoryEnsemble& e, int k, int obs = 0) {
  const double m = mean(e, k, obs);
  NeumaierSum s;
  for (int t = 0; t < e.trajectories; ++t) s.add((e.at(t, k, obs) - m) * (e.at(t, k, obs) - m));
  return std::sqrt(s.value() / (e.trajectories - 1.0) / e.trajectories);
}

}  // namespace

TEST(Seeding, TrajectorySeedsDependOnlyOnIndex) {
  EXPECT_EQ(trajectory_seed(7, 3), trajectory_seed(7, 3));
  EXPECT_NE(trajectory_seed(7, 3), trajectory_seed(7, 4));
  EXPECT_NE(trajectory_seed(7, 3), trajectory_seed(8, 3));
}

TEST(RunWalk, DeterministicAndWorkerIndependent) {
  const ModelSpec m = KacSphere{6, AngularDensity::from_cosine_moments({{2, 0.3}})};
  auto o = options({0.0, 0.5, 1.0}, 64, 42);
  const auto obs = std::vector<Observable>{quartic_observable(6), coordinate_power(0, 2)};
  const auto a = run_walk(m, o, obs);
  o.workers = 3;
  const auto b = run_walk(m, o, obs);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.events_per_trajectory, b.events_per_trajectory);
}

TEST(RunWalk, TrajectoriesAreIndependentOfEnsembleSize) {
  const ModelSpec m = Shuffle{5, 0.5};
  const auto obs = std::vector<Observable>{fixed_points()};
  const auto small = run_walk(m, options({0.0, 1.0, 2.0}, 10, 9), obs);
  const auto large = run_walk(m, options({0.0, 1.0, 2.0}, 40, 9), obs);
  for (int t = 0; t < 10; ++t)
    for (int k = 0; k < 3; ++k) EXPECT_EQ(small.at(t, k, 0), large.at(t, k, 0));
}

TEST(RunWalk, EventCountsArePoisson) {
  const int N = 4;
  const double T = 2.0;
  const auto e = run_walk(Shuffle{N, 0.5}, options({0.0, T}, 4000, 5), {fixed_points()});
  double s = 0, s2 = 0;
  for (auto c : e.events_per_trajectory) {
    s += c;
    s2 += double(c) * c;
  }
  const double m = s / e.trajectories, v = s2 / e.trajectories - m * m;
  EXPECT_NEAR(m, N * T, 4.0 * std::sqrt(N * T / e.trajectories));
  EXPECT_NEAR(v / m, 1.0, 0.1);
}

TEST(RunWalk, ShuffleParityTracksSwaps) {
  auto o = options({0.0, 3.0}, 200, 1);
  o.initial = InitialLaw::deterministic;
  Observable par{"parity", [](const WalkState& s) { return double(parity(std::get<Perm>(s))); }};
  const auto e = run_walk(Shuffle{6, 0.5}, o, {par});
  for (int t = 0; t < e.trajectories; ++t) EXPECT_EQ(e.at(t, 1, 0), e.swap_parity[t]);
}

TEST(RunWalk, AuditsConservation) {
  auto o = options({0.0, 5.0}, 50, 3);
  o.audit_every = 10;
  for (const ModelSpec& m : std::vector<ModelSpec>{KacSphere{8, AngularDensity::uniform(256)},
                                                   Boltzmann3D{5, ScatteringWeight::from_grid({1, 2, 3})},
                                                   SpecialOrthogonal{4, AngularDensity::uniform(256)}}) {
    const auto e = run_walk(m, o, {default_observable(m)});
    EXPECT_LE(e.max_defect, 1e-9) << model_name(m);
  }
  o.audit_tol = 1e-300;
  EXPECT_THROW(run_walk(KacSphere{8, AngularDensity::uniform(256)}, o, {quartic_observable(8)}), InvariantViolation);
}

TEST(RunWalk, RejectsBadOptions) {
  const ModelSpec m = KacSphere{4, AngularDensity::uniform(64)};
  EXPECT_THROW(run_walk(m, options({1.0, 0.5}, 4, 1), {quartic_observable(4)}), UsageError);
  EXPECT_THROW(run_walk(m, options({0.0}, 0, 1), {quartic_observable(4)}), UsageError);
  auto o = options({0.0, 1.0}, 4, 1);
  o.initial = InitialLaw::provided;
  o.initial_state = Perm{{0, 1, 2, 3}};
  EXPECT_THROW(run_walk(m, o, {quartic_observable(4)}), UsageError);
}

TEST(Observables, CenteredQuarticHasZeroStationaryMean) {
  for (int N : {3, 6}) {
    const auto e = run_walk(KacSphere{N, AngularDensity::uniform(256)}, options({0.0}, 20000, 4), {quartic_observable(N)});
    EXPECT_LE(std::abs(mean(e, 0)), 3.0 * stderr_of(e, 0));
  }
  const auto b = run_walk(Boltzmann3D{5, ScatteringWeight::uniform()}, options({0.0}, 20000, 4),
                          {boltzmann_quartic_observable(5)});
  EXPECT_LE(std::abs(mean(b, 0)), 3.0 * stderr_of(b, 0));
}

TEST(GapEstimate, ShuffleEigenfunctionDecay) {
  const int N = 5;
  const double p = 0.5;
  std::vector<double> times;
  for (int k = 0; k <= 8; ++k) times.push_back(0.25 * k);
  const auto e = run_walk(Shuffle{N, p}, options(times, 20000, 21), {shuffle_eigenfunction(N)});
  const auto g = estimate_gap(e, 0);
  for (std::size_t k = 0; k < times.size(); ++k)
    EXPECT_LE(std::abs(g.ratio[k] - std::exp(-times[k] * oracle::shuffle_gap(N, p))), 2.576 * g.ratio_se[k] + 1e-12)
        << times[k];
  EXPECT_NEAR(g.rate, oracle::shuffle_gap(N, p), 0.1 * oracle::shuffle_gap(N, p));
}

TEST(GapEstimate, KacQuarticRate) {
  std::vector<double> times;
  for (int k = 0; k <= 16; ++k) times.push_back(0.25 * k);
  const auto e = run_walk(KacSphere{10, AngularDensity::uniform()}, options(times, 20000, 7), {quartic_observable(10)});
  const auto g = estimate_gap(e, 0);
  EXPECT_NEAR(g.rate, oracle::kac_gap_uniform(10), 0.15 * oracle::kac_gap_uniform(10));
  EXPECT_LE(e.max_defect, 1e-9);
}

TEST(GapEstimate, RefusesConstantObservable) {
  Observable c{"const", [](const WalkState&) { return 1.0; }};
  const auto e = run_walk(Shuffle{4, 0.5}, options({0.0, 1.0}, 20, 1), {c});
  EXPECT_THROW(estimate_gap(e, 0), FitRefused);
}

TEST(SonWalk, FirstColumnMatchesKacWalk) {
  const auto rho = AngularDensity::from_cosine_moments({{2, 0.4}}, 512);
  const int N = 4;
  auto o = options({0.0, 0.3, 0.8}, 20000, 13);
  o.initial = InitialLaw::deterministic;
  const auto obs = std::vector<Observable>{coordinate_power(0, 2), coordinate_power(0, 4)};
  const auto s = run_walk(SpecialOrthogonal{N, rho}, o, obs);
  o.seed = 14;
  const auto k = run_walk(KacSphere{N, rho}, o, obs);
  for (int t = 1; t < 3; ++t)
    for (int j = 0; j < 2; ++j) {
      const double se = std::hypot(stderr_of(s, t, j), stderr_of(k, t, j));
      EXPECT_LE(std::abs(mean(s, t, j) - mean(k, t, j)), 3.0 * se) << t << " " << j;
    }
}

TEST(StationaryMoments, SphereAndBoltzmann) {
  const auto sphere = stationary_moment_check(KacSphere{5, AngularDensity::uniform()}, 20000, 11);
  EXPECT_TRUE(sphere.pass);
  EXPECT_NEAR(sphere.entries[1].exact, 3.0 / 35.0, 1e-15);
  const auto boltz = stationary_moment_check(Boltzmann3D{4, ScatteringWeight::uniform()}, 20000, 12);
  EXPECT_TRUE(boltz.pass);
  EXPECT_NEAR(burn_in_gap_estimate(Boltzmann3D{4, ScatteringWeight::uniform()}), 0.1, 0.0);
  EXPECT_THROW(stationary_moment_check(KacSphere{5, AngularDensity::uniform()}, 100, 1, 1.0), UsageError);
}

TEST(StationaryStates, SatisfyInvariants) {
  std::mt19937_64 rng(8);
  for (const ModelSpec& m : std::vector<ModelSpec>{KacSphere{7, AngularDensity::uniform(64)},
                                                   Boltzmann3D{6, ScatteringWeight::uniform()}, Shuffle{6, 0.3},
                                                   SpecialOrthogonal{5, AngularDensity::uniform(64)}}) {
    EXPECT_LE(invariant_defect(stationary_state(m, rng)), 1e-12);
    EXPECT_LE(invariant_defect(deterministic_state(m)), 1e-12);
  }
  const auto g = std::get<OrthMat>(stationary_state(SpecialOrthogonal{5, AngularDensity::uniform(64)}, rng));
  EXPECT_NEAR(g.g.determinant(), 1.0, 1e-12);
}
