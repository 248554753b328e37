#include <gtest/gtest.h>

#include <cmath>

#include "hsmoney/search.hpp"

namespace hsm {
namespace {

TEST(Search, PlantedInstanceHasExactFidelity) {
  Rng rng(1);
  for (double eps : {0.05, 0.2, 0.7}) {
    const SearchProblem p = planted_instance(8, eps, 3, rng);
    EXPECT_NEAR(goal_fidelity(p, p.init_state), eps, 1e-12);
  }
}

TEST(Search, AmplitudeAmplificationFollowsSine) {
  Rng rng(2);
  const double eps = 0.1;
  const SearchProblem p = planted_instance(8, eps, 2, rng);
  const double theta = std::asin(eps);
  for (int T = 0; T < 20; ++T) {
    const StateVector s = amplitude_amplify(p, T);
    EXPECT_NEAR(goal_fidelity(p, s), std::abs(std::sin((2 * T + 1) * theta)), 1e-9) << T;
  }
}

TEST(Search, AmplitudeAmplificationCharges) {
  Rng rng(3);
  const SearchProblem p = planted_instance(6, 0.2, 1, rng);
  amplitude_amplify(p, 5);
  EXPECT_EQ(p.init->queries(), 5u);
  EXPECT_EQ(p.goal->queries(), 5u);
}

TEST(Search, GroverInverseUndoes) {
  Rng rng(4);
  const SearchProblem p = planted_instance(6, 0.3, 2, rng);
  StateVector s = haar_random_state(6, rng);
  const StateVector orig = s;
  grover_iterate(p, s);
  grover_iterate_inverse(p, s);
  EXPECT_NEAR(fidelity(s, orig), 1.0, 1e-12);
}

TEST(Search, CachedAmplifiedReflectionMatchesLiteral) {
  Rng rng(5);
  const SearchProblem p = planted_instance(6, 0.15, 2, rng);
  const int T = 4;
  const StateVector phi = amplitude_amplify(p, T);
  const AmplifiedReflection cached(p, T, phi, false);
  const AmplifiedReflection literal(p, T, phi, true);
  StateVector a = haar_random_state(6, rng), b = a;
  const auto before_i = p.init->queries(), before_g = p.goal->queries();
  cached.reflect(a);
  const auto cached_i = p.init->queries() - before_i, cached_g = p.goal->queries() - before_g;
  literal.reflect(b);
  EXPECT_NEAR(std::abs(a.inner(b)), 1.0, 1e-9);
  EXPECT_NEAR(std::abs(a.inner(b) - Amp(1.0)), 0.0, 1e-9);
  EXPECT_EQ(cached_i, 2u * T + 1);
  EXPECT_EQ(cached_g, 2u * T);
  EXPECT_EQ(p.init->queries() - before_i - cached_i, cached_i);
  EXPECT_EQ(p.goal->queries() - before_g - cached_g, cached_g);
}

TEST(Search, FixedPointTraceIsPrefixConsistent) {
  Rng rng(6);
  const SearchProblem p = planted_instance(6, 0.2, 2, rng);
  Rng a = rng.split(1), b = rng.split(1);
  const auto trace = fixed_point_trace(p, 40, a);
  const FixedPointResult r = fixed_point_search(p, 40, b);
  EXPECT_NEAR(trace.back(), r.found ? 1.0 : goal_fidelity(p, r.state), 1e-12);
}

TEST(Search, FixedPointMeanFidelityDominatesBound) {
  // Plane model: after the first miss each round succeeds with probability 2 s2 (1 - s2).
  Rng rng(7);
  const double eps = 0.3;
  const SearchProblem p = planted_instance(6, eps, 2, rng);
  const int T = 30, trials = 3000;
  std::vector<double> mean(T, 0.0);
  for (int t = 0; t < trials; ++t) {
    Rng r = rng.split(t);
    const auto tr = fixed_point_trace(p, T, r);
    for (int i = 0; i < T; ++i) mean[i] += tr[i] / trials;
  }
  const double s2 = eps * eps, q = 2 * s2 * (1 - s2);
  // An unfound state sits on |Init> (fidelity eps) or its complement in the plane.
  const double unfound = (1 - s2) * eps + s2 * std::sqrt(1 - s2);
  for (int i = 0; i < T; ++i) {
    const double found = 1.0 - (1.0 - s2) * std::pow(1.0 - q, i);
    const double expect = found + (1.0 - found) * unfound;
    EXPECT_NEAR(mean[i], expect, 0.03) << i;
    EXPECT_GE(mean[i] + 0.03, 1.0 - std::exp(-(i + 1) * eps * eps * kFixedPointC));
  }
}

TEST(Search, FixedPointRounds) {
  EXPECT_EQ(fixed_point_rounds(0.1, 0.1, 1.0), static_cast<int>(std::ceil(100 * std::log(10.0))));
  EXPECT_THROW(fixed_point_rounds(0.0, 0.1), std::invalid_argument);
}

TEST(Search, HybridRespectsDeltaHypothesis) {
  SearchParams sp;
  sp.eps = 0.2;
  sp.delta = 0.1;
  EXPECT_THROW(sp.validate(), std::invalid_argument);
  sp.enforce_delta_bound = false;
  EXPECT_NO_THROW(sp.validate());
}

TEST(Search, HybridFindsGoal) {
  Rng rng(8);
  SearchParams sp;
  sp.eps = 0.1;
  sp.delta = 0.2;
  int found = 0;
  for (int t = 0; t < 50; ++t) {
    Rng r = rng.split(t);
    const SearchProblem p = planted_instance(8, sp.eps, 2, r);
    const HybridResult h = hybrid_search(p, sp, r);
    found += h.found;
    EXPECT_LE(h.T, sp.L());
    EXPECT_EQ(h.queries, p.init->queries() + p.goal->queries());
  }
  EXPECT_GE(found, 45);
}

TEST(Search, NearLatticeCountMatchesBruteForce) {
  for (double beta : {3.7, 10.0, 25.3})
    for (double eta : {0.5, 1.5}) {
      const std::int64_t L = 500;
      std::int64_t brute = 0;
      for (std::int64_t T = 0; T <= L; ++T) {
        bool near = false;
        for (std::int64_t k = -2; k * beta <= L + 10; ++k) near = near || std::abs(T - (beta * k + 0.3)) < eta;
        brute += near;
      }
      EXPECT_EQ(count_near_lattice(L, beta, eta, 0.3), brute);
      EXPECT_LE(static_cast<double>(brute), near_lattice_bound(L, beta, eta));
    }
}

}  // namespace
}  // namespace hsm
