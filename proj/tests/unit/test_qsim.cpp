#include <gtest/gtest.h>

#include <cmath>

#include "hsmoney/density.hpp"
#include "hsmoney/qsim.hpp"
#include "hsmoney/rng.hpp"

namespace hsm {
namespace {

// Direct O(4^n) Walsh-Hadamard transform.
std::vector<Amp> naive_hadamard(const StateVector& s) {
  const std::size_t dim = s.dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<Amp> out(dim, 0.0);
  for (std::size_t y = 0; y < dim; ++y)
    for (std::size_t x = 0; x < dim; ++x)
      out[y] += (__builtin_popcountll(x & y) % 2 ? -scale : scale) * s[x];
  return out;
}

TEST(Qsim, HadamardMatchesNaive) {
  Rng rng(1);
  for (int n = 1; n <= 7; ++n) {
    const StateVector s = haar_random_state(n, rng);
    const StateVector h = hadamard_all(s);
    const auto ref = naive_hadamard(s);
    for (std::size_t i = 0; i < s.dim(); ++i) EXPECT_NEAR(std::abs(h[i] - ref[i]), 0.0, 1e-12);
  }
}

TEST(Qsim, HadamardIsInvolution) {
  Rng rng(2);
  const StateVector s = haar_random_state(10, rng);
  EXPECT_NEAR(fidelity(hadamard_all(hadamard_all(s)), s), 1.0, 1e-12);
}

TEST(Qsim, SubspaceStateDuality) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const Subspace a = random_subspace(10, 5, rng);
    const StateVector sa = subspace_state(a);
    EXPECT_NEAR(sa.norm(), 1.0, 1e-12);
    EXPECT_NEAR(fidelity(hadamard_all(sa), subspace_state(dual(a))), 1.0, 1e-9);
  }
}

TEST(Qsim, OracleFlipsExactlyAccepted) {
  Rng rng(4);
  const Subspace a = random_subspace(6, 3, rng);
  const PhaseOracle u = PhaseOracle::subspace(a);
  StateVector s = StateVector::uniform(6);
  apply_oracle(u, s);
  for (Word x = 0; x < 64; ++x) EXPECT_NEAR((s[x] * 8.0).real(), a.contains_word(x) ? -1.0 : 1.0, 1e-12);
  EXPECT_EQ(u.queries(), 1u);
  EXPECT_EQ(u.accepted_count(), 8u);
}

TEST(Qsim, StarOracleSelectsByFlag) {
  Rng rng(5);
  const Subspace a = random_subspace(4, 2, rng);
  const PhaseOracle star = PhaseOracle::subspace_star(a);
  const Subspace ad = dual(a);
  for (std::uint64_t x = 0; x < 32; ++x) {
    const Word low = static_cast<Word>(x & 15u);
    EXPECT_EQ(star.accepts(x), (x >> 4) ? ad.contains_word(low) : a.contains_word(low));
  }
}

TEST(Qsim, ControlledOracleIsOneQuery) {
  const PhaseOracle u = PhaseOracle::none(3);
  StateVector s(4);
  apply_oracle(u, s, {0, 3}, 3);
  EXPECT_EQ(u.queries(), 1u);
}

TEST(Qsim, MeasurementFrequencies) {
  Rng rng(6);
  const StateVector target = haar_random_state(3, rng);
  const StateVector s = haar_random_state(3, rng);
  const Projector p = Projector::onto_state(target);
  const double expect = std::norm(target.inner(s));
  EXPECT_NEAR(p.accept_probability(s, Register::whole(3)), expect, 1e-12);
  int hits = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) hits += measure_projector(p, s, rng).outcome;
  EXPECT_NEAR(hits / double(trials), expect, 4.0 * std::sqrt(expect * (1 - expect) / trials) + 1e-3);
}

TEST(Qsim, ProjectCollapses) {
  Rng rng(7);
  const StateVector target = haar_random_state(4, rng);
  const StateVector s = haar_random_state(4, rng);
  const Projector p = Projector::onto_state(target);
  EXPECT_NEAR(fidelity(project(p, s, true, Register::whole(4)), target), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(target.inner(project(p, s, false, Register::whole(4)))), 0.0, 1e-12);
  EXPECT_THROW(project(p, target, false, Register::whole(4)), std::domain_error);
}

TEST(Qsim, RelabelPermutesAmplitudes) {
  Rng rng(8);
  const LinMap f = LinMap::random_invertible(5, rng);
  const StateVector s = haar_random_state(5, rng);
  const StateVector r = relabel_basis(s, f, Register::whole(5));
  for (Word x = 0; x < 32; ++x) EXPECT_EQ(r[f.apply_word(x)], s[x]);
  const Subspace a = random_subspace(5, 2, rng);
  EXPECT_NEAR(fidelity(relabel_basis(subspace_state(a), f, Register::whole(5)), subspace_state(image(f, a))), 1.0,
              1e-12);
}

TEST(Qsim, DumpRoundTrip) {
  Rng rng(9);
  const StateVector s = haar_random_state(5, rng);
  const StateVector r = StateVector::from_dump(s.dump());
  for (std::size_t i = 0; i < s.dim(); ++i) EXPECT_LT(std::abs(r[i] - s[i]), 1e-15);
}

TEST(Qsim, TensorLayout) {
  const StateVector lo = StateVector::basis(2, 1), hi = StateVector::basis(1, 1);
  const StateVector t = lo.tensor(hi);
  EXPECT_EQ(t.qubits(), 3);
  EXPECT_NEAR(std::abs(t[0b101]), 1.0, 1e-12);
}

TEST(Qsim, QubitCapEnforced) { EXPECT_THROW(StateVector(simulator_qubit_cap() + 1), std::length_error); }

TEST(Qsim, HaarStatesAreSpread) {
  // E|<0|psi>|^2 = 1/d.
  Rng rng(10);
  double acc = 0.0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) acc += std::norm(haar_random_state(3, rng)[0]);
  EXPECT_NEAR(acc / trials, 1.0 / 8, 0.01);
}

TEST(Density, PureFidelityAndTraceDistance) {
  Rng rng(11);
  const StateVector a = haar_random_state(3, rng), b = haar_random_state(3, rng);
  const DensityOp ra = DensityOp::pure(a), rb = DensityOp::pure(b);
  EXPECT_NEAR(fidelity(ra, rb), fidelity(a, b), 1e-7);
  EXPECT_NEAR(trace_distance(ra, rb), trace_distance(a, b), 1e-9);
  EXPECT_NEAR(fidelity(a, rb), fidelity(a, b), 1e-9);
}

TEST(Density, FuchsVanDeGraafInequality) {
  Rng rng(12);
  for (int t = 0; t < 30; ++t) {
    const DensityOp r = DensityOp::random(2, 3, rng), s = DensityOp::random(2, 2, rng);
    const double f = fidelity(r, s), d = trace_distance(r, s);
    EXPECT_LE(1.0 - f, d + 1e-9);
    EXPECT_LE(d, std::sqrt(std::max(0.0, 1.0 - f * f)) + 1e-9);
  }
}

TEST(Density, MaximallyMixed) {
  const DensityOp m = DensityOp::maximally_mixed(4);
  for (double e : m.eigenvalues()) EXPECT_NEAR(e, 0.25, 1e-12);
  EXPECT_NEAR(fidelity(StateVector::basis(2, 1), m), 0.5, 1e-12);
}

TEST(Density, RejectsNonHermitian) {
  EXPECT_THROW(DensityOp(2, {Amp(0.5), Amp(0.1), Amp(0.0), Amp(0.5)}), std::domain_error);
}

}  // namespace
}  // namespace hsm
