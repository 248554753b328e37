#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "hsmoney/hsmini.hpp"

namespace hsm {
namespace {

TEST(HsMini, SerialsAreDistinctAndInvertible) {
  Rng rng(1);
  const auto b = make_bundle(6, rng);
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 64; ++r) {
    const std::uint64_t s = b->serial_of(r);
    EXPECT_LT(s, std::uint64_t{1} << 18);
    EXPECT_TRUE(seen.insert(s).second);
    EXPECT_EQ(b->peek(s), r);
  }
  // Only 2^n of the 2^{3n} strings are serials.
  int valid = 0;
  for (std::uint64_t s = 0; s < (1u << 18); s += 7) valid += b->peek(s).has_value();
  EXPECT_LT(valid, 200);
}

TEST(HsMini, LookupIsCharged) {
  Rng rng(2);
  const auto b = make_bundle(4, rng);
  const std::uint64_t s = b->serial_of(3);
  EXPECT_EQ(b->lookup(s), 3u);
  b->peek(s);
  EXPECT_EQ(b->h_queries(), 1u);
}

TEST(HsMini, OraclesMatchSubspace) {
  Rng rng(3);
  const auto b = make_bundle(6, rng);
  const std::uint64_t s = b->serial_of(9);
  const Subspace a = b->subspace_of(9);
  EXPECT_EQ(a.dim(), 3);
  const PhaseOracle p = b->primal(s), d = b->dual(s);
  const Subspace ad = hsm::dual(a);
  for (Word x = 0; x < 64; ++x) {
    EXPECT_EQ(p.accepts(x), a.contains_word(x));
    EXPECT_EQ(d.accepts(x), ad.contains_word(x));
  }
  EXPECT_EQ(b->primal(s ^ 1u).accepted_count(), 0u);
}

TEST(HsMini, VerifierCircuitIsProjector) {
  Rng rng(4);
  for (int n : {2, 4, 6}) {
    const Subspace a = random_subspace(n, n / 2, rng);
    const StateVector sa = subspace_state(a);
    const std::size_t dim = sa.dim();
    for (std::size_t j = 0; j < dim; ++j) {
      std::vector<Amp> col(dim, 0.0);
      col[j] = 1.0;
      apply_verifier_circuit(a, col);
      for (std::size_t i = 0; i < dim; ++i) EXPECT_NEAR(std::abs(col[i] - sa[i] * std::conj(sa[j])), 0.0, 1e-12);
    }
  }
}

TEST(HsMini, HonestAcceptsAndChargesFourQueries) {
  Rng rng(5);
  const auto b = make_bundle(8, rng);
  for (int t = 0; t < 20; ++t) {
    HsBanknote note = bank(*b, rng);
    EXPECT_TRUE(verify(*b, note.serial, note.state, rng));
  }
  EXPECT_EQ(b->primal_queries(), 20u);
  EXPECT_EQ(b->dual_queries(), 20u);
}

TEST(HsMini, AcceptanceEqualsOverlap) {
  Rng rng(6);
  const auto b = make_bundle(4, rng);
  HsBanknote note = bank(*b, rng);
  const StateVector probe = haar_random_state(4, rng);
  const double expect = std::norm(probe.inner(note.state));
  int acc = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    StateVector s = probe;
    acc += verify(*b, note.serial, s, rng);
  }
  EXPECT_NEAR(acc / double(trials), expect, 4 * std::sqrt(expect * (1 - expect) / trials) + 1e-3);
}

TEST(HsMini, InvalidSerialRejects) {
  Rng rng(7);
  const auto b = make_bundle(4, rng);
  HsBanknote note = bank(*b, rng);
  std::uint64_t bad = note.serial ^ 1u;
  while (b->peek(bad)) bad = (bad + 3) & ((1u << 12) - 1);
  EXPECT_FALSE(verify(*b, bad, note.state, rng));
  EXPECT_THROW(verifier_as_projector(*b, bad), std::invalid_argument);
}

TEST(HsMini, SerialEncoding) {
  Rng rng(8);
  const auto b = make_bundle(6, rng);  // 18 bits -> 3 bytes
  const std::uint64_t s = b->serial_of(1);
  const Bytes enc = b->encode_serial(s);
  EXPECT_EQ(enc.size(), 3u);
  EXPECT_EQ(b->decode_serial(enc), s);
  EXPECT_THROW(b->decode_serial(Bytes{0xff, 0xff, 0xff}), std::invalid_argument);
  EXPECT_THROW(b->decode_serial(Bytes{0x01}), std::invalid_argument);
}

TEST(HsMini, SnapshotRoundTrip) {
  Rng rng(9);
  const auto b = make_bundle(6, rng);
  for (std::uint64_t r : {0u, 5u, 17u}) b->subspace_of(r);
  const auto c = OracleBundle::from_snapshot(b->snapshot_json());
  for (std::uint64_t r : {0u, 5u, 17u, 33u}) {
    EXPECT_EQ(c->serial_of(r), b->serial_of(r));
    EXPECT_EQ(c->subspace_of(r), b->subspace_of(r));
  }
  std::string tampered = b->snapshot_json();
  const auto pos = tampered.find("\"key\":");
  ASSERT_NE(pos, std::string::npos);
  tampered.insert(pos + 6, "1");
  EXPECT_THROW(OracleBundle::from_snapshot(tampered), std::invalid_argument);
}

TEST(HsMini, RandomizationPreservesVerification) {
  Rng rng(10);
  const auto b = make_bundle(6, rng);
  HsBanknote note = bank(*b, rng);
  const Subspace a = b->subspace_of(*b->peek(note.serial));
  const RandomizedInstance inst = randomize_instance(a, note.state, b->primal(note.serial), b->dual(note.serial), rng);
  EXPECT_NEAR(fidelity(inst.state, subspace_state(inst.a)), 1.0, 1e-12);
  for (Word x = 0; x < 64; ++x) {
    EXPECT_EQ(inst.primal.accepts(x), inst.a.contains_word(x));
    EXPECT_EQ(inst.dual.accepts(x), hsm::dual(inst.a).contains_word(x));
  }
  StateVector s = inst.state;
  EXPECT_TRUE(verify_with_oracles(inst.primal, inst.dual, s, Register::whole(6), rng));
  EXPECT_NEAR(fidelity(undo_randomization(inst, inst.state, Register::whole(6)), note.state), 1.0, 1e-12);
}

TEST(HsMini, RandomizedSubspaceIsUniform) {
  // f(A) for uniform invertible f is uniform over 2-dim subspaces of F2^4 (35 of them).
  Rng rng(11);
  const Subspace a = Subspace::coordinate(4, 0, 2);
  const StateVector st = subspace_state(a);
  std::map<std::vector<Word>, int> counts;
  const int draws = 7000;
  for (int t = 0; t < draws; ++t) {
    const RandomizedInstance inst = randomize_instance(a, st, PhaseOracle::subspace(a), PhaseOracle::subspace(hsm::dual(a)), rng);
    ++counts[inst.a.basis()];
  }
  EXPECT_EQ(counts.size(), 35u);
  for (const auto& [k, c] : counts) EXPECT_NEAR(c, draws / 35.0, 5 * std::sqrt(draws / 35.0));
}

TEST(HsMini, MiniSchemeProjectiveTarget) {
  Rng rng(12);
  const HsMiniScheme m(make_bundle(4, rng));
  Banknote note = m.bank(rng);
  const auto t = m.projective_target(note.serial);
  ASSERT_TRUE(t);
  EXPECT_NEAR(fidelity(*t, note.state), 1.0, 1e-12);
  EXPECT_TRUE(m.verify(note.serial, note.state, rng));
}

TEST(HsMini, OddDimensionRejected) {
  EXPECT_THROW(OracleBundle(5, 1), std::invalid_argument);
}

}  // namespace
}  // namespace hsm
