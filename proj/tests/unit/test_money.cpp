#include <gtest/gtest.h>

#include <cmath>

#include "hsmoney/composite.hpp"
#include "hsmoney/hsmini.hpp"
#include "hsmoney/money.hpp"
#include "hsmoney/signature.hpp"

namespace hsm {
namespace {

Bytes msg(const std::string& s) { return Bytes(s.begin(), s.end()); }

TEST(Signature, SignVerifyAndTamper) {
  Rng rng(1);
  const MerkleLamport sch(3);
  SigKeyPair kp = sch.keygen(rng);
  const Bytes m = msg("serial-0001");
  const Bytes sig = sch.sign(*kp.secret, m);
  EXPECT_EQ(sig.size(), sch.signature_bytes());
  EXPECT_EQ(sch.verify(kp.public_key, m, sig), SigVerdict::kValid);
  EXPECT_EQ(sch.verify(kp.public_key, msg("serial-0002"), sig), SigVerdict::kInvalid);
  Bytes bad = sig;
  bad[100] ^= 1;
  EXPECT_EQ(sch.verify(kp.public_key, m, bad), SigVerdict::kInvalid);
  bad.pop_back();
  EXPECT_EQ(sch.verify(kp.public_key, m, bad), SigVerdict::kMalformed);
}

TEST(Signature, KeyExhaustion) {
  Rng rng(2);
  const MerkleLamport sch(2);
  SigKeyPair kp = sch.keygen(rng);
  for (int i = 0; i < 4; ++i) {
    const Bytes m = msg("m" + std::to_string(i));
    EXPECT_TRUE(sch.sverify(kp.public_key, m, sch.sign(*kp.secret, m)));
  }
  EXPECT_THROW(sch.sign(*kp.secret, msg("m4")), KeyExhausted);
}

TEST(Signature, HexRoundTrip) {
  const Bytes b{0x00, 0xab, 0xff};
  EXPECT_EQ(to_hex(b), "00abff");
  EXPECT_EQ(from_hex("00abff"), b);
  EXPECT_THROW(from_hex("0g"), std::invalid_argument);
}

class MoneyFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng brng(10);
    mini = std::make_shared<HsMiniScheme>(make_bundle(6, brng));
    money = standard_construction(mini, std::make_shared<MerkleLamport>(4));
    Rng krng(11);
    keys = money->keygen(krng);
  }
  std::shared_ptr<HsMiniScheme> mini;
  std::shared_ptr<MoneyScheme> money;
  MoneyKeys keys;
};

TEST_F(MoneyFixture, HonestNotesAccept) {
  Rng rng(12);
  for (int i = 0; i < 10; ++i) {
    const MoneyNote n = money->bank(keys, rng);
    EXPECT_TRUE(money->verify(keys.public_key, n, rng));
  }
}

TEST_F(MoneyFixture, ForgedSignatureRejects) {
  Rng rng(13);
  MoneyNote n = money->bank(keys, rng);
  n.signature[5] ^= 0x40;
  EXPECT_FALSE(money->verify(keys.public_key, n, rng));
}

TEST_F(MoneyFixture, CountNotesOnSharedRegister) {
  Rng rng(14);
  std::vector<MoneyNote> notes{money->bank(keys, rng), money->bank(keys, rng)};
  EXPECT_EQ(count_notes(*money, keys.public_key, notes, rng), 2);
  // The same note twice: the second copy carries a foreign state.
  notes[1].serial = notes[0].serial;
  notes[1].signature = notes[0].signature;
  int total = 0;
  for (int t = 0; t < 200; ++t) total += count_notes(*money, keys.public_key, notes, rng);
  EXPECT_LT(total, 2 * 200);
}

TEST_F(MoneyFixture, MiniFromMoneyRoundTrip) {
  Rng rng(15);
  const MiniFromMoney mm(money, keys);
  Banknote b = mm.bank(rng);
  const auto [pk, label] = MiniFromMoney::decode_serial(b.serial);
  EXPECT_EQ(pk, keys.public_key);
  EXPECT_EQ(MiniFromMoney::encode_serial(pk, label), b.serial);
  EXPECT_TRUE(mm.verify(b.serial, b.state, rng));
  EXPECT_THROW(MiniFromMoney::decode_serial(Bytes{1, 2}), std::invalid_argument);
}

TEST_F(MoneyFixture, BanknoteJson) {
  const Bytes s{1, 2, 3}, g{9};
  const BanknoteRecord r = banknote_from_json(banknote_to_json(s, g, "note.state"));
  EXPECT_EQ(r.serial, s);
  EXPECT_EQ(r.signature, g);
  EXPECT_EQ(r.state_ref, "note.state");
}

TEST_F(MoneyFixture, Verify2ProbabilityExact) {
  Rng rng(16);
  Banknote b = mini->bank(rng);
  const StateVector junk = haar_random_state(6, rng);
  const double f = std::norm(b.state.inner(junk));
  EXPECT_NEAR(verify2_probability(*mini, b.serial, b.state.tensor(junk)), f, 1e-12);
  EXPECT_NEAR(verify2_probability(*mini, b.serial, b.state.tensor(b.state)), 1.0, 1e-12);
}

TEST_F(MoneyFixture, NoisyVerifierRate) {
  Rng rng(17);
  const NoisyVerifierScheme noisy(mini, 0.3);
  int acc = 0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    Banknote b = noisy.bank(rng);
    acc += noisy.verify(b.serial, b.state, rng);
  }
  EXPECT_NEAR(acc / double(trials), 0.7, 4 * std::sqrt(0.21 / trials));
  EXPECT_NEAR(noisy.completeness_error(), 0.3, 1e-12);
}

TEST_F(MoneyFixture, CompositeThresholdAndCompleteness) {
  auto noisy = std::make_shared<NoisyVerifierScheme>(mini, 0.2);
  const auto comp = amplify_completeness(noisy, 20, 0.1);
  EXPECT_EQ(comp->threshold(), 14);  // ceil(0.7 * 20)
  Rng rng(18);
  // Exact: P[Bin(20, 0.8) < 14].
  double exact = 0.0;
  for (int j = 0; j < 14; ++j) exact += std::exp(std::lgamma(21) - std::lgamma(j + 1) - std::lgamma(21 - j)) *
                                       std::pow(0.8, j) * std::pow(0.2, 20 - j);
  int rej = 0;
  const int trials = 3000;
  for (int t = 0; t < trials; ++t) {
    CompositeNote n = comp->bank(rng);
    rej += !comp->verify(n.serials, n.states, rng);
  }
  EXPECT_NEAR(rej / double(trials), exact, 4 * std::sqrt(exact * (1 - exact) / trials));
  EXPECT_THROW(amplify_completeness(noisy, 20, 0.4), std::invalid_argument);
}

TEST_F(MoneyFixture, ReductionPreservesSlotStatistics) {
  auto noisy = std::make_shared<NoisyVerifierScheme>(mini, 0.0);
  const auto comp = amplify_completeness(noisy, 10, 0.1);
  ScriptedCompositeCounterfeiter forger(mini, 3);
  Rng rng(19);
  int ok = 0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    const Banknote target = mini->bank(rng);
    auto [a, b] = reduce_composite_counterfeiter(*comp, forger, target, rng);
    ok += verify2(*mini, target.serial, a, b, rng);
  }
  // The target lands in a junk slot with probability 3/10.
  EXPECT_NEAR(ok / double(trials), 0.7, 4 * std::sqrt(0.21 / trials));
}

}  // namespace
}  // namespace hsm
