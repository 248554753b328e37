#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsmoney/qsim.hpp"
#include "hsmoney/signature.hpp"

namespace hsm {

/// Serial number plus money state. Serials are opaque byte strings.
struct Banknote {
  Bytes serial;
  StateVector state;
};

/// Mini-scheme: Bank issues one (serial, state) pair; Ver checks a state against a serial.
class MiniScheme {
 public:
  MiniScheme();
  virtual ~MiniScheme() = default;

  virtual std::string name() const = 0;
  virtual int note_qubits() const = 0;
  virtual Banknote bank(Rng& rng) const = 0;
  /// Rank-1 state the verifier projects onto, for projective schemes.
  virtual std::optional<StateVector> projective_target(const Bytes& /*serial*/) const {
    return std::nullopt;
  }
  virtual double completeness_error() const { return 0.0; }

  /// Verifies register `reg` of a joint state, collapsing it to the post-measurement state.
  bool verify(const Bytes& serial, StateVector& joint, Register reg, Rng& rng) const;
  bool verify(const Bytes& serial, StateVector& state, Rng& rng) const;
  /// Acceptance probability without disturbing the state.
  double accept_probability(const Bytes& serial, const StateVector& joint, Register reg) const;

  /// Verifier invocations so far.
  std::uint64_t verifications() const { return verify_counter_->count(); }
  const CounterPtr& verify_counter() const { return verify_counter_; }

 protected:
  virtual bool do_verify(const Bytes& serial, StateVector& joint, Register reg, Rng& rng) const = 0;
  virtual double do_accept_probability(const Bytes& serial, const StateVector& joint,
                                       Register reg) const = 0;

 private:
  CounterPtr verify_counter_;
};

/// Double verifier: Ver on register 0, then on register 1 of a 2-note joint state.
bool verify2(const MiniScheme& m, const Bytes& serial, StateVector& joint, Rng& rng);
bool verify2(const MiniScheme& m, const Bytes& serial, const StateVector& first,
             const StateVector& second, Rng& rng);
/// Exact Ver2 acceptance probability for projective schemes.
double verify2_probability(const MiniScheme& m, const Bytes& serial, const StateVector& joint);

/// Mini-scheme whose verifier additionally rejects with a fixed probability.
class NoisyVerifierScheme final : public MiniScheme {
 public:
  NoisyVerifierScheme(std::shared_ptr<const MiniScheme> base, double reject_probability);

  std::string name() const override;
  int note_qubits() const override { return base_->note_qubits(); }
  Banknote bank(Rng& rng) const override { return base_->bank(rng); }
  double completeness_error() const override;
  const MiniScheme& base() const { return *base_; }

 protected:
  bool do_verify(const Bytes& serial, StateVector& joint, Register reg, Rng& rng) const override;
  double do_accept_probability(const Bytes& serial, const StateVector& joint,
                               Register reg) const override;

 private:
  std::shared_ptr<const MiniScheme> base_;
  double reject_probability_;
};

struct MoneyKeys {
  std::shared_ptr<SigningKey> secret;
  Bytes public_key;
};

struct MoneyNote {
  Bytes serial;
  Bytes signature;
  StateVector state;
};

/// Classical part of a note, used when the states live in a shared register.
struct NoteLabel {
  Bytes serial;
  Bytes signature;
};

/// Public-key money scheme (KeyGen, Bank, Ver).
class MoneyScheme {
 public:
  virtual ~MoneyScheme() = default;
  virtual std::string name() const = 0;
  virtual int note_qubits() const = 0;
  virtual MoneyKeys keygen(Rng& rng) const = 0;
  virtual MoneyNote bank(const MoneyKeys& keys, Rng& rng) const = 0;
  virtual bool verify(const Bytes& pk, const NoteLabel& label, StateVector& joint, Register reg,
                      Rng& rng) const = 0;
  virtual double accept_probability(const Bytes& pk, const NoteLabel& label,
                                    const StateVector& joint, Register reg) const = 0;
  bool verify(const Bytes& pk, const MoneyNote& note, Rng& rng) const;
};

/// Money counter: verifies each note in index order on the shared register and counts accepts.
int count_notes(const MoneyScheme& s, const Bytes& pk, std::span<const NoteLabel> labels,
                StateVector& joint, Rng& rng);
int count_notes(const MoneyScheme& s, const Bytes& pk, std::span<const MoneyNote> notes, Rng& rng);

/// Mini-scheme plus a signature on the serial number.
class StandardMoneyScheme final : public MoneyScheme {
 public:
  StandardMoneyScheme(std::shared_ptr<const MiniScheme> mini,
                      std::shared_ptr<const SignatureScheme> signatures);

  std::string name() const override;
  int note_qubits() const override { return mini_->note_qubits(); }
  MoneyKeys keygen(Rng& rng) const override;
  MoneyNote bank(const MoneyKeys& keys, Rng& rng) const override;
  bool verify(const Bytes& pk, const NoteLabel& label, StateVector& joint, Register reg,
              Rng& rng) const override;
  double accept_probability(const Bytes& pk, const NoteLabel& label, const StateVector& joint,
                            Register reg) const override;
  using MoneyScheme::verify;

  const MiniScheme& mini() const { return *mini_; }

 private:
  std::shared_ptr<const MiniScheme> mini_;
  std::shared_ptr<const SignatureScheme> signatures_;
};

std::shared_ptr<MoneyScheme> standard_construction(std::shared_ptr<const MiniScheme> mini,
                                                   std::shared_ptr<const SignatureScheme> signatures);

/// A money scheme used as a mini-scheme: the serial is pk ‖ serial ‖ signature.
class MiniFromMoney final : public MiniScheme {
 public:
  MiniFromMoney(std::shared_ptr<const MoneyScheme> money, MoneyKeys keys);

  std::string name() const override;
  int note_qubits() const override { return money_->note_qubits(); }
  Banknote bank(Rng& rng) const override;

  static Bytes encode_serial(const Bytes& pk, const NoteLabel& label);
  /// Throws std::invalid_argument on a malformed serial.
  static std::pair<Bytes, NoteLabel> decode_serial(const Bytes& serial);

 protected:
  bool do_verify(const Bytes& serial, StateVector& joint, Register reg, Rng& rng) const override;
  double do_accept_probability(const Bytes& serial, const StateVector& joint,
                               Register reg) const override;

 private:
  std::shared_ptr<const MoneyScheme> money_;
  MoneyKeys keys_;
};

/// Banknote wire format {"serial": hex, "sig": hex, "state_ref": path}.
std::string banknote_to_json(const Bytes& serial, const Bytes& signature, const std::string& state_ref);
struct BanknoteRecord {
  Bytes serial;
  Bytes signature;
  std::string state_ref;
};
BanknoteRecord banknote_from_json(const std::string& text);

}  // namespace hsm
