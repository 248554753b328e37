#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hsmoney/money.hpp"
#include "hsmoney/qsim.hpp"

namespace hsm {

/// Classical oracle of the hidden-subspace mini-scheme.
///
/// G(r) = (s_r, A_r) for r ∈ {0,1}^n. Serials are 3n-bit strings s_r = π(r · 2^{2n}) for a keyed
/// Feistel permutation π, so they are pairwise distinct and H can be evaluated on any string
/// without materializing G. A_r is drawn from a generator seeded by (key, r) and memoized.
class OracleBundle {
 public:
  OracleBundle(int n, std::uint64_t key);

  int n() const { return n_; }
  int serial_bits() const { return 3 * n_; }
  std::uint64_t key() const { return key_; }

  /// G(r); memoized and thread-safe.
  std::uint64_t serial_of(std::uint64_t r) const;
  Subspace subspace_of(std::uint64_t r) const;

  /// H(s): r when s is a generated serial. Charged to the H counter.
  std::optional<std::uint64_t> lookup(std::uint64_t serial) const;
  /// Same as lookup without charging; for test fixtures and bookkeeping.
  std::optional<std::uint64_t> peek(std::uint64_t serial) const;

  /// T_primal(s) = U_{A_r}; the identity oracle for invalid serials.
  PhaseOracle primal(std::uint64_t serial) const;
  /// T_dual(s) = U_{A_r^⊥}; the identity oracle for invalid serials.
  PhaseOracle dual(std::uint64_t serial) const;

  std::uint64_t h_queries() const { return h_counter_->count(); }
  std::uint64_t primal_queries() const { return primal_counter_->count(); }
  std::uint64_t dual_queries() const { return dual_counter_->count(); }

  Bytes encode_serial(std::uint64_t serial) const;
  /// Throws std::invalid_argument on a wrong length or stray high bits.
  std::uint64_t decode_serial(const Bytes& bytes) const;

  /// JSON {n, key, entries: {r: {serial, basis}}} of every materialized entry.
  std::string snapshot_json() const;
  /// Rebuilds a bundle from a snapshot and checks every listed entry against it.
  static std::shared_ptr<OracleBundle> from_snapshot(const std::string& json);

 private:
  struct Entry {
    Subspace a;
    PhaseOracle primal;
    PhaseOracle dual;
  };
  const Entry& entry(std::uint64_t r) const;
  std::uint64_t permute(std::uint64_t x) const;
  std::uint64_t unpermute(std::uint64_t x) const;

  int n_;
  std::uint64_t key_;
  CounterPtr h_counter_;
  CounterPtr primal_counter_;
  CounterPtr dual_counter_;
  mutable std::mutex mu_;
  mutable std::map<std::uint64_t, std::unique_ptr<Entry>> memo_;
};

std::shared_ptr<OracleBundle> make_bundle(int n, Rng& rng);

struct HsBanknote {
  std::uint64_t serial = 0;
  StateVector state;
};

HsBanknote bank(const OracleBundle& bundle, Rng& rng);

/// V = H P_{A^⊥} H P_A given oracles for the two subspaces; each projection is one query.
bool verify_with_oracles(const PhaseOracle& primal, const PhaseOracle& dual, StateVector& s,
                         Register reg, Rng& rng);

/// Rejects invalid serials via H, otherwise runs the four-step verifier on the register.
bool verify(const OracleBundle& bundle, std::uint64_t serial, StateVector& s, Register reg, Rng& rng);
bool verify(const OracleBundle& bundle, std::uint64_t serial, StateVector& s, Rng& rng);

/// Accept branch of the four-step circuit on an unnormalized vector (no queries charged).
void apply_verifier_circuit(const Subspace& a, std::vector<Amp>& amps);

/// Rank-1 projector onto |A_r>. Throws std::invalid_argument for invalid serials.
Projector verifier_as_projector(const OracleBundle& bundle, std::uint64_t serial);

struct RandomizedInstance {
  LinMap f;
  Subspace a;  // f(A)
  StateVector state;
  PhaseOracle primal;  // x -> [f^{-1} x ∈ A], charged to the original primal oracle
  PhaseOracle dual;    // x -> [f^T x ∈ A^⊥], charged to the original dual oracle
  LinMap undo;         // f^{-1}
};

RandomizedInstance randomize_instance(const Subspace& a, const StateVector& state,
                                      const PhaseOracle& primal, const PhaseOracle& dual, Rng& rng);
RandomizedInstance randomize_instance_with(const LinMap& f, const Subspace& a, const StateVector& state,
                                           const PhaseOracle& primal, const PhaseOracle& dual);
/// Relabels a state from the randomized frame back to the original one.
StateVector undo_randomization(const RandomizedInstance& inst, const StateVector& s, Register reg);

/// The hidden-subspace mini-scheme over one oracle bundle.
class HsMiniScheme final : public MiniScheme {
 public:
  explicit HsMiniScheme(std::shared_ptr<const OracleBundle> bundle);

  std::string name() const override { return "hsmini"; }
  int note_qubits() const override { return bundle_->n(); }
  Banknote bank(Rng& rng) const override;
  std::optional<StateVector> projective_target(const Bytes& serial) const override;
  const OracleBundle& bundle() const { return *bundle_; }

 protected:
  bool do_verify(const Bytes& serial, StateVector& joint, Register reg, Rng& rng) const override;
  double do_accept_probability(const Bytes& serial, const StateVector& joint,
                               Register reg) const override;

 private:
  std::shared_ptr<const OracleBundle> bundle_;
};

}  // namespace hsm
