#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "hsmoney/f2lin.hpp"
#include "hsmoney/qsim.hpp"
#include "hsmoney/signature.hpp"

namespace hsm {

enum class Bb84 : std::uint8_t { kZero, kOne, kPlus, kMinus };

inline constexpr std::array<Bb84, 4> kBb84States = {Bb84::kZero, Bb84::kOne, Bb84::kPlus, Bb84::kMinus};

using Qubit = std::array<Amp, 2>;

Qubit bb84_state(Bb84 b);
const char* bb84_name(Bb84 b);
/// |<a|b>|² for two single-qubit states.
double overlap2(const Qubit& a, const Qubit& b);

/// Product-state Wiesner note; the classical description stays with the bank.
struct WiesnerNote {
  std::uint64_t serial = 0;
  std::vector<Qubit> qubits;
};

/// Private-key bank that measures each qubit in its recorded basis and hands back the
/// post-measurement state whatever the outcome.
class NaiveBank {
 public:
  WiesnerNote mint(int n, Rng& rng);
  /// Throws std::out_of_range for unknown serials. The note is replaced by the post-measurement state.
  bool verify(std::uint64_t serial, std::vector<Qubit>& state, Rng& rng) const;
  double accept_probability(std::uint64_t serial, const std::vector<Qubit>& state) const;

  /// Re-inserts a record exported earlier; throws if the serial is already present.
  void restore(std::uint64_t serial, std::vector<Bb84> record);
  /// The bank's record, for test oracles and export.
  std::vector<Bb84> record(std::uint64_t serial) const;
  std::uint64_t verifications() const;

 private:
  mutable std::mutex mu_;
  std::map<std::uint64_t, std::vector<Bb84>> db_;
  mutable std::uint64_t verifications_ = 0;
};

WiesnerNote wiesner_bank(NaiveBank& bank, int n, Rng& rng);
bool wiesner_verify(const NaiveBank& bank, std::uint64_t serial, std::vector<Qubit>& state, Rng& rng);

/// Single-qubit cloning channel as an isometry C² → (copy 1) ⊗ (copy 2) ⊗ C^env.
/// Column j holds V|j⟩ indexed by copy1 + 2·copy2 + 4·env.
struct CloningIsometry {
  int env_dim = 1;
  std::array<std::vector<Amp>, 2> columns;

  /// Probability that both copies of |θ⟩ pass verification.
  double success(Bb84 theta) const;
  /// Average over the four BB84 states.
  double average_success() const;
};

/// Measure in the computational basis and resend two copies of the outcome.
CloningIsometry measure_and_resend();

struct ClonerSearchResult {
  CloningIsometry best;
  double success = 0.0;
  int restarts = 0;
};

/// Derivative-free maximization of average_success over isometries with env_dim 2.
ClonerSearchResult optimize_cloner(int restarts, Rng& rng, int env_dim = 2);

/// Applies the channel to every qubit of a note and verifies both copies; true when both pass.
bool clone_and_verify(const NaiveBank& bank, const WiesnerNote& note, const CloningIsometry& channel, Rng& rng);

/// ⌈8·log₂(4n)⌉.
int default_samples_per_candidate(int n);

struct AdaptiveResult {
  std::vector<Bb84> recovered;
  /// pass_rates[i][b]: observed pass rate of candidate b at qubit i.
  std::vector<std::array<double, 4>> pass_rates;
  std::uint64_t queries = 0;
};

/// Swap-out attack: for each qubit, replace it by each candidate and count passes over the
/// same note; the other qubits come back from the bank unchanged.
AdaptiveResult adaptive_attack(const NaiveBank& bank, WiesnerNote note, int samples_per_candidate, Rng& rng);

enum class KeyedBackend { kPrf, kRandomFunction };

/// Query-secure variant: the note for serial s is |A_{k,s}⟩ and Ver is the projector onto it.
class KeyedSubspaceBank {
 public:
  KeyedSubspaceBank(int n, Bytes key, KeyedBackend backend = KeyedBackend::kPrf, std::uint64_t rf_seed = 0);
  static KeyedSubspaceBank random(int n, Rng& rng, KeyedBackend backend = KeyedBackend::kPrf);

  int n() const { return n_; }
  KeyedBackend backend() const { return backend_; }
  Subspace subspace(std::uint64_t serial) const;

  std::uint64_t mint_serial(Rng& rng) const { return rng.next_u64(); }
  StateVector note(std::uint64_t serial) const { return subspace_state(subspace(serial)); }
  /// Rank-1 projective measurement on the register; collapses the state.
  bool verify(std::uint64_t serial, StateVector& s, Register reg, Rng& rng) const;
  bool verify(std::uint64_t serial, StateVector& s, Rng& rng) const;
  double accept_probability(std::uint64_t serial, const StateVector& s, Register reg) const;
  std::uint64_t verifications() const;

 private:
  Subspace prf_subspace(std::uint64_t serial) const;

  int n_;
  Bytes key_;
  KeyedBackend backend_;
  mutable std::mutex mu_;
  mutable Rng rf_rng_;
  mutable std::map<std::uint64_t, Subspace> table_;
  mutable std::uint64_t verifications_ = 0;
};

struct KeyedAttackResult {
  std::vector<std::array<double, 4>> pass_rates;
  std::vector<Bb84> argmax;
  double mean_spread = 0.0;       // mean over qubits of max − min candidate rate
  double null_spread_mean = 0.0;  // same statistic with no candidate dependence
  double null_spread_sd = 0.0;
  std::uint64_t queries = 0;

  /// Whether the observed spread stays within 3σ of the null.
  bool no_information() const { return mean_spread <= null_spread_mean + 3.0 * null_spread_sd; }
};

/// The swap-out attack transplanted onto a keyed note: qubit i is parked in an ancilla while
/// candidates are tried in random interleaved order.
KeyedAttackResult keyed_transplanted_attack(const KeyedSubspaceBank& bank, std::uint64_t serial,
                                            int samples_per_candidate, Rng& rng, int null_resamples = 2000);

/// Mean over qubits of max − min for the observed rate table, plus its null distribution obtained
/// by redrawing each qubit's four rates from Binomial(samples, that qubit's pooled rate).
struct SpreadStatistic {
  double observed = 0.0;
  double null_mean = 0.0;
  double null_sd = 0.0;
};
SpreadStatistic spread_statistic(const std::vector<std::array<double, 4>>& rates, int samples, Rng& rng,
                                 int null_resamples);

}  // namespace hsm
