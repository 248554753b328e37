#pragma once

#include <array>
#include <atomic>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsmoney/f2lin.hpp"
#include "hsmoney/rng.hpp"

namespace hsm {

using Amp = std::complex<double>;
using Mat2 = std::array<Amp, 4>;  // row-major 2x2

inline constexpr double kTolerance = 1e-9;
inline constexpr int kDefaultQubitCap = 20;

/// Largest simulable register. HSMONEY_MAX_QUBITS overrides the default of 20.
int simulator_qubit_cap();
/// Throws std::length_error when n exceeds the simulator cap.
void check_qubits(int n);

/// Contiguous block of qubits [offset, offset + width). Qubit i is bit i of a basis index.
struct Register {
  int offset = 0;
  int width = 0;

  static Register whole(int n) { return {0, n}; }
  std::uint64_t mask() const { return ((std::uint64_t{1} << width) - 1) << offset; }
  bool operator==(const Register&) const = default;
};

/// Dense pure state on n qubits, kept at unit norm.
class StateVector {
 public:
  StateVector() = default;
  /// |0...0> on n qubits.
  explicit StateVector(int n_qubits);

  static StateVector basis(int n, std::uint64_t index);
  static StateVector uniform(int n);
  /// Normalizes the given amplitudes; throws when they are all zero.
  static StateVector from_amplitudes(int n, std::vector<Amp> amps);

  int qubits() const { return n_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<Amp>& amplitudes() const { return amps_; }
  /// Raw access for kernels; callers must restore unit norm.
  std::vector<Amp>& raw() { return amps_; }
  Amp operator[](std::size_t i) const { return amps_[i]; }

  double norm() const;
  /// Rescales to unit norm; returns the norm before rescaling.
  double normalize();
  /// <this|other>.
  Amp inner(const StateVector& other) const;
  /// this ⊗ high: this occupies the low qubits, high the qubits above them.
  StateVector tensor(const StateVector& high) const;

  std::string dump() const;
  static StateVector from_dump(std::string_view text);

 private:
  int n_ = 0;
  std::vector<Amp> amps_;
};

/// |A> = 2^{-dim/2} Σ_{x∈A} |x>.
StateVector subspace_state(const Subspace& a);

/// Walsh-Hadamard transform on every qubit.
StateVector hadamard_all(StateVector s);
void apply_hadamard(StateVector& s, Register reg);
void apply_1q(StateVector& s, int qubit, const Mat2& m);
void apply_swap(StateVector& s, int a, int b);
/// I − 2|0><0| on the register (free operation).
void reflect_about_zero(StateVector& s, Register reg);
/// new[f(x)] = old[x] on the register; f must be invertible.
StateVector relabel_basis(const StateVector& s, const LinMap& f, Register reg);

/// Monotone, thread-safe query counter shared by the oracles of one component.
class QueryCounter {
 public:
  std::uint64_t count() const { return count_.load(std::memory_order_relaxed); }
  void charge(std::uint64_t k = 1) { count_.fetch_add(k, std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> count_{0};
};
using CounterPtr = std::shared_ptr<QueryCounter>;

/// Diagonal ±1 oracle |x> -> (-1)^{f(x)} |x> with a query counter.
class PhaseOracle {
 public:
  PhaseOracle(int width, std::vector<std::uint8_t> accept_mask, CounterPtr counter = nullptr);

  static PhaseOracle from_predicate(int width, const std::function<bool(std::uint64_t)>& pred,
                                    CounterPtr counter = nullptr);
  /// U_A on n qubits.
  static PhaseOracle subspace(const Subspace& a, CounterPtr counter = nullptr);
  /// U_{A*} on n+1 qubits: flag qubit n selects A (flag 0) or its dual (flag 1).
  static PhaseOracle subspace_star(const Subspace& a, CounterPtr counter = nullptr);
  static PhaseOracle none(int width, CounterPtr counter = nullptr);

  int width() const { return width_; }
  bool accepts(std::uint64_t x) const { return (*mask_)[x] != 0; }
  std::uint64_t accepted_count() const;
  std::uint64_t queries() const { return counter_->count(); }
  const CounterPtr& counter() const { return counter_; }
  void charge(std::uint64_t k = 1) const { counter_->charge(k); }

  /// Oracle accepting x iff this accepts g(x); queries are charged to this oracle's counter.
  PhaseOracle relabeled(const std::function<std::uint64_t(std::uint64_t)>& g) const;

 private:
  int width_;
  std::shared_ptr<const std::vector<std::uint8_t>> mask_;
  CounterPtr counter_;
};

/// Applies the oracle to a register; a controlled application is still one query.
void apply_oracle(const PhaseOracle& u, StateVector& s, Register reg,
                  std::optional<int> control = std::nullopt);
void apply_oracle(const PhaseOracle& u, StateVector& s);

/// Either a basis-subset projector or a rank-1 projector onto a target state.
class Projector {
 public:
  /// Projector onto the oracle's accepted basis states; each measurement costs one query.
  static Projector onto_oracle(PhaseOracle oracle);
  /// Basis-subset projector computed locally (no oracle is consulted).
  static Projector onto_mask(int width, std::shared_ptr<const std::vector<std::uint8_t>> mask);
  static Projector onto_state(StateVector target);

  int width() const { return width_; }
  bool rank_one() const { return target_.has_value(); }
  const StateVector& target() const { return *target_; }

  /// ‖P s‖² on the register, without charging anything.
  double accept_probability(const StateVector& s, Register reg) const;
  /// s <- P s (outcome true) or (I − P) s, unnormalized; returns the squared norm kept.
  double apply_branch(std::vector<Amp>& amps, Register reg, bool outcome) const;
  void charge() const;

 private:
  int width_ = 0;
  std::shared_ptr<const std::vector<std::uint8_t>> mask_;
  std::optional<PhaseOracle> oracle_;
  std::optional<StateVector> target_;
};

struct Measurement {
  bool outcome = false;
  StateVector post_state;
  double accept_probability = 0.0;
};

/// Born-rule measurement of {P, I − P} on a register.
Measurement measure_projector(const Projector& p, StateVector s, Rng& rng, Register reg);
Measurement measure_projector(const Projector& p, StateVector s, Rng& rng);
/// In-place variant; returns the outcome.
bool measure_in_place(const Projector& p, StateVector& s, Rng& rng, Register reg);
/// Deterministic branch selection; throws std::domain_error on a zero-probability branch.
StateVector project(const Projector& p, StateVector s, bool outcome, Register reg);

/// Measures the given qubits in the computational basis; returns the outcome bits.
std::uint64_t measure_register(StateVector& s, Register reg, Rng& rng);

StateVector haar_random_state(int n, Rng& rng);

/// |<a|b>|.
double fidelity(const StateVector& a, const StateVector& b);
/// sqrt(1 − |<a|b>|²).
double trace_distance(const StateVector& a, const StateVector& b);

}  // namespace hsm
