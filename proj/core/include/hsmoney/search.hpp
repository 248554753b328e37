#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "hsmoney/calibration.hpp"
#include "hsmoney/qsim.hpp"

namespace hsm {

/// Reflection I − 2P about a subspace, with access to the matching projective measurement.
class ReflectionOracle {
 public:
  explicit ReflectionOracle(CounterPtr counter);
  virtual ~ReflectionOracle() = default;

  /// Number of qubits of the states it acts on.
  virtual int qubits() const = 0;
  /// s <- (I − 2P) s. Charged.
  virtual void reflect(StateVector& s) const = 0;
  /// Projective measurement {P, I − P}, charged as one controlled reflection.
  virtual bool measure(StateVector& s, Rng& rng) const = 0;
  /// ‖P s‖², uncharged; for analysis only.
  virtual double accept_probability(const StateVector& s) const = 0;

  std::uint64_t queries() const { return counter_->count(); }
  const CounterPtr& counter() const { return counter_; }
  void charge(std::uint64_t k = 1) const { counter_->charge(k); }

 protected:
  CounterPtr counter_;
};

using ReflectionPtr = std::shared_ptr<const ReflectionOracle>;

/// Reflection flipping the basis states accepted by a phase oracle on a register.
class SubsetReflection final : public ReflectionOracle {
 public:
  SubsetReflection(PhaseOracle oracle, int total_qubits, Register reg);
  SubsetReflection(PhaseOracle oracle);

  int qubits() const override { return qubits_; }
  void reflect(StateVector& s) const override;
  bool measure(StateVector& s, Rng& rng) const override;
  double accept_probability(const StateVector& s) const override;

 private:
  PhaseOracle oracle_;
  Projector projector_;
  int qubits_;
  Register reg_;
};

/// Reflection about a single state on a register.
class StateReflection final : public ReflectionOracle {
 public:
  StateReflection(StateVector target, int total_qubits, Register reg, CounterPtr counter = nullptr);
  explicit StateReflection(StateVector target, CounterPtr counter = nullptr);

  int qubits() const override { return qubits_; }
  void reflect(StateVector& s) const override;
  bool measure(StateVector& s, Rng& rng) const override;
  double accept_probability(const StateVector& s) const override;
  const StateVector& target() const { return projector_.target(); }

 private:
  Projector projector_;
  int qubits_;
  Register reg_;
};

/// Reflection assembled from callables; used for composite verifiers.
class CallbackReflection final : public ReflectionOracle {
 public:
  struct Ops {
    int qubits = 0;
    std::function<void(StateVector&)> reflect;
    std::function<bool(StateVector&, Rng&)> measure;
    std::function<double(const StateVector&)> accept_probability;
  };
  CallbackReflection(Ops ops, CounterPtr counter);

  int qubits() const override { return ops_.qubits; }
  void reflect(StateVector& s) const override { ops_.reflect(s); }
  bool measure(StateVector& s, Rng& rng) const override { return ops_.measure(s, rng); }
  double accept_probability(const StateVector& s) const override { return ops_.accept_probability(s); }

 private:
  Ops ops_;
};

struct SearchProblem {
  ReflectionPtr init;  // reflection about |Init>
  ReflectionPtr goal;  // reflection flipping G
  StateVector init_state;
};

/// Goal fidelity F(|psi>, G) = ‖P_G psi‖.
double goal_fidelity(const SearchProblem& p, const StateVector& s);

/// s <- Q s with Q = −U_Init U_G (two queries).
void grover_iterate(const SearchProblem& p, StateVector& s);
/// s <- Q^{-1} s = −U_G U_Init s (two queries).
void grover_iterate_inverse(const SearchProblem& p, StateVector& s);

/// Q^T |Init>; goal fidelity |sin((2T+1)θ)|. Charges T queries to each of U_G and U_Init.
StateVector amplitude_amplify(const SearchProblem& p, int T);

/// Reflection about |Φ_T> = Q^T |Init>.
///
/// The default mode applies the operator from a cached |Φ_T> and charges the oracle calls
/// of the literal circuit Q^T U_Init Q^{-T}: 2T+1 calls to U_Init and 2T calls to U_G.
/// Literal mode runs that circuit and is used to cross-check the cached path.
class AmplifiedReflection final : public ReflectionOracle {
 public:
  AmplifiedReflection(SearchProblem problem, int T, StateVector phi_t, bool literal = false);

  int qubits() const override { return problem_.init_state.qubits(); }
  void reflect(StateVector& s) const override;
  bool measure(StateVector& s, Rng& rng) const override;
  double accept_probability(const StateVector& s) const override;

 private:
  void charge_literal_cost() const;
  SearchProblem problem_;
  int T_;
  StateReflection cached_;
  bool literal_;
};

struct FixedPointResult {
  StateVector state;
  int rounds = 0;      // goal measurements performed
  bool found = false;  // last goal measurement accepted
};

/// Measurement-alternation fixed-point search.
///
/// Each round measures the goal projector; on acceptance the search stops (the state is in G).
/// On rejection it measures the projector onto |Init>, landing either back on |Init> or in the
/// complementary branch, and the next round re-tests the goal. At most T rounds.
FixedPointResult fixed_point_search(const SearchProblem& p, int T, Rng& rng);

/// Goal fidelity of the state after each of T rounds; entry t − 1 is the output a search capped
/// at t rounds would return on the same random draws.
std::vector<double> fixed_point_trace(const SearchProblem& p, int T, Rng& rng);

/// ⌈(1/ε²)·ln(1/δ)/c⌉.
int fixed_point_rounds(double eps, double delta, double calib_c = kFixedPointC);

struct SearchParams {
  double eps = 0.1;
  double delta = 0.2;
  double calib_c = kFixedPointC;
  double l_const = 100.0;
  double r_const = 25.0;
  /// Throw when delta < 2·eps.
  bool enforce_delta_bound = true;

  double xi() const;
  std::int64_t L() const;
  std::int64_t R() const;
  void validate() const;
};

struct HybridResult {
  StateVector state;
  std::uint64_t queries = 0;  // U_Init plus U_G calls made during this run
  std::int64_t T = 0;
  std::int64_t R = 0;
  int rounds = 0;
  bool found = false;
};

/// Random T in {0..L}, T amplitude-amplification iterations, then fixed-point search from
/// |Φ_T> for up to R rounds.
HybridResult hybrid_search(const SearchProblem& p, const SearchParams& params, Rng& rng);

/// Search instance on n qubits: the goal marks `marked` distinct basis states and |Init> has goal
/// fidelity exactly eps, with the rest of its weight spread randomly over unmarked states.
SearchProblem planted_instance(int n, double eps, int marked, Rng& rng);

/// Number of integers T in {0..L} with |T − (β·k + γ)| < η for some integer k.
std::int64_t count_near_lattice(std::int64_t L, double beta, double eta, double gamma);
/// (L/β + 1)(2η + 1).
double near_lattice_bound(std::int64_t L, double beta, double eta);

}  // namespace hsm
