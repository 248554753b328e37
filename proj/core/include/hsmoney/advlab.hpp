#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hsmoney/calibration.hpp"
#include "hsmoney/money.hpp"
#include "hsmoney/qsim.hpp"
#include "hsmoney/search.hpp"

namespace hsm {

/// One side of an oracle pair: the money state handed to the algorithm and the oracle it may query.
struct OracleInstance {
  int oracle_qubits = 0;
  StateVector note;
  /// One query on the given register.
  std::function<void(StateVector&, Register)> apply;
};

struct OraclePair {
  OracleInstance u;
  OracleInstance v;
};

/// Symmetric relation on oracles; sample() returns a related pair (U, V) with U ≠ V.
class PairRelation {
 public:
  virtual ~PairRelation() = default;
  virtual std::string name() const = 0;
  /// The relation's ε.
  virtual double epsilon() const = 0;
  virtual OraclePair sample(Rng& rng) const = 0;
};

/// (A, B) with dim(A ∩ B) = n/2 − 1; oracle U_{A*} on n + 1 qubits, note |A⟩; ε = 2^{−n/2}.
class NeighborSubspaceRelation final : public PairRelation {
 public:
  explicit NeighborSubspaceRelation(int n);
  std::string name() const override { return "neighbor-subspace"; }
  double epsilon() const override;
  OraclePair sample(Rng& rng) const override;
  int n() const { return n_; }

 private:
  int n_;
};

/// Haar states with |⟨ψ|ϕ⟩| = c; the oracle is the reflection about the state.
class HaarOverlapRelation final : public PairRelation {
 public:
  HaarOverlapRelation(int n, double c);
  std::string name() const override { return "haar-overlap"; }
  /// 1 − c², the probability mass one state places outside the other.
  double epsilon() const override { return 1.0 - c_ * c_; }
  OraclePair sample(Rng& rng) const override;

 private:
  int n_;
  double c_;
};

/// Oracle-parametric algorithm: identical non-query operations on both sides of a pair.
class ProbeAlgorithm {
 public:
  virtual ~ProbeAlgorithm() = default;
  virtual std::string name() const = 0;
  /// Simulated starting state; the note sits in the low qubits.
  virtual StateVector start(const OracleInstance& o) const;
  /// Non-query operations for step t followed by exactly one query.
  virtual void step(int t, StateVector& s, const OracleInstance& o, Rng& rng) const = 0;
  /// |⟨note_U|note_V⟩| factor for probes that leave the note register out of the simulation.
  virtual bool simulates_note() const { return true; }
};

/// Makes no queries; its trace is constant.
class NullProbe final : public ProbeAlgorithm {
 public:
  std::string name() const override { return "null"; }
  void step(int, StateVector&, const OracleInstance&, Rng&) const override {}
};

/// Hadamard on every qubit, then a query.
class HadamardWalkProbe final : public ProbeAlgorithm {
 public:
  std::string name() const override { return "hadamard-walk"; }
  void step(int t, StateVector& s, const OracleInstance& o, Rng& rng) const override;
};

/// Random single-qubit layer, then a query.
class RandomLayerProbe final : public ProbeAlgorithm {
 public:
  std::string name() const override { return "random-layer"; }
  void step(int t, StateVector& s, const OracleInstance& o, Rng& rng) const override;
};

/// Alternates primal and dual queries with Hadamards on the note, as repeated verification does.
class VerifierLoopProbe final : public ProbeAlgorithm {
 public:
  std::string name() const override { return "verifier-loop"; }
  void step(int t, StateVector& s, const OracleInstance& o, Rng& rng) const override;
};

/// Amplitude amplification toward the primal subspace from the uniform state, on a fresh
/// register; the note is never touched and enters the trace as a constant factor.
class AmplitudeClonerProbe final : public ProbeAlgorithm {
 public:
  std::string name() const override { return "amplitude-cloner"; }
  StateVector start(const OracleInstance& o) const override;
  void step(int t, StateVector& s, const OracleInstance& o, Rng& rng) const override;
  bool simulates_note() const override { return false; }
};

std::vector<std::shared_ptr<const ProbeAlgorithm>> probe_suite();

struct ProgressTrace {
  std::string probe;
  std::vector<double> p;     // p[t], t = 0..T
  std::vector<double> p_sd;  // standard error of p[t]
  std::vector<double> drop;  // mean of p[t−1] − p[t] over pairs, t = 1..T
  std::vector<double> drop_sd;
  double eps_bound = 0.0;  // 4√ε
  int pairs = 0;

  double max_drop() const;
  /// Largest drop minus three of its standard errors.
  double max_drop_minus_3sigma() const;
};

ProgressTrace track_progress(const ProbeAlgorithm& algorithm, const PairRelation& relation, int queries,
                             int pairs, Rng& rng);

/// Unitary counterfeiter on two note registers: register 0 = [0, q) holds the input note,
/// register 1 = [q, 2q) starts in |0⟩; both are candidate notes afterwards.
class Counterfeiter {
 public:
  virtual ~Counterfeiter() = default;
  virtual int note_qubits() const = 0;
  int total_qubits() const { return 2 * note_qubits(); }
  virtual void apply(StateVector& s) const = 0;
  virtual void apply_inverse(StateVector& s) const = 0;
};

/// C = I ⊗ W with W|0⟩ = cos γ |ψ⟩ + sin γ |junk⟩, W a Householder reflection.
class PlantedCloner final : public Counterfeiter {
 public:
  /// junk is a basis state orthogonal to target.
  PlantedCloner(StateVector target, double pass_probability);
  int note_qubits() const override { return target_.qubits(); }
  void apply(StateVector& s) const override;
  void apply_inverse(StateVector& s) const override { apply(s); }
  const StateVector& image_of_zero() const { return w0_; }

 private:
  StateVector target_;
  StateVector w0_;
  std::vector<Amp> u_;  // Householder vector
};

/// Throws std::invalid_argument when C⁻¹C deviates from the identity or C is not norm-preserving.
void check_unitary(const Counterfeiter& c, Rng& rng, double tol = 1e-9);

struct AmplifyResult {
  StateVector state;
  std::uint64_t queries = 0;  // Ver plus C/C⁻¹ calls
  int rounds = 0;
  bool found = false;
  double budget = 0.0;              // K·ln(1/δ)/(√ε(√ε + δ²))
  double initial_pass = 0.0;        // exact Ver2 pass probability of C|note⟩|0⟩
  bool eps_claim_violated = false;  // initial pass well below the claimed ε
};

/// log(1/δ)/(√ε(√ε + δ²)).
double amplification_budget(double eps, double delta);

/// Fixed-point search with C|note⟩|0⟩ as start and the accepting subspace of Ver2 as goal.
/// Requires a projective mini-scheme.
AmplifyResult amplify_counterfeiter(const Counterfeiter& c, const MiniScheme& scheme, const Bytes& serial,
                                    const StateVector& note, double eps, double delta, Rng& rng,
                                    double calib_k = kAmplifyK);

struct CloneResult {
  StateVector state;
  std::uint64_t queries = 0;
  int iterations = 0;  // Grover iterations over all attempts
  int attempts = 0;
  bool found = false;
  double fidelity = 0.0;
};

/// Amplitude amplification from start toward the target reflection. The first attempt uses
/// ⌊π/(4θ)⌋ iterations for sin θ = overlap_hint; retries draw the count uniformly below it.
CloneResult clone_by_search(const ReflectionOracle& target, const StateVector& start, double overlap_hint,
                            Rng& rng, int max_attempts = 64);

/// Goal probability after T iterations of amplitude amplification with start overlap² o2.
double plane_success_probability(double o2, int T);

/// |ψ⟩^{⊗k}.
StateVector tensor_power(const StateVector& psi, int k);

/// Normalized projection of |ψ⟩^{⊗k} ⊗ |u⟩ onto the symmetric subspace, as a full state.
StateVector kcopy_start_state(const StateVector& psi, const StateVector& u, int k);

/// |⟨ψ^{⊗k+1}| Sym(ψ^{⊗k} ⊗ u)⟩|² = o²(k+1)/(1 + k·o²) with o = |⟨ψ|u⟩|.
double kcopy_start_overlap2(double o2, int k);

struct KcopyReport {
  int n = 0;
  int k = 0;
  std::vector<std::uint64_t> queries;  // per trial
  double median_queries = 0.0;
  double scale = 0.0;  // 2^{n/2}/√(k+1)
};

/// Search cost of a (k+1)-th copy of a Haar state given k copies and a uniform register; run in the
/// two-dimensional plane spanned by the start and goal states.
KcopyReport kcopy_experiment(int n, int k, int trials, Rng& rng);

double median(std::vector<double> v);

}  // namespace hsm
