#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hsmoney/f2lin.hpp"
#include "hsmoney/money.hpp"
#include "hsmoney/qsim.hpp"

namespace hsm {

/// Multilinear polynomial over F₂ of degree ≤ d. A monomial is the bitmask of its variables
/// (bit i is x_{i+1}); the empty mask is the constant 1.
class MultilinearPoly {
 public:
  MultilinearPoly() = default;
  MultilinearPoly(int n_vars, int degree_bound, std::vector<Word> monomials = {});

  static MultilinearPoly zero(int n_vars, int degree_bound) { return {n_vars, degree_bound}; }

  int n_vars() const { return n_; }
  int degree_bound() const { return d_; }
  /// Sorted, duplicate-free.
  const std::vector<Word>& monomials() const { return monomials_; }
  bool is_zero() const { return monomials_.empty(); }
  int degree() const;

  bool eval(const BitVec& v) const;
  bool eval_word(Word v) const {
    bool r = false;
    for (Word m : monomials_) r ^= (v & m) == m;
    return r;
  }

  /// Comma-separated variable indices per monomial (1-based), "-" for the zero polynomial.
  std::string to_text() const;
  static MultilinearPoly from_text(int n_vars, int degree_bound, std::string_view text);

  bool operator==(const MultilinearPoly&) const = default;

 private:
  int n_ = 0;
  int d_ = 0;
  std::vector<Word> monomials_;
};

/// Values p(x) for every x ∈ F₂ⁿ.
std::vector<std::uint8_t> truth_table(const MultilinearPoly& p);
/// Inverse of truth_table; throws std::domain_error if the result exceeds the degree bound.
MultilinearPoly from_truth_table(int n_vars, int degree_bound, std::vector<std::uint8_t> table);

/// q(v) = p(Lv). Throws std::domain_error for singular L.
MultilinearPoly change_basis(const MultilinearPoly& p, const LinMap& l);

/// Uniform element of I_{d,A}, the degree-≤d polynomials vanishing on A.
MultilinearPoly sample_vanishing(const Subspace& a, int d, Rng& rng);

struct PolySystem {
  int n = 0;
  int d = 0;
  double eps = 0.0;
  int hidden_dim = 0;
  std::vector<MultilinearPoly> polys;
  /// Indices sampled from unrelated subspaces; known to the sampler only, not serialized.
  std::vector<int> noisy_positions;

  int m() const { return static_cast<int>(polys.size()); }
  /// Header "n d m eps" followed by one polynomial per line.
  std::string to_text() const;
  static PolySystem from_text(std::string_view text);
};

/// m = ⌈βn⌉.
int system_size(int n, double beta);
/// ⌊εm⌋ polynomials are noisy.
int noisy_count(int m, double eps);

/// m polynomials: ⌊εm⌋ of them at uniformly chosen positions come from I_{d,A′} for fresh
/// uniform A′ of the same dimension; the rest from I_{d,A}.
PolySystem sample_noisy_system(const Subspace& a, int d, int m, double eps, Rng& rng);

/// w(v) = number of polynomials with p(v) = 1, for every v.
std::vector<std::uint16_t> weights(const PolySystem& sys);
int weight(const PolySystem& sys, Word v);

/// Z = {v : w(v) ≤ ⌊εm⌋}.
int zset_threshold(const PolySystem& sys);
bool zset_membership(const PolySystem& sys, const BitVec& v);
/// Z = {v : w(v) ≤ (1+ε)m/4}.
double zset_variant_threshold(const PolySystem& sys);
bool zset_membership_variant(const PolySystem& sys, const BitVec& v);
/// Indicator of Z over all of F₂ⁿ.
std::vector<std::uint8_t> zset_mask(const PolySystem& sys, bool variant = false);
/// True when no polynomial is nonzero, so Z is everything.
bool degenerate(const PolySystem& sys);

struct ExplicitParams {
  int n = 12;
  int d = 4;
  double eps = 0.25;
  double beta = 12.0;
  bool variant = false;
  bool allow_low_degree = false;

  int m() const { return system_size(n, beta); }
  /// Throws std::invalid_argument when the parameters are out of range.
  void validate() const;
};

struct ExplicitNote {
  PolySystem s_a;
  PolySystem s_aperp;
  StateVector state;
};

ExplicitNote bank_explicit(const ExplicitParams& params, Rng& rng);
/// Same, with a caller-chosen hidden subspace.
ExplicitNote bank_explicit(const ExplicitParams& params, const Subspace& a, Rng& rng);

/// Structural check of a serial: sizes, arity and degree against the parameters.
bool well_formed(const ExplicitParams& params, const PolySystem& s_a, const PolySystem& s_aperp);

/// H P_{Z^⊥} H P_Z with Z and Z^⊥ read from the two systems. Malformed serials reject.
bool verify_explicit(const ExplicitParams& params, const PolySystem& s_a, const PolySystem& s_aperp,
                     StateVector& s, Register reg, Rng& rng);
bool verify_explicit(const ExplicitParams& params, const ExplicitNote& note, Rng& rng);
double explicit_accept_probability(const ExplicitParams& params, const PolySystem& s_a,
                                   const PolySystem& s_aperp, const StateVector& s, Register reg);

/// The explicit scheme as a mini-scheme; the serial is the text of both systems.
class ExplicitMiniScheme final : public MiniScheme {
 public:
  explicit ExplicitMiniScheme(ExplicitParams params);

  std::string name() const override { return "explicit"; }
  int note_qubits() const override { return params_.n; }
  Banknote bank(Rng& rng) const override;
  const ExplicitParams& params() const { return params_; }

  static Bytes encode_serial(const PolySystem& s_a, const PolySystem& s_aperp);
  /// Throws std::invalid_argument on malformed input.
  static std::pair<PolySystem, PolySystem> decode_serial(const Bytes& serial);

 protected:
  bool do_verify(const Bytes& serial, StateVector& joint, Register reg, Rng& rng) const override;
  double do_accept_probability(const Bytes& serial, const StateVector& joint,
                               Register reg) const override;

 private:
  struct Masks {
    bool ok = false;
    std::shared_ptr<const std::vector<std::uint8_t>> z;
    std::shared_ptr<const std::vector<std::uint8_t>> zperp;
  };
  Masks masks(const Bytes& serial) const;

  ExplicitParams params_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, Masks> cache_;
};

enum class AttackStatus { kRecovered, kInsufficient, kInconsistent };

struct Degree1Result {
  AttackStatus status = AttackStatus::kInsufficient;
  Subspace recovered;
  int accepted_primal = 0;  // w_j accepted as members of A
  int accepted_dual = 0;    // u_i accepted as members of A^⊥
};

/// Recovers A from degree-1 systems. Throws std::invalid_argument for non-linear input.
Degree1Result degree1_attack(const PolySystem& s_a, const PolySystem& s_aperp);

/// Counterfeiter for the explicit scheme: maps (serial, note) to a two-register state.
using ExplicitCounterfeiter =
    std::function<StateVector(const PolySystem& s_a, const PolySystem& s_aperp, const StateVector& note, Rng& rng)>;

struct SoundnessParams {
  ExplicitParams scheme;
  int harvest = 0;  // measured samples; 0 means 2n
  int max_preparations = 0;  // 0 means 64·harvest
};

struct SoundnessReport {
  bool recovered = false;
  int samples = 0;
  int counterfeiter_calls = 0;
  int preparations = 0;  // projections of the uniform state onto A that succeeded
  int preparation_attempts = 0;
  int span_dim = 0;
};

/// Reduction pipeline: prepare |A⟩ by projecting the uniform state, feed it to the counterfeiter,
/// keep the verified copies, measure them and check whether they span A.
SoundnessReport soundness_experiment(const ExplicitCounterfeiter& forger, const SoundnessParams& params,
                                     Rng& rng);

/// Probability that k uniform samples from an r-dimensional space span it.
double span_probability(int r, int k);

}  // namespace hsm
