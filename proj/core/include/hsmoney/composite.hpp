#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "hsmoney/money.hpp"

namespace hsm {

/// k independent notes of a base mini-scheme, held as a product of per-note states.
struct CompositeNote {
  std::vector<Bytes> serials;
  std::vector<StateVector> states;
};

/// Repetition scheme: accept iff at least ⌈(1 − ε − η)k⌉ sub-verifications accept.
class CompositeScheme {
 public:
  CompositeScheme(std::shared_ptr<const MiniScheme> base, int k, double eta);

  const MiniScheme& base() const { return *base_; }
  int k() const { return k_; }
  double eta() const { return eta_; }
  int threshold() const { return threshold_; }

  CompositeNote bank(Rng& rng) const;
  /// Number of accepting sub-verifications; collapses the states.
  int accepted_count(const std::vector<Bytes>& serials, std::vector<StateVector>& states, Rng& rng) const;
  bool verify(const std::vector<Bytes>& serials, std::vector<StateVector>& states, Rng& rng) const;
  bool verify2(const std::vector<Bytes>& serials, std::vector<StateVector>& first,
               std::vector<StateVector>& second, Rng& rng) const;

 private:
  std::shared_ptr<const MiniScheme> base_;
  int k_;
  double eta_;
  int threshold_;
};

/// Builds the repetition scheme; requires base completeness error ε < 1/2 and η ∈ (0, (1 − 2ε)/2).
std::shared_ptr<CompositeScheme> amplify_completeness(std::shared_ptr<const MiniScheme> base, int k,
                                                      double eta);

/// Two candidate composite notes produced from one genuine composite note.
struct CompositeForgery {
  std::vector<StateVector> first;
  std::vector<StateVector> second;
};

class CompositeCounterfeiter {
 public:
  virtual ~CompositeCounterfeiter() = default;
  virtual CompositeForgery counterfeit(const CompositeNote& note, Rng& rng) = 0;
};

/// Cheating fixture that reads the projective targets: the first output is the input, the second
/// is a fresh copy of every note except `junk_slots` uniformly chosen slots, which get a basis
/// state orthogonal to the target.
class ScriptedCompositeCounterfeiter final : public CompositeCounterfeiter {
 public:
  ScriptedCompositeCounterfeiter(std::shared_ptr<const MiniScheme> base, int junk_slots);
  CompositeForgery counterfeit(const CompositeNote& note, Rng& rng) override;

 private:
  std::shared_ptr<const MiniScheme> base_;
  int junk_slots_;
};

/// Single-note counterfeiter built from a composite one: mint a fresh composite note, swap the
/// target note into a uniformly random slot, run the composite counterfeiter, and return that
/// slot's two output registers.
std::pair<StateVector, StateVector> reduce_composite_counterfeiter(const CompositeScheme& scheme,
                                                                  CompositeCounterfeiter& forger,
                                                                  const Banknote& target, Rng& rng);

}  // namespace hsm
