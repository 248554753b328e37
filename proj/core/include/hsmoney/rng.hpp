#pragma once

#include <cstdint>
#include <random>

namespace hsm {

/// Mixes a 64-bit word (SplitMix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Seeded generator that can be split into independent child streams.
///
/// Every experiment owns one root Rng; trials and subsystems derive children with
/// split(stream) so results do not depend on scheduling order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  /// Child generator for the given stream id. Does not advance this generator.
  Rng split(std::uint64_t stream) const;

  std::uint64_t next_u64();
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform real in [0, 1).
  double uniform();
  bool coin(double p_true = 0.5);
  double normal();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace hsm
