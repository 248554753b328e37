#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hsmoney/qsim.hpp"

namespace hsm {

/// Density operator stored row-major. Construction validates Hermiticity,
/// positivity and unit trace to 1e-9.
class DensityOp {
 public:
  DensityOp(std::size_t dim, std::vector<Amp> row_major);

  static DensityOp pure(const StateVector& s);
  static DensityOp mixture(std::span<const double> weights, std::span<const StateVector> states);
  static DensityOp maximally_mixed(std::size_t dim);
  /// Mixture of `rank` Haar-random states with Dirichlet-like random weights.
  static DensityOp random(int n_qubits, int rank, Rng& rng);

  std::size_t dim() const { return dim_; }
  Amp at(std::size_t i, std::size_t j) const { return m_[i * dim_ + j]; }
  const std::vector<Amp>& data() const { return m_; }
  /// <psi|rho|psi>.
  double expectation(const StateVector& psi) const;
  std::vector<double> eigenvalues() const;

 private:
  std::size_t dim_;
  std::vector<Amp> m_;
};

inline constexpr std::size_t kMaxMixedFidelityDim = 256;

/// Uhlmann fidelity (not squared).
double fidelity(const DensityOp& rho, const DensityOp& sigma);
/// sqrt(<psi|rho|psi>).
double fidelity(const StateVector& psi, const DensityOp& rho);
double fidelity(const DensityOp& rho, const StateVector& psi);

/// (1/2) Σ|λ_i| over the eigenvalues of rho − sigma.
double trace_distance(const DensityOp& rho, const DensityOp& sigma);

}  // namespace hsm
