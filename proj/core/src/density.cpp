#include "hsmoney/density.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hsm {

namespace {

using Matrix = Eigen::Matrix<Amp, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const Matrix> view(const DensityOp& d) {
  return Eigen::Map<const Matrix>(d.data().data(), static_cast<Eigen::Index>(d.dim()),
                                  static_cast<Eigen::Index>(d.dim()));
}

void check_fidelity_dim(std::size_t dim) {
  if (dim > kMaxMixedFidelityDim) {
    throw std::length_error("mixed-state fidelity limited to dimension 256");
  }
}

}  // namespace

DensityOp::DensityOp(std::size_t dim, std::vector<Amp> row_major) : dim_(dim), m_(std::move(row_major)) {
  if (m_.size() != dim * dim) throw std::invalid_argument("DensityOp: expected dim*dim entries");
  double trace = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    trace += m_[i * dim + i].real();
    for (std::size_t j = 0; j < dim; ++j) {
      if (std::abs(m_[i * dim + j] - std::conj(m_[j * dim + i])) > kTolerance) {
        throw std::domain_error("DensityOp: matrix is not Hermitian");
      }
    }
  }
  if (std::abs(trace - 1.0) > kTolerance) throw std::domain_error("DensityOp: trace is not 1");
  for (double ev : eigenvalues()) {
    if (ev < -kTolerance) throw std::domain_error("DensityOp: matrix is not positive semidefinite");
  }
}

DensityOp DensityOp::pure(const StateVector& s) {
  const std::size_t d = s.dim();
  std::vector<Amp> m(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) m[i * d + j] = s[i] * std::conj(s[j]);
  }
  return DensityOp(d, std::move(m));
}

DensityOp DensityOp::mixture(std::span<const double> weights, std::span<const StateVector> states) {
  if (weights.size() != states.size() || states.empty()) {
    throw std::invalid_argument("DensityOp::mixture: need matching, non-empty weights and states");
  }
  const std::size_t d = states.front().dim();
  std::vector<Amp> m(d * d, Amp{0.0, 0.0});
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k].dim() != d) throw std::invalid_argument("DensityOp::mixture: dimension mismatch");
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) m[i * d + j] += weights[k] * states[k][i] * std::conj(states[k][j]);
    }
  }
  return DensityOp(d, std::move(m));
}

DensityOp DensityOp::maximally_mixed(std::size_t dim) {
  std::vector<Amp> m(dim * dim, Amp{0.0, 0.0});
  for (std::size_t i = 0; i < dim; ++i) m[i * dim + i] = 1.0 / static_cast<double>(dim);
  return DensityOp(dim, std::move(m));
}

DensityOp DensityOp::random(int n_qubits, int rank, Rng& rng) {
  if (rank < 1) throw std::invalid_argument("DensityOp::random: rank must be positive");
  std::vector<StateVector> states;
  std::vector<double> weights;
  double total = 0.0;
  for (int k = 0; k < rank; ++k) {
    states.push_back(haar_random_state(n_qubits, rng));
    weights.push_back(-std::log(1.0 - rng.uniform()));
    total += weights.back();
  }
  for (double& w : weights) w /= total;
  return mixture(weights, states);
}

double DensityOp::expectation(const StateVector& psi) const {
  if (psi.dim() != dim_) throw std::invalid_argument("DensityOp::expectation: dimension mismatch");
  Amp t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    Amp row = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) row += m_[i * dim_ + j] * psi[j];
    t += std::conj(psi[i]) * row;
  }
  return t.real();
}

std::vector<double> DensityOp::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(view(*this)),
                                                     Eigen::EigenvaluesOnly);
  std::vector<double> out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = es.eigenvalues()[static_cast<Eigen::Index>(i)];
  return out;
}

double fidelity(const DensityOp& rho, const DensityOp& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  check_fidelity_dim(rho.dim());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(view(rho)));
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXcd sqrt_rho = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  Eigen::MatrixXcd inner = sqrt_rho * Eigen::MatrixXcd(view(sigma)) * sqrt_rho;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(inner, Eigen::EigenvaluesOnly);
  double f = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::min(1.0, f);
}

double fidelity(const StateVector& psi, const DensityOp& rho) {
  return std::sqrt(std::clamp(rho.expectation(psi), 0.0, 1.0));
}

double fidelity(const DensityOp& rho, const StateVector& psi) { return fidelity(psi, rho); }

double trace_distance(const DensityOp& rho, const DensityOp& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  check_fidelity_dim(rho.dim());
  Eigen::MatrixXcd diff = Eigen::MatrixXcd(view(rho)) - Eigen::MatrixXcd(view(sigma));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace hsm
