#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "observables.hpp"
#include "walk.hpp"

namespace qwalk {

/// Reduced density matrix of the coin, basis (up, down).
struct CoinDensity {
  Eigen::Matrix2cd matrix = Eigen::Matrix2cd::Zero();

  double trace() const { return matrix.trace().real(); }

  /// Eigenvalues in ascending order.
  std::array<double, 2> eigenvalues() const {
    const double a = matrix(0, 0).real();
    const double d = matrix(1, 1).real();
    const double off = std::abs(matrix(0, 1));
    const double mean = 0.5 * (a + d);
    const double radius = std::sqrt(0.25 * (a - d) * (a - d) + off * off);
    return {mean - radius, mean + radius};
  }
};

/// Density matrix of a disorder ensemble restricted to the window of sites
/// [site_begin, site_begin + site_count) that carries any amplitude. All
/// matrix elements outside the window vanish identically, so spectra of the
/// window matrix and of the full 2L x 2L matrix differ only by zeros.
/// Row/column 2*k + c is (site site_begin + k, coin c).
struct EnsembleDensity {
  Geometry geometry;
  std::size_t time = 0;
  std::size_t site_begin = 0;
  std::size_t site_count = 0;
  std::size_t realizations = 0;
  Eigen::MatrixXcd matrix;
};

inline CoinDensity reduced_coin_density(const WalkState& state) {
  CoinDensity rho;
  const std::size_t n = state.geometry().sites();
  complex uu{}, dd{}, ud{};
  for (std::size_t i = 0; i < n; ++i) {
    const complex u = state.up(i), d = state.down(i);
    uu += u * std::conj(u);
    dd += d * std::conj(d);
    ud += u * std::conj(d);
  }
  rho.matrix << uu, ud, std::conj(ud), dd;
  return rho;
}

/// Von Neumann entropy -sum lambda ln lambda (natural log) of the coin.
inline double entanglement_entropy(const CoinDensity& rho) {
  constexpr double trace_tol = 1e-10;
  constexpr double clip_tol = 1e-10;
  if (std::abs(rho.trace() - 1.0) > trace_tol)
    throw DomainError("entanglement_entropy: trace " + std::to_string(rho.trace()) + " != 1");
  double s = 0.0;
  for (double lam : rho.eigenvalues()) {
    if (lam < -clip_tol)
      throw DomainError("entanglement_entropy: negative eigenvalue " + std::to_string(lam));
    if (lam > 0.0) s -= lam * std::log(lam);
  }
  return s;
}

/// Realization average of the entropy (not the entropy of the averaged state).
inline double mean_realization_entropy(std::span<const WalkState> states) {
  detail::require_common_frame(states, "mean_realization_entropy");
  double s = 0.0;
  for (const auto& st : states) s += entanglement_entropy(reduced_coin_density(st));
  return s / static_cast<double>(states.size());
}

inline EnsembleDensity ensemble_density(std::span<const WalkState> states) {
  detail::require_common_frame(states, "ensemble_density");
  const Geometry& g = states.front().geometry();
  std::size_t lo = g.sites(), hi = 0;
  for (const auto& s : states)
    for (std::size_t i = 0; i < g.sites(); ++i)
      if (s.up(i) != complex{} || s.down(i) != complex{}) {
        lo = std::min(lo, i);
        hi = std::max(hi, i + 1);
      }
  if (lo >= hi) throw DomainError("ensemble_density: all states vanish");

  EnsembleDensity rho{g, states.front().time(), lo, hi - lo, states.size(), {}};
  const auto dim = static_cast<Eigen::Index>(2 * rho.site_count);
  Eigen::MatrixXcd psi(dim, static_cast<Eigen::Index>(states.size()));
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto amp = states[k].amplitudes();
    for (Eigen::Index r = 0; r < dim; ++r)
      psi(r, static_cast<Eigen::Index>(k)) = amp[2 * lo + static_cast<std::size_t>(r)];
  }
  rho.matrix.noalias() = psi * psi.adjoint();
  rho.matrix /= static_cast<double>(states.size());
  return rho;
}

/// Transposes the coin indices of every 2x2 site block:
/// rho'_{x s, x' s'} = rho_{x s', x' s}.
inline Eigen::MatrixXcd partial_transpose(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols() || rho.rows() % 2 != 0)
    throw ContractViolation("partial_transpose: expected a square matrix of even dimension");
  Eigen::MatrixXcd out(rho.rows(), rho.cols());
  for (Eigen::Index i = 0; i < rho.rows(); i += 2)
    for (Eigen::Index j = 0; j < rho.cols(); j += 2)
      out.block<2, 2>(i, j) = rho.block<2, 2>(i, j).transpose();
  return out;
}

inline Eigen::MatrixXcd partial_transpose(const EnsembleDensity& rho) {
  return partial_transpose(rho.matrix);
}

/// Eigenvalues of a Hermitian matrix, checked against the residual bound
/// max_k |A v_k - lambda_k v_k| < 1e-8 |A|.
inline Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw NumericError("Hermitian eigensolver did not converge (dimension " +
                       std::to_string(a.rows()) + ")");
  const Eigen::VectorXd& lam = solver.eigenvalues();
  const double scale = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
  const Eigen::MatrixXcd resid =
      a * solver.eigenvectors() - solver.eigenvectors() * lam.cast<complex>().asDiagonal();
  const double worst = resid.colwise().norm().maxCoeff();
  if (!(worst < 1e-8 * scale))
    throw NumericError("Hermitian eigensolver residual " + std::to_string(worst) +
                       " exceeds 1e-8 * " + std::to_string(scale) + " (dimension " +
                       std::to_string(a.rows()) + ")");
  return lam;
}

/// N = (sum_i |lambda'_i| - 1) / 2 over the spectrum of the partial transpose.
inline double negativity(const EnsembleDensity& rho) {
  const Eigen::VectorXd lam = hermitian_eigenvalues(partial_transpose(rho));
  return std::max(0.0, 0.5 * (lam.cwiseAbs().sum() - 1.0));
}

}  // namespace qwalk
