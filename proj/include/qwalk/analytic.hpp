#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "errors.hpp"
#include "observables.hpp"
#include "walk.hpp"

// Closed-form Fourier solution of the clean Hadamard walk, used as an
// oracle for the step-by-step engine.
//
// Spinors here follow the Fourier-solution convention (psi_down, psi_up),
// with the recursion psi_x(t+1) = J+ psi_{x-1}(t) + J- psi_{x+1}(t). This
// walk is the spatial mirror (with up/down exchanged) of the engine's walk;
// for the symmetric initial coin both give the same occupation p_x, which
// is what compare_with_engine checks.
namespace qwalk::analytic {

/// Initial coin (a, b) = (<down|coin>, <up|coin>).
struct InitialCoin {
  complex a;
  complex b;
};

/// The symmetric initial coin (|down> + i|up>)/sqrt(2).
inline InitialCoin symmetric_coin() {
  const double h = 1.0 / std::sqrt(2.0);
  return {complex{h, 0.0}, complex{0.0, h}};
}

/// J+ e^{ik} + J- e^{-ik}.
inline Eigen::Matrix2cd jk_matrix(double k) {
  const double h = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd jp, jm;
  jp << 0.0, 0.0, h, -h;
  jm << h, h, 0.0, 0.0;
  const complex e{std::cos(k), std::sin(k)};
  return jp * e + jm * std::conj(e);
}

/// lambda_pm = (+-sqrt(1 + cos^2 k) - i sin k) / sqrt(2), returned as {plus, minus}.
inline std::array<complex, 2> jk_eigenvalues(double k) {
  const double root = std::sqrt(1.0 + std::cos(k) * std::cos(k));
  const double h = 1.0 / std::sqrt(2.0);
  return {complex{root * h, -std::sin(k) * h}, complex{-root * h, -std::sin(k) * h}};
}

/// omega_k with sin(omega_k) = sin(k)/sqrt(2), principal branch.
inline double dispersion(double k) { return std::asin(std::sin(k) / std::sqrt(2.0)); }

struct Amplitudes {
  complex down;
  complex up;
};

// The integrands are analytic in the strip |Im k| < asinh(1), so the
// trapezoid error decays like exp(-0.88 Q); the floor of 64 nodes keeps
// small t at machine precision.
inline std::size_t default_quad_points(std::size_t t) { return std::max<std::size_t>(16 * (t + 1), 64); }

namespace detail {

// Accumulates the four k-integrals (without the 1/2pi measure) on the
// Q-point periodic trapezoid grid, separately for even and odd nodes so
// the Q/2-point rule comes for free.
struct KIntegrals {
  std::array<complex, 4> even{}, odd{};
};

inline KIntegrals integrate(long x, std::size_t t, std::size_t q) {
  KIntegrals out;
  const double tt = static_cast<double>(t);
  const double xx = static_cast<double>(x);
  for (std::size_t j = 0; j < q; ++j) {
    const double k = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(j) /
                                             static_cast<double>(q);
    const double c = std::cos(k);
    const double root = std::sqrt(1.0 + c * c);
    const double phase = -(k * xx + dispersion(k) * tt);
    const complex e{std::cos(phase), std::sin(phase)};
    const complex e_minus_k{std::cos(k), -std::sin(k)};
    const std::array<complex, 4> f{(1.0 + c / root) * e, e_minus_k / root * e,
                                   std::conj(e_minus_k) / root * e, (1.0 - c / root) * e};
    auto& acc = (j % 2 == 0) ? out.even : out.odd;
    for (int m = 0; m < 4; ++m) acc[m] += f[m];
  }
  return out;
}

inline Amplitudes combine(const std::array<complex, 4>& mean, const InitialCoin& coin,
                          double prefactor) {
  return {prefactor * (0.5 * coin.a * mean[0] + 0.5 * coin.b * mean[1]),
          prefactor * (0.5 * coin.a * mean[2] + 0.5 * coin.b * mean[3])};
}

}  // namespace detail

/// Real-space amplitudes (psi_down, psi_up) at (x, t) by the periodic
/// trapezoid rule with `quad_points` nodes on [-pi, pi). The result is
/// compared against the rule on every other node; a change above 1e-8
/// raises NumericError.
inline Amplitudes analytic_amplitudes(long x, std::size_t t, const InitialCoin& coin,
                                      std::size_t quad_points) {
  if (quad_points < 8 * (t + 1) || quad_points % 2 != 0)
    throw DomainError("analytic_amplitudes: need an even quad_points >= 8(t+1) = " +
                      std::to_string(8 * (t + 1)) + ", got " + std::to_string(quad_points));
  const long parity = (static_cast<long>(t) + x) % 2;
  if (parity != 0) return {complex{}, complex{}};

  const auto sums = detail::integrate(x, t, quad_points);
  std::array<complex, 4> fine, coarse;
  const double q = static_cast<double>(quad_points);
  for (int m = 0; m < 4; ++m) {
    fine[m] = (sums.even[m] + sums.odd[m]) / q;
    coarse[m] = sums.even[m] / (0.5 * q);
  }
  // (1 + (-1)^{t+x}) = 2 on the allowed sublattice.
  const Amplitudes a = detail::combine(fine, coin, 2.0);
  const Amplitudes b = detail::combine(coarse, coin, 2.0);
  const double change = std::max(std::abs(a.down - b.down), std::abs(a.up - b.up));
  if (change > 1e-8)
    throw NumericError("analytic_amplitudes: quadrature not converged at x=" + std::to_string(x) +
                       ", t=" + std::to_string(t) + " (halving nodes changes result by " +
                       std::to_string(change) + ")");
  return a;
}

/// Analytic occupation over the window [-t, t] of a Line geometry.
inline ProbDist analytic_occupation(const Geometry& geometry, std::size_t t,
                                    const InitialCoin& coin, std::size_t quad_points) {
  if (geometry.kind() != GeometryKind::line || t > geometry.max_line_steps())
    throw DomainError("analytic_occupation: needs a line window holding t=" + std::to_string(t));
  ProbDist d{geometry, t, std::vector<double>(geometry.sites(), 0.0)};
  const long tl = static_cast<long>(t);
  for (long x = -tl; x <= tl; ++x) {
    const auto amp = analytic_amplitudes(x, t, coin, quad_points);
    d.p[geometry.index(x)] = std::norm(amp.down) + std::norm(amp.up);
  }
  return d;
}

/// max_x |p_x(analytic) - p_x(engine)| for the clean walk from the symmetric
/// initial state at time t.
inline double compare_with_engine(std::size_t t, std::size_t quad_points = 0) {
  if (quad_points == 0) quad_points = default_quad_points(t);
  const Geometry g = Geometry::line(t);
  WalkState engine = initial_state(g);
  advance(engine, CoinField::uniform(g, 0.5), t);
  const ProbDist p_engine = occupation(engine);
  const ProbDist p_exact = analytic_occupation(g, t, symmetric_coin(), quad_points);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.sites(); ++i)
    worst = std::max(worst, std::abs(p_engine.p[i] - p_exact.p[i]));
  return worst;
}

}  // namespace qwalk::analytic
