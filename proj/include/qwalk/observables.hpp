#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "smoothing_spline.hpp"
#include "walk.hpp"

namespace qwalk {

/// Walker occupation probabilities p_x over the sites of a geometry.
struct ProbDist {
  Geometry geometry;
  std::size_t time = 0;
  std::vector<double> p;

  double at(long x) const { return p[geometry.index(x)]; }
  double total() const {
    double s = 0.0;
    for (double v : p) s += v;
    return s;
  }
};

struct MsdSeries {
  std::vector<std::size_t> times;
  std::vector<double> msd;
  double disorder_strength = 0.0;
};

inline ProbDist occupation(const WalkState& state) {
  ProbDist d{state.geometry(), state.time(), std::vector<double>(state.geometry().sites())};
  for (std::size_t i = 0; i < d.p.size(); ++i)
    d.p[i] = std::norm(state.up(i)) + std::norm(state.down(i));
  return d;
}

namespace detail {

inline void require_common_frame(std::span<const WalkState> states, const char* what) {
  if (states.empty()) throw DomainError(std::string(what) + ": empty ensemble");
  for (const auto& s : states) {
    if (!(s.geometry() == states.front().geometry()))
      throw ContractViolation(std::string(what) + ": states live on different geometries");
    if (s.time() != states.front().time())
      throw ContractViolation(std::string(what) + ": states are at different times");
  }
}

}  // namespace detail

/// Realization average of the occupation, i.e. the coin-traced diagonal of
/// the ensemble density matrix.
inline ProbDist ensemble_occupation(std::span<const WalkState> states) {
  detail::require_common_frame(states, "ensemble_occupation");
  const auto& first = states.front();
  ProbDist d{first.geometry(), first.time(), std::vector<double>(first.geometry().sites(), 0.0)};
  for (const auto& s : states)
    for (std::size_t i = 0; i < d.p.size(); ++i) d.p[i] += std::norm(s.up(i)) + std::norm(s.down(i));
  const double inv_n = 1.0 / static_cast<double>(states.size());
  for (double& v : d.p) v *= inv_n;
  return d;
}

inline double return_probability(const ProbDist& dist) { return dist.p[dist.geometry.origin()]; }

/// Line: uniform over the light cone restricted to the parity of t.
/// Ring and segment: uniform 1/L over all sites.
inline ProbDist flat_distribution(const Geometry& geometry, std::size_t t) {
  ProbDist d{geometry, t, std::vector<double>(geometry.sites(), 0.0)};
  if (geometry.kind() != GeometryKind::line) {
    std::fill(d.p.begin(), d.p.end(), 1.0 / static_cast<double>(geometry.sites()));
    return d;
  }
  if (t > geometry.max_line_steps())
    throw DomainError("flat distribution at t=" + std::to_string(t) +
                      " does not fit in the line window");
  const long tl = static_cast<long>(t);
  const double w = 1.0 / static_cast<double>(t + 1);
  for (long x = -tl; x <= tl; x += 2) d.p[geometry.index(x)] = w;
  return d;
}

/// M = sum_x |p_x - q_x|, evaluated as 2 - 2 sum_x min(p_x, q_x), which
/// equals the 1-norm for normalised inputs and never exceeds 2 in floating
/// point.
inline double mixing_ratio(const ProbDist& dist, const ProbDist& flat) {
  if (!(dist.geometry == flat.geometry))
    throw ContractViolation("mixing_ratio: distributions on different geometries");
  if (dist.time != flat.time) throw ContractViolation("mixing_ratio: distributions at different times");
  double overlap = 0.0;
  for (std::size_t i = 0; i < dist.p.size(); ++i) overlap += std::min(dist.p[i], flat.p[i]);
  return std::max(0.0, 2.0 - 2.0 * overlap);
}

/// Mean squared displacement about the origin.
inline double msd(const ProbDist& dist) {
  double s = 0.0;
  for (std::size_t i = 0; i < dist.p.size(); ++i) {
    const double x = static_cast<double>(dist.geometry.position(i));
    s += dist.p[i] * x * x;
  }
  return s;
}

inline double overlap_squared(const WalkState& a, const WalkState& b) {
  complex ip{};
  const auto aa = a.amplitudes();
  const auto bb = b.amplitudes();
  for (std::size_t k = 0; k < aa.size(); ++k) ip += std::conj(aa[k]) * bb[k];
  return std::norm(ip);
}

/// F = (1/N) sum_i |<psi_i|phi>|^2 against a reference state at the same time.
inline double fidelity(std::span<const WalkState> states, const WalkState& reference) {
  if (states.empty()) throw DomainError("fidelity: empty ensemble");
  double f = 0.0;
  for (const auto& s : states) {
    if (s.time() != reference.time())
      throw DomainError("fidelity: state at t=" + std::to_string(s.time()) +
                        " compared with reference at t=" + std::to_string(reference.time()));
    if (!(s.geometry() == reference.geometry()))
      throw ContractViolation("fidelity: state and reference on different geometries");
    f += overlap_squared(s, reference);
  }
  return f / static_cast<double>(states.size());
}

struct GrowthPoint {
  std::size_t time;
  double sigma;
};

/// sigma(t) = d ln<x^2> / d ln t from a cubic smoothing spline through
/// (ln t, ln <x^2>). Entries at t = 0 are dropped. With no smoothing
/// penalty the penalty is picked by generalised cross-validation.
inline std::vector<GrowthPoint> growth_exponent(const MsdSeries& series,
                                                std::optional<double> smoothing = std::nullopt) {
  if (series.times.size() != series.msd.size())
    throw ContractViolation("growth_exponent: times and msd differ in length");
  std::vector<double> lx, ly;
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    if (series.times[k] == 0) continue;
    if (!(series.msd[k] > 0.0))
      throw DomainError("growth_exponent: nonpositive msd at t=" + std::to_string(series.times[k]));
    kept.push_back(series.times[k]);
    lx.push_back(std::log(static_cast<double>(series.times[k])));
    ly.push_back(std::log(series.msd[k]));
  }
  if (kept.size() < 10)
    throw DomainError("growth_exponent: need at least 10 points with t > 0, got " +
                      std::to_string(kept.size()));
  const SmoothingSpline spline(lx, ly, smoothing);
  const auto d = spline.knot_derivatives();
  std::vector<GrowthPoint> out(kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) out[k] = {kept[k], d[k]};
  return out;
}

}  // namespace qwalk
