#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "coin.hpp"
#include "errors.hpp"
#include "geometry.hpp"

namespace qwalk {

/// Composite walker-coin state. Amplitudes are site-major with the coin
/// index varying fastest: amplitudes()[2*i] is (site i, up) and
/// amplitudes()[2*i+1] is (site i, down).
class WalkState {
 public:
  explicit WalkState(Geometry geometry)
      : geometry_(geometry), amplitudes_(2 * geometry.sites(), complex{0.0, 0.0}) {}

  WalkState(Geometry geometry, std::vector<complex> amplitudes, std::size_t time = 0)
      : geometry_(geometry), amplitudes_(std::move(amplitudes)), time_(time) {
    if (amplitudes_.size() != 2 * geometry_.sites())
      throw ContractViolation("state has " + std::to_string(amplitudes_.size()) +
                              " amplitudes, geometry needs " +
                              std::to_string(2 * geometry_.sites()));
  }

  const Geometry& geometry() const noexcept { return geometry_; }
  std::size_t time() const noexcept { return time_; }
  void set_time(std::size_t t) noexcept { time_ = t; }

  std::span<const complex> amplitudes() const noexcept { return amplitudes_; }
  std::span<complex> amplitudes() noexcept { return amplitudes_; }

  complex& up(std::size_t site) noexcept { return amplitudes_[2 * site]; }
  complex& down(std::size_t site) noexcept { return amplitudes_[2 * site + 1]; }
  const complex& up(std::size_t site) const noexcept { return amplitudes_[2 * site]; }
  const complex& down(std::size_t site) const noexcept { return amplitudes_[2 * site + 1]; }

  double norm_squared() const noexcept {
    double s = 0.0;
    for (const auto& a : amplitudes_) s += std::norm(a);
    return s;
  }

  friend bool operator==(const WalkState&, const WalkState&) = default;

 private:
  Geometry geometry_;
  std::vector<complex> amplitudes_;
  std::size_t time_ = 0;
};

/// Walker at the origin with coin (i|up> + |down>)/sqrt(2), an eigenstate
/// of Y that makes the Hadamard walk symmetric.
inline WalkState initial_state(const Geometry& geometry) {
  WalkState s(geometry);
  const double h = 1.0 / std::sqrt(2.0);
  s.up(geometry.origin()) = complex{0.0, h};
  s.down(geometry.origin()) = complex{h, 0.0};
  return s;
}

inline void apply_coin(WalkState& state, const CoinField& field) {
  if (!(state.geometry() == field.geometry()))
    throw ContractViolation("state and coin field live on different geometries");
  auto amp = state.amplitudes();
  const std::size_t n = state.geometry().sites();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = field.sqrt_r(i);
    const double b = field.sqrt_one_minus_r(i);
    const complex u = amp[2 * i];
    const complex d = amp[2 * i + 1];
    amp[2 * i] = a * u + b * d;
    amp[2 * i + 1] = b * u - a * d;
  }
}

/// Conditional shift: up moves to x+1, down to x-1. Ring wraps around;
/// the reflective segment flips the coin at the wall and keeps the
/// position. On a Line window any amplitude that would leave the window
/// raises WindowOverflow before the state is modified.
inline void apply_shift(WalkState& state) {
  const Geometry& g = state.geometry();
  const std::size_t n = g.sites();
  auto amp = state.amplitudes();

  const complex up_last = amp[2 * (n - 1)];
  const complex down_first = amp[1];
  if (g.kind() == GeometryKind::line && (up_last != complex{} || down_first != complex{}))
    throw WindowOverflow("walker reached the edge of the line window (" + std::to_string(n) +
                         " sites) at t=" + std::to_string(state.time()));

  for (std::size_t i = n - 1; i > 0; --i) amp[2 * i] = amp[2 * (i - 1)];
  for (std::size_t i = 0; i + 1 < n; ++i) amp[2 * i + 1] = amp[2 * (i + 1) + 1];

  switch (g.kind()) {
    case GeometryKind::line:
      amp[0] = complex{};
      amp[2 * (n - 1) + 1] = complex{};
      break;
    case GeometryKind::ring:
      amp[0] = up_last;
      amp[2 * (n - 1) + 1] = down_first;
      break;
    case GeometryKind::reflective_segment:
      amp[0] = down_first;
      amp[2 * (n - 1) + 1] = up_last;
      break;
  }
}

/// One time step, shift after coin.
inline void step(WalkState& state, const CoinField& field) {
  apply_coin(state, field);
  apply_shift(state);
  state.set_time(state.time() + 1);
}

inline void advance(WalkState& state, const CoinField& field, std::size_t steps) {
  for (std::size_t s = 0; s < steps; ++s) step(state, field);
}

/// Evolves `state` by `steps` steps and returns copies at the requested
/// absolute times (sorted, within [state.time(), state.time() + steps]),
/// followed by the final state unless it was already requested.
inline std::vector<WalkState> evolve(WalkState state, const CoinField& field, std::size_t steps,
                                     std::span<const std::size_t> snapshot_times = {}) {
  const std::size_t t0 = state.time();
  const std::size_t t_end = t0 + steps;
  for (std::size_t k = 0; k < snapshot_times.size(); ++k) {
    if (snapshot_times[k] < t0 || snapshot_times[k] > t_end)
      throw DomainError("snapshot time " + std::to_string(snapshot_times[k]) +
                        " outside [" + std::to_string(t0) + ", " + std::to_string(t_end) + "]");
    if (k > 0 && snapshot_times[k] <= snapshot_times[k - 1])
      throw DomainError("snapshot times must be strictly increasing");
  }

  std::vector<WalkState> out;
  out.reserve(snapshot_times.size() + 1);
  for (std::size_t t : snapshot_times) {
    advance(state, field, t - state.time());
    out.push_back(state);
  }
  if (out.empty() || out.back().time() != t_end) {
    advance(state, field, t_end - state.time());
    out.push_back(std::move(state));
  }
  return out;
}

}  // namespace qwalk
