#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "geometry.hpp"
#include "seed.hpp"

namespace qwalk {

using complex = std::complex<double>;

// 2x2 coin operator in the basis (up, down): index 0 is up, index 1 is down.
using CoinMatrix = Eigen::Matrix2cd;

/// G(r) = sqrt(r) Z + sqrt(1-r) X. G(0) = X, G(1/2) = H, G(1) = Z.
inline CoinMatrix make_gate(double r) {
  if (!(r >= 0.0 && r <= 1.0))
    throw DomainError("gate parameter r must lie in [0,1], got " + std::to_string(r));
  const double a = std::sqrt(r);
  const double b = std::sqrt(1.0 - r);
  CoinMatrix g;
  g << a, b, b, -a;
  return g;
}

inline CoinMatrix hadamard() { return make_gate(0.5); }

/// Quenched coin parameters r_x = (1 + W xi_x) / 2 for one disorder realization.
///
/// The square roots entering G(r_x) are cached per site since the field is
/// reused at every step.
class CoinField {
 public:
  CoinField(Geometry geometry, std::vector<double> r, double disorder_strength,
            std::uint64_t seed)
      : geometry_(geometry), r_(std::move(r)), disorder_(disorder_strength), seed_(seed) {
    if (r_.size() != geometry_.sites())
      throw ContractViolation("coin field has " + std::to_string(r_.size()) +
                              " sites, geometry has " + std::to_string(geometry_.sites()));
    sqrt_r_.resize(r_.size());
    sqrt_1mr_.resize(r_.size());
    for (std::size_t i = 0; i < r_.size(); ++i) {
      if (!(r_[i] >= 0.0 && r_[i] <= 1.0))
        throw DomainError("coin parameter r outside [0,1] at site index " + std::to_string(i));
      sqrt_r_[i] = std::sqrt(r_[i]);
      sqrt_1mr_[i] = std::sqrt(1.0 - r_[i]);
    }
  }

  /// Uniform field r_x = r everywhere.
  static CoinField uniform(Geometry geometry, double r = 0.5) {
    return CoinField(geometry, std::vector<double>(geometry.sites(), r), 0.0, 0);
  }

  const Geometry& geometry() const noexcept { return geometry_; }
  const std::vector<double>& r() const noexcept { return r_; }
  double disorder_strength() const noexcept { return disorder_; }
  std::uint64_t seed() const noexcept { return seed_; }

  double sqrt_r(std::size_t i) const noexcept { return sqrt_r_[i]; }
  double sqrt_one_minus_r(std::size_t i) const noexcept { return sqrt_1mr_[i]; }
  CoinMatrix gate(std::size_t i) const { return make_gate(r_[i]); }

 private:
  Geometry geometry_;
  std::vector<double> r_;
  std::vector<double> sqrt_r_;
  std::vector<double> sqrt_1mr_;
  double disorder_;
  std::uint64_t seed_;
};

/// Draws xi_x i.i.d. uniform on [-1, 1) from std::mt19937_64(seed), site by
/// site in increasing index order.
inline CoinField sample_coin_field(const Geometry& geometry, double disorder_strength,
                                   std::uint64_t seed) {
  if (!(disorder_strength >= 0.0 && disorder_strength <= 1.0))
    throw DomainError("disorder strength W must lie in [0,1], got " +
                      std::to_string(disorder_strength));
  std::mt19937_64 engine(seed);
  std::vector<double> r(geometry.sites());
  for (auto& rx : r) {
    const double xi = 2.0 * unit_interval(engine()) - 1.0;
    rx = 0.5 * (1.0 + disorder_strength * xi);
  }
  return CoinField(geometry, std::move(r), disorder_strength, seed);
}

}  // namespace qwalk
