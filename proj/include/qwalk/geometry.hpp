#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace qwalk {

enum class GeometryKind { line, ring, reflective_segment };

inline const char* to_string(GeometryKind k) {
  switch (k) {
    case GeometryKind::line: return "line";
    case GeometryKind::ring: return "ring";
    case GeometryKind::reflective_segment: return "segment";
  }
  return "unknown";
}

inline GeometryKind parse_geometry_kind(std::string_view s) {
  if (s == "line") return GeometryKind::line;
  if (s == "ring") return GeometryKind::ring;
  if (s == "segment" || s == "reflective" || s == "reflective_segment")
    return GeometryKind::reflective_segment;
  throw DomainError("unknown geometry '" + std::string(s) + "' (expected line, ring or segment)");
}

/// Finite lattice of an odd number of sites centred on the origin x = 0.
///
/// Sites are indexed 0..sites-1; site index i corresponds to position
/// x = i - origin(). A Line is a window onto the infinite line and must be
/// wide enough that the light cone never reaches its edges.
class Geometry {
 public:
  Geometry(GeometryKind kind, std::size_t sites) : kind_(kind), sites_(sites) {
    if (sites < 3 || sites % 2 == 0)
      throw DomainError("geometry needs an odd number of sites >= 3, got " +
                        std::to_string(sites));
  }

  /// Line window [-max_steps, max_steps].
  static Geometry line(std::size_t max_steps) {
    return Geometry(GeometryKind::line, 2 * (max_steps < 1 ? 1 : max_steps) + 1);
  }
  static Geometry ring(std::size_t sites) { return Geometry(GeometryKind::ring, sites); }
  static Geometry segment(std::size_t sites) {
    return Geometry(GeometryKind::reflective_segment, sites);
  }

  GeometryKind kind() const noexcept { return kind_; }
  std::size_t sites() const noexcept { return sites_; }
  std::size_t origin() const noexcept { return sites_ / 2; }
  long x_min() const noexcept { return -static_cast<long>(origin()); }
  long x_max() const noexcept { return static_cast<long>(origin()); }

  long position(std::size_t index) const noexcept {
    return static_cast<long>(index) - static_cast<long>(origin());
  }
  std::size_t index(long x) const noexcept {
    return static_cast<std::size_t>(x + static_cast<long>(origin()));
  }

  /// Largest number of steps a Line window can take without overflow.
  std::size_t max_line_steps() const noexcept { return origin(); }

  friend bool operator==(const Geometry&, const Geometry&) = default;

 private:
  GeometryKind kind_;
  std::size_t sites_;
};

}  // namespace qwalk
