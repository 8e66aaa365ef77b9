#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

namespace rfclt {

inline constexpr int kMaxDim = 3;

/// Integer lattice vector. Coordinates beyond the active dimension are zero.
using Lag = std::array<std::int64_t, kMaxDim>;

/// Extents n = (n_1, ..., n_d) of the observation window 1 <= u <= n.
/// Unused trailing axes carry extent 1 so products and loops need no
/// special-casing.
class LatticeShape {
 public:
  LatticeShape() = default;

  /// Throws Error(InvalidShape) unless 1 <= dim <= 3 and every extent >= 1.
  static LatticeShape make(int dim, const std::array<std::int64_t, kMaxDim>& extents);
  static LatticeShape cube(int dim, std::int64_t n);

  int dim() const noexcept { return dim_; }
  std::int64_t extent(int axis) const noexcept { return extents_[axis]; }
  const std::array<std::int64_t, kMaxDim>& extents() const noexcept { return extents_; }
  std::size_t volume() const noexcept;

  /// Row-major offset of the 1-based site u (last axis fastest).
  std::size_t offset(const Lag& u) const noexcept {
    return static_cast<std::size_t>(((u[0] - 1) * extents_[1] + (u[1] - 1)) * extents_[2] + (u[2] - 1));
  }
  Lag site(std::size_t offset) const noexcept;

  /// "64x64" style label.
  std::string label() const;

  friend bool operator==(const LatticeShape&, const LatticeShape&) = default;

 private:
  int dim_ = 1;
  std::array<std::int64_t, kMaxDim> extents_{1, 1, 1};
};

inline Lag operator+(const Lag& a, const Lag& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Lag operator-(const Lag& a, const Lag& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Lag operator-(const Lag& a) { return {-a[0], -a[1], -a[2]}; }

/// Coordinate-wise minimum / maximum.
Lag lag_min(const Lag& a, const Lag& b);
Lag lag_max(const Lag& a, const Lag& b);

/// a <= b in every coordinate.
bool lag_leq(const Lag& a, const Lag& b);

std::int64_t sup_norm(const Lag& a);

std::string format_lag(const Lag& a, int dim);

}  // namespace rfclt
