#pragma once

#include <array>
#include <numbers>
#include <span>
#include <string>

#include "rfclt/lattice.hpp"

namespace rfclt {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps x into [-pi, pi).
double wrap_angle(double x);

/// A point t in [-pi, pi)^d.
///
/// The limit theorems hold for almost every t, and the exceptional null set
/// contains rational multiples of pi in degenerate cases. `generic()` is false
/// when some coordinate lies within 1e-9 of p*pi/q with q <= 16 (this
/// includes 0 and -pi); experiment plans refuse such points.
class FrequencyPoint {
 public:
  FrequencyPoint() = default;

  /// Throws Error(InvalidPlan) if a coordinate is outside [-pi, pi) or not
  /// finite, or if the number of coordinates is not 1..3.
  static FrequencyPoint make(std::span<const double> coords);
  static FrequencyPoint make(std::initializer_list<double> coords);
  /// Accepts any finite coordinates and wraps them into [-pi, pi).
  static FrequencyPoint wrapped(std::span<const double> coords);

  int dim() const noexcept { return dim_; }
  double operator[](int axis) const noexcept { return t_[axis]; }
  const std::array<double, kMaxDim>& coords() const noexcept { return t_; }
  bool generic() const noexcept { return generic_; }

  FrequencyPoint negated() const;

  /// u . t over the active axes.
  double dot(const Lag& u) const noexcept {
    return static_cast<double>(u[0]) * t_[0] + static_cast<double>(u[1]) * t_[1] +
           static_cast<double>(u[2]) * t_[2];
  }

  std::string label() const;

 private:
  int dim_ = 1;
  std::array<double, kMaxDim> t_{0.0, 0.0, 0.0};
  bool generic_ = false;
};

bool is_generic_coordinate(double x);

/// Fixed irrational-looking test frequencies, stored as decimal literals.
/// The five two-dimensional points are the default for spectral-density
/// comparisons; the first, second and fourth are used for CLT checks.
std::span<const FrequencyPoint> default_frequencies(int dim);

}  // namespace rfclt
