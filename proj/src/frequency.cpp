#include "rfclt/frequency.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "rfclt/error.hpp"

namespace rfclt {

double wrap_angle(double x) {
  double y = std::fmod(x + kPi, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  y -= kPi;
  // fmod can land exactly on the excluded endpoint after the shift.
  if (y >= kPi) y -= kTwoPi;
  return y;
}

bool is_generic_coordinate(double x) {
  const double ratio = x / kPi;
  for (int q = 1; q <= 16; ++q) {
    const double scaled = ratio * q;
    if (std::fabs(scaled - std::round(scaled)) * kPi < 1e-9) return false;
  }
  return true;
}

FrequencyPoint FrequencyPoint::make(std::span<const double> coords) {
  if (coords.empty() || coords.size() > static_cast<std::size_t>(kMaxDim)) {
    throw Error(ErrorKind::InvalidPlan, "a frequency needs 1 to 3 coordinates");
  }
  FrequencyPoint point;
  point.dim_ = static_cast<int>(coords.size());
  point.generic_ = true;
  for (std::size_t axis = 0; axis < coords.size(); ++axis) {
    const double x = coords[axis];
    if (!std::isfinite(x) || x < -kPi || x >= kPi) {
      throw Error(ErrorKind::InvalidPlan,
                  "frequency coordinate " + std::to_string(x) + " is outside [-pi, pi)");
    }
    point.t_[axis] = x;
    point.generic_ = point.generic_ && is_generic_coordinate(x);
  }
  return point;
}

FrequencyPoint FrequencyPoint::make(std::initializer_list<double> coords) {
  return make(std::span<const double>(coords.begin(), coords.size()));
}

FrequencyPoint FrequencyPoint::wrapped(std::span<const double> coords) {
  std::vector<double> w(coords.begin(), coords.end());
  for (double& x : w) x = wrap_angle(x);
  return make(w);
}

FrequencyPoint FrequencyPoint::negated() const {
  std::vector<double> w(t_.begin(), t_.begin() + dim_);
  for (double& x : w) x = -x;
  return wrapped(w);
}

std::string FrequencyPoint::label() const {
  std::string out = "(";
  char buf[32];
  for (int axis = 0; axis < dim_; ++axis) {
    if (axis > 0) out += ',';
    std::snprintf(buf, sizeof buf, "%.17g", t_[axis]);
    out += buf;
  }
  return out + ")";
}

std::span<const FrequencyPoint> default_frequencies(int dim) {
  static const std::vector<FrequencyPoint> one = {
      FrequencyPoint::make({1.0}),
      FrequencyPoint::make({1.114213562373095}),
      FrequencyPoint::make({-2.3}),
      FrequencyPoint::make({0.5772156649015329}),
      FrequencyPoint::make({-1.618033988749895}),
  };
  static const std::vector<FrequencyPoint> two = {
      FrequencyPoint::make({1.0, 1.114213562373095}),
      FrequencyPoint::make({1.1999816148643265, -0.7}),
      FrequencyPoint::make({-2.3, 0.4142135623730951}),
      FrequencyPoint::make({0.5772156649015329, 2.718281828459045}),
      FrequencyPoint::make({-1.618033988749895, -2.9}),
  };
  static const std::vector<FrequencyPoint> three = {
      FrequencyPoint::make({1.0, 1.114213562373095, -0.7}),
      FrequencyPoint::make({1.1999816148643265, -0.7, 0.4142135623730951}),
      FrequencyPoint::make({-2.3, 0.4142135623730951, 1.0}),
      FrequencyPoint::make({0.5772156649015329, 2.718281828459045, -1.3}),
      FrequencyPoint::make({-1.618033988749895, -2.9, 2.1}),
  };
  switch (dim) {
    case 1: return one;
    case 2: return two;
    case 3: return three;
    default: throw Error(ErrorKind::InvalidPlan, "no default frequencies for this dimension");
  }
}

}  // namespace rfclt
