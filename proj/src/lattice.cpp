#include "rfclt/lattice.hpp"

#include <algorithm>
#include <cstdlib>

#include "rfclt/error.hpp"

namespace rfclt {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidShape: return "invalid-shape";
    case ErrorKind::InvalidKernel: return "invalid-kernel";
    case ErrorKind::UnsupportedModel: return "unsupported-model";
    case ErrorKind::InvalidDensity: return "invalid-density";
    case ErrorKind::MissingInnovation: return "missing-innovation";
    case ErrorKind::InvalidPairing: return "invalid-pairing";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::InvalidPlan: return "invalid-plan";
    case ErrorKind::NonGenericFrequency: return "non-generic-frequency";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

LatticeShape LatticeShape::make(int dim, const std::array<std::int64_t, kMaxDim>& extents) {
  if (dim < 1 || dim > kMaxDim) {
    throw Error(ErrorKind::InvalidShape,
                "lattice dimension must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
  }
  LatticeShape shape;
  shape.dim_ = dim;
  for (int axis = 0; axis < kMaxDim; ++axis) {
    if (axis < dim) {
      if (extents[axis] < 1) {
        throw Error(ErrorKind::InvalidShape, "extent on axis " + std::to_string(axis + 1) +
                                                 " must be positive (got " +
                                                 std::to_string(extents[axis]) + ")");
      }
      shape.extents_[axis] = extents[axis];
    } else {
      shape.extents_[axis] = 1;
    }
  }
  return shape;
}

LatticeShape LatticeShape::cube(int dim, std::int64_t n) { return make(dim, {n, n, n}); }

std::size_t LatticeShape::volume() const noexcept {
  return static_cast<std::size_t>(extents_[0] * extents_[1] * extents_[2]);
}

Lag LatticeShape::site(std::size_t offset) const noexcept {
  const auto o = static_cast<std::int64_t>(offset);
  const std::int64_t u2 = o % extents_[2];
  const std::int64_t rest = o / extents_[2];
  const std::int64_t u1 = rest % extents_[1];
  const std::int64_t u0 = rest / extents_[1];
  return {u0 + 1, u1 + 1, u2 + 1};
}

std::string LatticeShape::label() const {
  std::string out;
  for (int axis = 0; axis < dim_; ++axis) {
    if (axis > 0) out += 'x';
    out += std::to_string(extents_[axis]);
  }
  return out;
}

Lag lag_min(const Lag& a, const Lag& b) {
  return {std::min(a[0], b[0]), std::min(a[1], b[1]), std::min(a[2], b[2])};
}

Lag lag_max(const Lag& a, const Lag& b) {
  return {std::max(a[0], b[0]), std::max(a[1], b[1]), std::max(a[2], b[2])};
}

bool lag_leq(const Lag& a, const Lag& b) {
  return a[0] <= b[0] && a[1] <= b[1] && a[2] <= b[2];
}

std::int64_t sup_norm(const Lag& a) {
  return std::max({std::llabs(a[0]), std::llabs(a[1]), std::llabs(a[2])});
}

std::string format_lag(const Lag& a, int dim) {
  std::string out = "(";
  for (int axis = 0; axis < dim; ++axis) {
    if (axis > 0) out += ',';
    out += std::to_string(a[axis]);
  }
  return out + ")";
}

}  // namespace rfclt
