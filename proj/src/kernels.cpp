#include "rfclt/kernels.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "rfclt/error.hpp"
#include "rfclt/numerics.hpp"
#include "rfclt/spectral.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rfclt {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace kernels {

namespace {

inline double filter_site(const InnovationLattice& xi, std::span<const Tap> taps, const Lag& k) {
  double acc = 0.0;
  for (const Tap& tap : taps) acc += tap.value * xi[k - tap.lag];
  return acc;
}

std::vector<double> fejer_weights(std::int64_t n, std::int64_t resolution) {
  const double h = kTwoPi / static_cast<double>(resolution);
  std::vector<double> w(static_cast<std::size_t>(resolution));
  for (std::int64_t k = 0; k < resolution; ++k) {
    w[static_cast<std::size_t>(k)] = fejer_kernel(n, -kPi + (static_cast<double>(k) + 0.5) * h) * h;
  }
  return w;
}

inline double checked_density(const DensityFn& f, const std::array<double, kMaxDim>& x) {
  const double value = f(x);
  if (!std::isfinite(value) || value < 0.0) {
    throw Error(ErrorKind::InvalidDensity,
                "spectral density evaluated to " + std::to_string(value) + "; it must be finite and non-negative");
  }
  return value;
}

struct QuadratureSetup {
  std::array<std::vector<double>, kMaxDim> weights;
  std::array<std::vector<double>, kMaxDim> shifted;  // wrap(x_k - t) per axis
};

QuadratureSetup make_setup(const FejerGrid& grid, const FrequencyPoint& t) {
  QuadratureSetup s;
  for (int axis = 0; axis < kMaxDim; ++axis) {
    if (axis < grid.dim) {
      if (grid.n[axis] < 1 || grid.resolution[axis] < 1) {
        throw Error(ErrorKind::InvalidShape, "Fejer order and quadrature resolution must be positive");
      }
      s.weights[axis] = fejer_weights(grid.n[axis], grid.resolution[axis]);
      const double h = kTwoPi / static_cast<double>(grid.resolution[axis]);
      s.shifted[axis].resize(static_cast<std::size_t>(grid.resolution[axis]));
      for (std::int64_t k = 0; k < grid.resolution[axis]; ++k) {
        s.shifted[axis][static_cast<std::size_t>(k)] =
            wrap_angle(-kPi + (static_cast<double>(k) + 0.5) * h - t[axis]);
      }
    } else {
      s.weights[axis] = {1.0};
      s.shifted[axis] = {0.0};
    }
  }
  return s;
}

// One slab (fixed first-axis index) of the quadrature sum.
CompensatedSum quadrature_slab(const DensityFn& f, const QuadratureSetup& s, std::size_t i) {
  CompensatedSum slab;
  std::array<double, kMaxDim> x{s.shifted[0][i], 0.0, 0.0};
  for (std::size_t j = 0; j < s.weights[1].size(); ++j) {
    x[1] = s.shifted[1][j];
    const double wij = s.weights[0][i] * s.weights[1][j];
    for (std::size_t k = 0; k < s.weights[2].size(); ++k) {
      x[2] = s.shifted[2][k];
      slab.add(wij * s.weights[2][k] * checked_density(f, x));
    }
  }
  return slab;
}

}  // namespace

namespace serial {

void linear_filter(const InnovationLattice& xi, std::span<const Tap> taps, const LatticeShape& shape,
                   std::span<double> out) {
  for (std::size_t o = 0; o < shape.volume(); ++o) out[o] = filter_site(xi, taps, shape.site(o));
}

std::complex<double> rotated_sum(const LatticeShape& shape, std::span<const double> values,
                                 const FrequencyPoint& t) {
  CompensatedComplexSum sum;
  for (std::size_t o = 0; o < shape.volume(); ++o) {
    sum.add(std::polar(values[o], t.dot(shape.site(o))));
  }
  return sum.value();
}

double fejer_quadrature(const DensityFn& f, const FejerGrid& grid, const FrequencyPoint& t) {
  const QuadratureSetup s = make_setup(grid, t);
  CompensatedSum total;
  std::array<double, kMaxDim> x{};
  for (std::size_t i = 0; i < s.weights[0].size(); ++i) {
    x[0] = s.shifted[0][i];
    for (std::size_t j = 0; j < s.weights[1].size(); ++j) {
      x[1] = s.shifted[1][j];
      for (std::size_t k = 0; k < s.weights[2].size(); ++k) {
        x[2] = s.shifted[2][k];
        total.add(s.weights[0][i] * s.weights[1][j] * s.weights[2][k] * checked_density(f, x));
      }
    }
  }
  return total.value();
}

}  // namespace serial

namespace omp {

void linear_filter(const InnovationLattice& xi, std::span<const Tap> taps, const LatticeShape& shape,
                   std::span<double> out) {
  const auto volume = static_cast<std::int64_t>(shape.volume());
#pragma omp parallel for schedule(static)
  for (std::int64_t o = 0; o < volume; ++o) {
    out[static_cast<std::size_t>(o)] = filter_site(xi, taps, shape.site(static_cast<std::size_t>(o)));
  }
}

std::complex<double> rotated_sum(const LatticeShape& shape, std::span<const double> values,
                                 const FrequencyPoint& t) {
  std::array<std::vector<std::complex<double>>, kMaxDim> phase;
  for (int axis = 0; axis < kMaxDim; ++axis) {
    const std::int64_t n = shape.extent(axis);
    phase[axis].resize(static_cast<std::size_t>(n));
    for (std::int64_t u = 1; u <= n; ++u) {
      phase[axis][static_cast<std::size_t>(u - 1)] = std::polar(1.0, static_cast<double>(u) * t[axis]);
    }
  }
  const std::int64_t n0 = shape.extent(0);
  const std::int64_t n1 = shape.extent(1);
  const std::int64_t n2 = shape.extent(2);
  std::vector<CompensatedComplexSum> slabs(static_cast<std::size_t>(n0));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n0; ++i) {
    CompensatedComplexSum slab;
    const double* row = values.data() + i * n1 * n2;
    for (std::int64_t j = 0; j < n1; ++j) {
      const std::complex<double> pij = phase[0][static_cast<std::size_t>(i)] * phase[1][static_cast<std::size_t>(j)];
      for (std::int64_t k = 0; k < n2; ++k) {
        slab.add(pij * phase[2][static_cast<std::size_t>(k)] * row[j * n2 + k]);
      }
    }
    slabs[static_cast<std::size_t>(i)] = slab;
  }
  CompensatedComplexSum total;
  for (const auto& slab : slabs) total.add(slab);
  return total.value();
}

double fejer_quadrature(const DensityFn& f, const FejerGrid& grid, const FrequencyPoint& t) {
  const QuadratureSetup s = make_setup(grid, t);
  const std::size_t slabs = s.weights[0].size();
  std::vector<CompensatedSum> partial(slabs);
  for_each_index(slabs, Execution::Parallel,
                 [&](std::size_t i) { partial[i] = quadrature_slab(f, s, i); });
  CompensatedSum total;
  for (const auto& p : partial) total.add(p);
  return total.value();
}

}  // namespace omp

}  // namespace kernels
}  // namespace rfclt
