#pragma once

// Data-parallel inner loops. Each kernel has a plain serial reference in
// `serial::` and an OpenMP version in `omp::`; the tests hold the two to
// agreement and bench/ compares their throughput.

#include <complex>
#include <functional>
#include <span>

#include "rfclt/frequency.hpp"
#include "rfclt/lattice.hpp"
#include "rfclt/rng.hpp"

namespace rfclt {

/// f evaluated at a point of [-pi, pi)^d. Called many times inside
/// quadratures, so the argument is a raw coordinate array.
using DensityFn = std::function<double(const std::array<double, kMaxDim>&)>;

namespace kernels {

struct Tap {
  Lag lag{};
  double value = 0.0;
};

/// Per-axis quadrature description for the Fejer-smoothed integral.
struct FejerGrid {
  int dim = 2;
  std::array<std::int64_t, kMaxDim> n{1, 1, 1};           // Fejer orders
  std::array<std::int64_t, kMaxDim> resolution{1, 1, 1};  // midpoints per axis
};

namespace serial {

/// out[k] = sum_j a_j xi_{k-j} over the window of `shape`.
void linear_filter(const InnovationLattice& xi, std::span<const Tap> taps, const LatticeShape& shape,
                   std::span<double> out);

/// sum_{1<=u<=n} exp(i u.t) X_u, one std::polar per site, compensated sum.
std::complex<double> rotated_sum(const LatticeShape& shape, std::span<const double> values,
                                 const FrequencyPoint& t);

/// Midpoint rule for int_I prod_i K_{n_i}(x_i) f(x - t) dx. Throws
/// Error(InvalidDensity) on negative or non-finite density values.
double fejer_quadrature(const DensityFn& f, const FejerGrid& grid, const FrequencyPoint& t);

}  // namespace serial

namespace omp {

void linear_filter(const InnovationLattice& xi, std::span<const Tap> taps, const LatticeShape& shape,
                   std::span<double> out);

/// Slab-parallel version with per-axis phase tables; slab partials are
/// combined in slab order so the result is independent of thread count.
std::complex<double> rotated_sum(const LatticeShape& shape, std::span<const double> values,
                                 const FrequencyPoint& t);

double fejer_quadrature(const DensityFn& f, const FejerGrid& grid, const FrequencyPoint& t);

}  // namespace omp

}  // namespace kernels
}  // namespace rfclt
