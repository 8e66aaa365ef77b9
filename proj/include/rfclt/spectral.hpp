#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "rfclt/execution.hpp"
#include "rfclt/frequency.hpp"
#include "rfclt/kernels.hpp"
#include "rfclt/lattice.hpp"
#include "rfclt/models.hpp"

namespace rfclt {

/// S_n(t) = sum_{1<=u<=n} exp(i u.t) X_u.
struct FourierSum {
  std::complex<double> value;
  LatticeShape shape;
  FrequencyPoint t;

  double squared_modulus() const noexcept { return value.real() * value.real() + value.imag() * value.imag(); }
};

/// Direct summation with compensated accumulation. This is the oracle path.
/// Throws Error(InvalidPlan) if t and the sample differ in dimension.
FourierSum fourier_sum(const LatticeSample& sample, const FrequencyPoint& t, Execution exec = Execution::Serial);
FourierSum fourier_sum(const LatticeShape& shape, std::span<const double> values, const FrequencyPoint& t,
                       Execution exec = Execution::Serial);

/// S_n on every Fourier frequency 2 pi k / n, 0 <= k < n, via FFTW. Offsets
/// follow the lattice layout: value(k) lives at shape.offset(k + 1).
class FourierGrid {
 public:
  FourierGrid(LatticeShape shape, std::vector<std::complex<double>> values)
      : shape_(shape), values_(std::move(values)) {}

  const LatticeShape& shape() const noexcept { return shape_; }
  std::span<const std::complex<double>> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  /// Grid index k (0-based per axis) of an offset.
  Lag index(std::size_t offset) const;
  /// (2 pi k_1 / n_1, ...) in [0, 2 pi), unused axes 0.
  std::array<double, kMaxDim> angles(std::size_t offset) const;
  /// The same frequency wrapped into [-pi, pi).
  FrequencyPoint point(std::size_t offset) const;

  std::complex<double> operator[](std::size_t offset) const noexcept { return values_[offset]; }

 private:
  LatticeShape shape_;
  std::vector<std::complex<double>> values_;
};

/// Uses the unnormalized backward transform and multiplies by exp(i t.1) so
/// the result matches the 1-based direct sum.
FourierGrid fourier_sum_grid(const LatticeSample& sample);
FourierGrid fourier_sum_grid(const LatticeShape& shape, std::span<const double> values);

/// I_n(t) = |S_n(t)|^2 / ((2 pi)^d n_1...n_d).
double periodogram(const LatticeSample& sample, const FrequencyPoint& t, Execution exec = Execution::Serial);
double periodogram(const FourierSum& s);

/// K_n(x) = (1/n) (sin(nx/2) / sin(x/2))^2, by direct summation near 2 pi Z.
/// Throws Error(InvalidShape) for n < 1.
double fejer_kernel(std::int64_t n, double x);

/// Points per axis used when no quadrature resolution is given: 8 n_i, at
/// least 64.
std::array<std::int64_t, kMaxDim> default_quadrature_resolution(const LatticeShape& shape);

/// int_I prod_i K_{n_i}(x_i) f(x - t) dx by the midpoint rule; f is taken
/// 2 pi periodic. Equals (n_1...n_d)^{-1} E|S_n(t)|^2 for a field with density
/// f. Throws Error(InvalidDensity) on negative or non-finite values of f.
double fejer_smoothed_variance(const DensityFn& f, const LatticeShape& shape, const FrequencyPoint& t,
                               std::optional<std::array<std::int64_t, kMaxDim>> resolution = std::nullopt,
                               Execution exec = Execution::Serial);

/// f as a plain function of x for models with a closed form or a finite
/// covariance range (Volterra goes through the covariance series).
DensityFn density_function(const FieldModel& model);

/// (2 pi)^{-d} sum_{|u|_inf <= radius} gamma(u) exp(-i u.t). Throws
/// Error(InvalidDensity) if the discarded imaginary part reaches 1e-12 and
/// Error(InvalidShape) for radius < 1.
double spectral_density_partial_sum(const FieldModel& model, const FrequencyPoint& t, std::int64_t radius);

}  // namespace rfclt
