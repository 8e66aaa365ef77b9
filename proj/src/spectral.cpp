#include "rfclt/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>

#include "rfclt/error.hpp"
#include "rfclt/numerics.hpp"

namespace rfclt {

namespace {

// FFTW's planner is not re-entrant; execution of a finished plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void check_dims(const LatticeShape& shape, const FrequencyPoint& t) {
  if (shape.dim() != t.dim()) {
    throw Error(ErrorKind::InvalidPlan, "frequency has dimension " + std::to_string(t.dim()) +
                                            " but the sample has dimension " + std::to_string(shape.dim()));
  }
}

}  // namespace

FourierSum fourier_sum(const LatticeShape& shape, std::span<const double> values, const FrequencyPoint& t,
                       Execution exec) {
  check_dims(shape, t);
  const std::complex<double> s = exec == Execution::Parallel ? kernels::omp::rotated_sum(shape, values, t)
                                                             : kernels::serial::rotated_sum(shape, values, t);
  return FourierSum{s, shape, t};
}

FourierSum fourier_sum(const LatticeSample& sample, const FrequencyPoint& t, Execution exec) {
  return fourier_sum(sample.shape, sample.values, t, exec);
}

Lag FourierGrid::index(std::size_t offset) const {
  const Lag u = shape_.site(offset);
  return {u[0] - 1, u[1] - 1, u[2] - 1};
}

std::array<double, kMaxDim> FourierGrid::angles(std::size_t offset) const {
  const Lag k = index(offset);
  std::array<double, kMaxDim> a{0.0, 0.0, 0.0};
  for (int axis = 0; axis < shape_.dim(); ++axis) {
    a[axis] = kTwoPi * static_cast<double>(k[axis]) / static_cast<double>(shape_.extent(axis));
  }
  return a;
}

FrequencyPoint FourierGrid::point(std::size_t offset) const {
  const auto a = angles(offset);
  return FrequencyPoint::wrapped(std::span<const double>(a.data(), static_cast<std::size_t>(shape_.dim())));
}

FourierGrid fourier_sum_grid(const LatticeShape& shape, std::span<const double> values) {
  const std::size_t n = shape.volume();
  if (values.size() != n) throw Error(ErrorKind::InvalidShape, "sample size does not match its shape");

  struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
  };
  std::unique_ptr<fftw_complex, FftwFree> in(fftw_alloc_complex(n));
  std::unique_ptr<fftw_complex, FftwFree> out(fftw_alloc_complex(n));
  if (!in || !out) throw Error(ErrorKind::InvalidShape, "FFT buffer allocation failed for " + shape.label());

  std::array<int, kMaxDim> dims{};
  for (int axis = 0; axis < shape.dim(); ++axis) dims[axis] = static_cast<int>(shape.extent(axis));

  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft(shape.dim(), dims.data(), in.get(), out.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (std::size_t o = 0; o < n; ++o) {
    in.get()[o][0] = values[o];
    in.get()[o][1] = 0.0;
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  FourierGrid probe(shape, {});
  std::vector<std::complex<double>> s(n);
  for (std::size_t o = 0; o < n; ++o) {
    const auto a = probe.angles(o);
    const std::complex<double> phase = std::polar(1.0, a[0] + a[1] + a[2]);
    s[o] = phase * std::complex<double>(out.get()[o][0], out.get()[o][1]);
  }
  return FourierGrid(shape, std::move(s));
}

FourierGrid fourier_sum_grid(const LatticeSample& sample) {
  return fourier_sum_grid(sample.shape, sample.values);
}

double periodogram(const FourierSum& s) {
  const int d = s.shape.dim();
  return s.squared_modulus() / (std::pow(kTwoPi, d) * static_cast<double>(s.shape.volume()));
}

double periodogram(const LatticeSample& sample, const FrequencyPoint& t, Execution exec) {
  return periodogram(fourier_sum(sample, t, exec));
}

double fejer_kernel(std::int64_t n, double x) {
  if (n < 1) throw Error(ErrorKind::InvalidShape, "Fejer kernel order must be at least 1");
  const double s = std::sin(0.5 * x);
  if (std::fabs(s) > 1e-6) {
    const double r = std::sin(0.5 * static_cast<double>(n) * x) / s;
    return r * r / static_cast<double>(n);
  }
  // Near 2 pi Z: 1 + 2 sum_{j<n} (1 - j/n) cos(jx), summed from the small end.
  const double nd = static_cast<double>(n);
  double acc = 0.0;
  for (std::int64_t j = n - 1; j >= 1; --j) {
    acc += (1.0 - static_cast<double>(j) / nd) * std::cos(static_cast<double>(j) * x);
  }
  return 1.0 + 2.0 * acc;
}

std::array<std::int64_t, kMaxDim> default_quadrature_resolution(const LatticeShape& shape) {
  std::int64_t m = 1;
  for (int axis = 0; axis < shape.dim(); ++axis) m = std::max(m, shape.extent(axis));
  const std::int64_t r = std::max<std::int64_t>(64, 8 * m);
  std::array<std::int64_t, kMaxDim> res{1, 1, 1};
  for (int axis = 0; axis < shape.dim(); ++axis) res[axis] = r;
  return res;
}

double fejer_smoothed_variance(const DensityFn& f, const LatticeShape& shape, const FrequencyPoint& t,
                               std::optional<std::array<std::int64_t, kMaxDim>> resolution, Execution exec) {
  check_dims(shape, t);
  kernels::FejerGrid grid;
  grid.dim = shape.dim();
  grid.n = shape.extents();
  grid.resolution = resolution.value_or(default_quadrature_resolution(shape));
  for (int axis = shape.dim(); axis < kMaxDim; ++axis) grid.resolution[axis] = 1;
  return exec == Execution::Parallel ? kernels::omp::fejer_quadrature(f, grid, t)
                                     : kernels::serial::fejer_quadrature(f, grid, t);
}

DensityFn density_function(const FieldModel& model) {
  const int d = model.dim();
  const double norm = std::pow(kTwoPi, -d);
  if (const auto* m = model.as<IidModel>()) {
    const double c = m->innovation.variance() * norm;
    return [c](const std::array<double, kMaxDim>&) { return c; };
  }
  if (const auto* m = model.as<LinearModel>()) {
    const double scale = m->innovation.variance() * norm;
    return [entries = m->kernel.entries(), scale](const std::array<double, kMaxDim>& x) {
      std::complex<double> a{0.0, 0.0};
      for (const auto& e : entries) {
        const double phase = static_cast<double>(e.lag[0]) * x[0] + static_cast<double>(e.lag[1]) * x[1] +
                             static_cast<double>(e.lag[2]) * x[2];
        a += std::polar(e.value, -phase);
      }
      return scale * std::norm(a);
    };
  }
  if (const auto* m = model.as<GaussianColumnsModel>()) {
    const double phi = m->phi;
    const double rest = std::pow(kTwoPi, -(d - 1));
    return [phi, rest](const std::array<double, kMaxDim>& x) {
      return rest / (kTwoPi * (1.0 - 2.0 * phi * std::cos(x[0]) + phi * phi));
    };
  }
  // Volterra: gamma has finite range, so the covariance series is f itself.
  const std::int64_t r = *covariance_range(model);
  struct Term {
    Lag lag;
    double gamma;
  };
  std::vector<Term> terms;
  const std::int64_t r1 = d >= 2 ? r : 0;
  const std::int64_t r2 = d >= 3 ? r : 0;
  for (std::int64_t a = -r; a <= r; ++a) {
    for (std::int64_t b = -r1; b <= r1; ++b) {
      for (std::int64_t c = -r2; c <= r2; ++c) {
        const Lag lag{a, b, c};
        const double g = analytic_covariance(model, lag);
        if (g != 0.0) terms.push_back({lag, g});
      }
    }
  }
  return [terms = std::move(terms), norm](const std::array<double, kMaxDim>& x) {
    double acc = 0.0;
    for (const auto& term : terms) {
      acc += term.gamma * std::cos(static_cast<double>(term.lag[0]) * x[0] +
                                   static_cast<double>(term.lag[1]) * x[1] +
                                   static_cast<double>(term.lag[2]) * x[2]);
    }
    // Roundoff can push an exact zero of f slightly negative.
    return std::max(0.0, norm * acc);
  };
}

double spectral_density_partial_sum(const FieldModel& model, const FrequencyPoint& t, std::int64_t radius) {
  const int d = model.dim();
  if (t.dim() != d) throw Error(ErrorKind::InvalidPlan, "frequency dimension does not match model dimension");
  if (radius < 1) throw Error(ErrorKind::InvalidShape, "partial-sum radius must be at least 1");
  const std::int64_t r1 = d >= 2 ? radius : 0;
  const std::int64_t r2 = d >= 3 ? radius : 0;
  CompensatedComplexSum sum;
  for (std::int64_t a = -radius; a <= radius; ++a) {
    for (std::int64_t b = -r1; b <= r1; ++b) {
      for (std::int64_t c = -r2; c <= r2; ++c) {
        const Lag lag{a, b, c};
        const double g = analytic_covariance(model, lag);
        if (g != 0.0) sum.add(std::polar(g, -t.dot(lag)));
      }
    }
  }
  const double norm = std::pow(kTwoPi, -d);
  const std::complex<double> value = sum.value() * norm;
  if (std::fabs(value.imag()) >= 1e-12) {
    throw Error(ErrorKind::InvalidDensity, "covariance series has imaginary part " + std::to_string(value.imag()) +
                                               "; the covariance is not symmetric");
  }
  return value.real();
}

}  // namespace rfclt
