#pragma once

// Small hand-rolled generators for property tests. Each property draws its
// cases from a fixed seed so failures reproduce.

#include <cstdint>
#include <random>
#include <vector>

#include "rfclt/frequency.hpp"
#include "rfclt/lattice.hpp"
#include "rfclt/models.hpp"

namespace rfclt::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  bool coin() { return integer(0, 1) == 1; }

  int dim() { return static_cast<int>(integer(1, 3)); }

  Lag lag(int dim, std::int64_t r) {
    Lag l{0, 0, 0};
    for (int axis = 0; axis < dim; ++axis) l[axis] = integer(-r, r);
    return l;
  }

  LatticeShape shape(int dim, std::int64_t max_extent) {
    std::array<std::int64_t, kMaxDim> e{1, 1, 1};
    for (int axis = 0; axis < dim; ++axis) e[axis] = integer(1, max_extent);
    return LatticeShape::make(dim, e);
  }

  /// A point that is generic with overwhelming probability.
  FrequencyPoint frequency(int dim) {
    std::vector<double> t;
    for (int axis = 0; axis < dim; ++axis) t.push_back(real(-3.1, 3.1));
    return FrequencyPoint::make(std::span<const double>(t));
  }

  double nonzero_coefficient() {
    double v = 0.0;
    while (std::abs(v) < 0.05) v = real(-1.0, 1.0);
    return v;
  }

  CoefficientKernel linear_kernel(int dim, std::int64_t r, int max_terms) {
    std::vector<CoefficientKernel::Entry> entries;
    const int n = static_cast<int>(integer(1, max_terms));
    for (int i = 0; i < n; ++i) {
      const Lag l = lag(dim, r);
      bool dup = false;
      for (const auto& e : entries) dup = dup || e.lag == l;
      if (!dup) entries.push_back({l, nonzero_coefficient()});
    }
    return CoefficientKernel::make(dim, entries);
  }

  VolterraKernel volterra_kernel(int dim, std::int64_t r, int max_terms) {
    std::vector<VolterraKernel::Entry> entries;
    const int n = static_cast<int>(integer(1, max_terms));
    for (int i = 0; i < n; ++i) {
      const Lag u = lag(dim, r);
      const Lag v = lag(dim, r);
      if (u == v) continue;
      bool dup = false;
      for (const auto& e : entries) dup = dup || (e.u == u && e.v == v);
      if (!dup) entries.push_back({u, v, nonzero_coefficient()});
    }
    if (entries.empty()) {
      Lag u{0, 0, 0};
      Lag v{1, 0, 0};
      entries.push_back({u, v, 1.0});
    }
    return VolterraKernel::make(dim, entries);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rfclt::testing
