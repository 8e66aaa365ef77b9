#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rfclt/execution.hpp"
#include "rfclt/frequency.hpp"
#include "rfclt/lattice.hpp"
#include "rfclt/rng.hpp"

namespace rfclt {

/// Finitely supported coefficients a_j, j in Z^d. The support is explicit:
/// entries are unique, sorted by lag, and never zero.
class CoefficientKernel {
 public:
  struct Entry {
    Lag lag{};
    double value = 0.0;
  };

  CoefficientKernel() = default;

  /// Throws Error(InvalidKernel) on duplicate lags, zero or non-finite
  /// coefficients, or nonzero coordinates beyond `dim`.
  static CoefficientKernel make(int dim, std::vector<Entry> entries);

  int dim() const noexcept { return dim_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  /// a_lag, or 0 outside the support.
  double coefficient(const Lag& lag) const;
  double sum_of_squares() const;
  std::int64_t radius() const;
  std::array<std::int64_t, kMaxDim> halo() const;

 private:
  int dim_ = 1;
  std::vector<Entry> entries_;
};

/// Second-order coefficients a_{u,v} with a_{u,u} = 0.
class VolterraKernel {
 public:
  struct Entry {
    Lag u{};
    Lag v{};
    double value = 0.0;
  };

  VolterraKernel() = default;

  /// Throws Error(InvalidKernel) on diagonal entries (the message names the
  /// offending pair), duplicates, zero or non-finite coefficients.
  static VolterraKernel make(int dim, std::vector<Entry> entries);

  int dim() const noexcept { return dim_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  double coefficient(const Lag& u, const Lag& v) const;
  std::int64_t radius() const;
  std::array<std::int64_t, kMaxDim> halo() const;

 private:
  int dim_ = 1;
  std::vector<Entry> entries_;
};

struct IidModel {
  int dim = 2;
  InnovationSpec innovation = InnovationSpec::standard_normal();
};

struct LinearModel {
  CoefficientKernel kernel;
  InnovationSpec innovation = InnovationSpec::standard_normal();
};

struct VolterraModel {
  VolterraKernel kernel;
  InnovationSpec innovation = InnovationSpec::standard_normal();
};

/// Independent columns (fixed last coordinates), each a stationary AR(1)
/// along the first axis with standard normal innovations.
struct GaussianColumnsModel {
  int dim = 2;
  double phi = 0.0;
};

class FieldModel {
 public:
  using Variant = std::variant<IidModel, LinearModel, VolterraModel, GaussianColumnsModel>;

  static FieldModel iid(int dim, InnovationSpec innovation = InnovationSpec::standard_normal());
  static FieldModel linear(CoefficientKernel kernel,
                           InnovationSpec innovation = InnovationSpec::standard_normal());
  static FieldModel volterra(VolterraKernel kernel,
                             InnovationSpec innovation = InnovationSpec::standard_normal());
  /// Throws Error(InvalidKernel) unless -1 < phi < 1.
  static FieldModel gaussian_columns(int dim, double phi);

  const Variant& variant() const noexcept { return model_; }
  int dim() const;
  std::string kind_name() const;
  /// Innovation law (standard normal for GaussianColumns).
  InnovationSpec innovation() const;
  /// Halo of innovations needed to evaluate the field on a window.
  std::array<std::int64_t, kMaxDim> halo() const;

  template <typename T>
  const T* as() const noexcept {
    return std::get_if<T>(&model_);
  }

 private:
  explicit FieldModel(Variant v) : model_(std::move(v)) {}
  Variant model_;
};

/// One realization X_u, 1 <= u <= n.
struct LatticeSample {
  LatticeShape shape;
  std::vector<double> values;
  FieldModel model;
  StreamKey key;

  double at(const Lag& u) const { return values[shape.offset(u)]; }
};

/// Evaluates the model on `shape` from innovations keyed by `key`. Exact
/// finite sums; the result depends only on (model, shape, key).
LatticeSample simulate(const FieldModel& model, const LatticeShape& shape, const StreamKey& key,
                       Execution exec = Execution::Serial);

/// Evaluates the model on pre-sampled innovations (which must cover the halo).
std::vector<double> evaluate_field(const FieldModel& model, const InnovationLattice& innovations,
                                   Execution exec = Execution::Serial);

/// gamma(lag) = E X_lag X_0 in closed form.
double analytic_covariance(const FieldModel& model, const Lag& lag);

/// Largest sup-norm lag with gamma != 0, or nullopt when the covariance has
/// infinite range (GaussianColumns with phi != 0).
std::optional<std::int64_t> covariance_range(const FieldModel& model);

/// A(t) = sum_j a_j exp(-i j.t).
std::complex<double> transfer_function(const CoefficientKernel& kernel, const FrequencyPoint& t);

/// Closed-form f(t) for IID, Linear and GaussianColumns. Volterra throws
/// Error(UnsupportedModel); use the projection estimator instead.
double analytic_spectral_density(const FieldModel& model, const FrequencyPoint& t);

/// Canonical test models used across the test suites and the CLI examples.
namespace test_models {
/// a_(0,0) = 1, a_(1,0) = 0.5, a_(0,1) = -0.3 in d = 2; analogues for d = 1, 3.
FieldModel linear(int dim = 2);
/// a_{(0,0),(1,0)} = 1, a_{(1,1),(0,1)} = 0.5.
FieldModel volterra();
/// a_{(0,0),(1,0)} = 1.
FieldModel volterra_single_pair();
}  // namespace test_models

}  // namespace rfclt
