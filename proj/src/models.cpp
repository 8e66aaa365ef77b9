#include "rfclt/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <tuple>

#include "rfclt/error.hpp"
#include "rfclt/kernels.hpp"

namespace rfclt {

namespace {

void check_lag_dim(const Lag& lag, int dim, const char* what) {
  for (int axis = dim; axis < kMaxDim; ++axis) {
    if (lag[axis] != 0) {
      throw Error(ErrorKind::InvalidKernel, std::string(what) + " has a nonzero coordinate beyond dimension " +
                                                std::to_string(dim));
    }
  }
}

void check_coefficient(double value, const std::string& where) {
  if (!std::isfinite(value)) throw Error(ErrorKind::InvalidKernel, "coefficient " + where + " is not finite");
  if (value == 0.0) {
    throw Error(ErrorKind::InvalidKernel,
                "coefficient " + where + " is zero; list only the support of the kernel");
  }
}

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw Error(ErrorKind::InvalidShape, "model dimension must be 1, 2 or 3");
  }
}

std::array<std::int64_t, kMaxDim> halo_max(std::array<std::int64_t, kMaxDim> h, const Lag& lag) {
  for (int axis = 0; axis < kMaxDim; ++axis) h[axis] = std::max<std::int64_t>(h[axis], std::llabs(lag[axis]));
  return h;
}

}  // namespace

CoefficientKernel CoefficientKernel::make(int dim, std::vector<Entry> entries) {
  check_dim(dim);
  for (const Entry& e : entries) {
    check_lag_dim(e.lag, dim, "kernel lag");
    check_coefficient(e.value, "at lag " + format_lag(e.lag, dim));
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.lag < b.lag; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].lag == entries[i - 1].lag) {
      throw Error(ErrorKind::InvalidKernel, "duplicate kernel lag " + format_lag(entries[i].lag, dim));
    }
  }
  CoefficientKernel kernel;
  kernel.dim_ = dim;
  kernel.entries_ = std::move(entries);
  return kernel;
}

double CoefficientKernel::coefficient(const Lag& lag) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), lag,
                             [](const Entry& e, const Lag& l) { return e.lag < l; });
  return (it != entries_.end() && it->lag == lag) ? it->value : 0.0;
}

double CoefficientKernel::sum_of_squares() const {
  double s = 0.0;
  for (const Entry& e : entries_) s += e.value * e.value;
  return s;
}

std::int64_t CoefficientKernel::radius() const {
  std::int64_t r = 0;
  for (const Entry& e : entries_) r = std::max(r, sup_norm(e.lag));
  return r;
}

std::array<std::int64_t, kMaxDim> CoefficientKernel::halo() const {
  std::array<std::int64_t, kMaxDim> h{0, 0, 0};
  for (const Entry& e : entries_) h = halo_max(h, e.lag);
  return h;
}

VolterraKernel VolterraKernel::make(int dim, std::vector<Entry> entries) {
  check_dim(dim);
  for (const Entry& e : entries) {
    const std::string pair = "(" + format_lag(e.u, dim) + ", " + format_lag(e.v, dim) + ")";
    check_lag_dim(e.u, dim, "Volterra lag u");
    check_lag_dim(e.v, dim, "Volterra lag v");
    if (e.u == e.v) {
      throw Error(ErrorKind::InvalidKernel,
                  "Volterra kernel has diagonal entry a_{u,u} at pair " + pair + "; diagonal terms must be zero");
    }
    check_coefficient(e.value, "at pair " + pair);
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].u == entries[i - 1].u && entries[i].v == entries[i - 1].v) {
      throw Error(ErrorKind::InvalidKernel, "duplicate Volterra pair (" + format_lag(entries[i].u, dim) +
                                                ", " + format_lag(entries[i].v, dim) + ")");
    }
  }
  VolterraKernel kernel;
  kernel.dim_ = dim;
  kernel.entries_ = std::move(entries);
  return kernel;
}

double VolterraKernel::coefficient(const Lag& u, const Lag& v) const {
  for (const Entry& e : entries_) {
    if (e.u == u && e.v == v) return e.value;
  }
  return 0.0;
}

std::int64_t VolterraKernel::radius() const {
  std::int64_t r = 0;
  for (const Entry& e : entries_) r = std::max({r, sup_norm(e.u), sup_norm(e.v)});
  return r;
}

std::array<std::int64_t, kMaxDim> VolterraKernel::halo() const {
  std::array<std::int64_t, kMaxDim> h{0, 0, 0};
  for (const Entry& e : entries_) h = halo_max(halo_max(h, e.u), e.v);
  return h;
}

FieldModel FieldModel::iid(int dim, InnovationSpec innovation) {
  check_dim(dim);
  return FieldModel(IidModel{dim, innovation});
}

FieldModel FieldModel::linear(CoefficientKernel kernel, InnovationSpec innovation) {
  return FieldModel(LinearModel{std::move(kernel), innovation});
}

FieldModel FieldModel::volterra(VolterraKernel kernel, InnovationSpec innovation) {
  return FieldModel(VolterraModel{std::move(kernel), innovation});
}

FieldModel FieldModel::gaussian_columns(int dim, double phi) {
  check_dim(dim);
  if (!(phi > -1.0 && phi < 1.0)) {
    throw Error(ErrorKind::InvalidKernel, "AR coefficient phi must lie in (-1, 1)");
  }
  return FieldModel(GaussianColumnsModel{dim, phi});
}

int FieldModel::dim() const {
  return std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearModel> || std::is_same_v<T, VolterraModel>) {
          return m.kernel.dim();
        } else {
          return m.dim;
        }
      },
      model_);
}

std::string FieldModel::kind_name() const {
  switch (model_.index()) {
    case 0: return "iid";
    case 1: return "linear";
    case 2: return "volterra";
    case 3: return "gaussian_columns";
  }
  return "unknown";
}

InnovationSpec FieldModel::innovation() const {
  return std::visit(
      [](const auto& m) -> InnovationSpec {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussianColumnsModel>) {
          return InnovationSpec::standard_normal();
        } else {
          return m.innovation;
        }
      },
      model_);
}

std::array<std::int64_t, kMaxDim> FieldModel::halo() const {
  if (const auto* m = as<LinearModel>()) return m->kernel.halo();
  if (const auto* m = as<VolterraModel>()) return m->kernel.halo();
  return {0, 0, 0};
}

namespace {

std::vector<double> evaluate_gaussian_columns(const GaussianColumnsModel& m,
                                              const InnovationLattice& z, Execution exec) {
  const LatticeShape& shape = z.shape();
  std::vector<double> out(shape.volume());
  const std::int64_t n0 = shape.extent(0);
  const std::int64_t columns = shape.extent(1) * shape.extent(2);
  const double stationary_sd = 1.0 / std::sqrt(1.0 - m.phi * m.phi);
  // Each column is started from the exact stationary law, so no burn-in.
  for_each_index(static_cast<std::size_t>(columns), exec, [&](std::size_t c) {
    const std::int64_t j = static_cast<std::int64_t>(c) / shape.extent(2) + 1;
    const std::int64_t k = static_cast<std::int64_t>(c) % shape.extent(2) + 1;
    double x = stationary_sd * z[{1, j, k}];
    out[shape.offset({1, j, k})] = x;
    for (std::int64_t i = 2; i <= n0; ++i) {
      x = m.phi * x + z[{i, j, k}];
      out[shape.offset({i, j, k})] = x;
    }
  });
  return out;
}

}  // namespace

std::vector<double> evaluate_field(const FieldModel& model, const InnovationLattice& xi, Execution exec) {
  const LatticeShape& shape = xi.shape();
  const auto need = model.halo();
  for (int axis = 0; axis < shape.dim(); ++axis) {
    if (xi.halo()[axis] < need[axis]) {
      throw Error(ErrorKind::MissingInnovation, "innovation window halo is smaller than the model requires");
    }
  }
  std::vector<double> out(shape.volume());
  if (model.as<IidModel>()) {
    for (std::size_t o = 0; o < out.size(); ++o) out[o] = xi[shape.site(o)];
  } else if (const auto* m = model.as<LinearModel>()) {
    std::vector<kernels::Tap> taps;
    for (const auto& e : m->kernel.entries()) taps.push_back({e.lag, e.value});
    if (exec == Execution::Parallel) {
      kernels::omp::linear_filter(xi, taps, shape, out);
    } else {
      kernels::serial::linear_filter(xi, taps, shape, out);
    }
  } else if (const auto* m = model.as<VolterraModel>()) {
    const auto& entries = m->kernel.entries();
    for_each_index(out.size(), exec, [&](std::size_t o) {
      const Lag k = shape.site(o);
      double acc = 0.0;
      for (const auto& e : entries) acc += e.value * xi[k - e.u] * xi[k - e.v];
      out[o] = acc;
    });
  } else if (const auto* m = model.as<GaussianColumnsModel>()) {
    out = evaluate_gaussian_columns(*m, xi, exec);
  }
  return out;
}

LatticeSample simulate(const FieldModel& model, const LatticeShape& shape, const StreamKey& key,
                       Execution exec) {
  if (shape.dim() != model.dim()) {
    throw Error(ErrorKind::InvalidShape, "shape dimension " + std::to_string(shape.dim()) +
                                             " does not match model dimension " + std::to_string(model.dim()));
  }
  const InnovationLattice xi = sample_innovations(make_stream(key), model.innovation(), shape, model.halo());
  return LatticeSample{shape, evaluate_field(model, xi, exec), model, key};
}

double analytic_covariance(const FieldModel& model, const Lag& lag) {
  if (const auto* m = model.as<IidModel>()) {
    return lag == Lag{0, 0, 0} ? m->innovation.variance() : 0.0;
  }
  if (const auto* m = model.as<LinearModel>()) {
    // sum_j a_j a_{j+lag}
    double s = 0.0;
    for (const auto& e : m->kernel.entries()) s += e.value * m->kernel.coefficient(e.lag + lag);
    return m->innovation.variance() * s;
  }
  if (const auto* m = model.as<VolterraModel>()) {
    // E xi_{k-u} xi_{k-v} xi_{-p} xi_{-q} = sigma^4 iff {k-u, k-v} = {-p, -q}
    // as sets; u != v and p != q rule out fourth moments.
    double s = 0.0;
    for (const auto& e : m->kernel.entries()) {
      s += e.value * (m->kernel.coefficient(e.u + lag, e.v + lag) + m->kernel.coefficient(e.v + lag, e.u + lag));
    }
    const double var = m->innovation.variance();
    return var * var * s;
  }
  const auto& g = std::get<GaussianColumnsModel>(model.variant());
  if (lag[1] != 0 || lag[2] != 0) return 0.0;
  return std::pow(g.phi, static_cast<double>(std::llabs(lag[0]))) / (1.0 - g.phi * g.phi);
}

std::optional<std::int64_t> covariance_range(const FieldModel& model) {
  if (model.as<IidModel>()) return 0;
  if (const auto* m = model.as<LinearModel>()) {
    std::int64_t r = 0;
    for (const auto& a : m->kernel.entries()) {
      for (const auto& b : m->kernel.entries()) r = std::max(r, sup_norm(a.lag - b.lag));
    }
    return r;
  }
  if (const auto* m = model.as<VolterraModel>()) {
    // gamma(k) != 0 needs a pair (u, v) with (u-k, v-k) or (v-k, u-k) in the
    // support, so |k| is bounded by differences of support lags.
    std::int64_t r = 0;
    for (const auto& a : m->kernel.entries()) {
      for (const auto& b : m->kernel.entries()) {
        r = std::max({r, sup_norm(a.u - b.u), sup_norm(a.u - b.v)});
      }
    }
    return r;
  }
  const auto& g = std::get<GaussianColumnsModel>(model.variant());
  if (g.phi == 0.0) return 0;
  return std::nullopt;
}

std::complex<double> transfer_function(const CoefficientKernel& kernel, const FrequencyPoint& t) {
  std::complex<double> a{0.0, 0.0};
  for (const auto& e : kernel.entries()) a += std::polar(e.value, -t.dot(e.lag));
  return a;
}

double analytic_spectral_density(const FieldModel& model, const FrequencyPoint& t) {
  const int d = model.dim();
  if (t.dim() != d) {
    throw Error(ErrorKind::InvalidPlan, "frequency dimension does not match model dimension");
  }
  const double norm = std::pow(kTwoPi, -d);
  if (const auto* m = model.as<IidModel>()) return m->innovation.variance() * norm;
  if (const auto* m = model.as<LinearModel>()) {
    return m->innovation.variance() * std::norm(transfer_function(m->kernel, t)) * norm;
  }
  if (model.as<VolterraModel>()) {
    throw Error(ErrorKind::UnsupportedModel,
                "no closed-form spectral density for Volterra fields; use the projection "
                "Monte Carlo estimator (spectral_density_projection_mc)");
  }
  const auto& g = std::get<GaussianColumnsModel>(model.variant());
  const double ar = 1.0 / (kTwoPi * (1.0 - 2.0 * g.phi * std::cos(t[0]) + g.phi * g.phi));
  return ar * std::pow(kTwoPi, -(d - 1));
}

namespace test_models {

FieldModel linear(int dim) {
  switch (dim) {
    case 1:
      return FieldModel::linear(CoefficientKernel::make(1, {{{0, 0, 0}, 1.0}, {{1, 0, 0}, 0.5}, {{2, 0, 0}, -0.3}}));
    case 2:
      return FieldModel::linear(CoefficientKernel::make(2, {{{0, 0, 0}, 1.0}, {{1, 0, 0}, 0.5}, {{0, 1, 0}, -0.3}}));
    case 3:
      return FieldModel::linear(CoefficientKernel::make(
          3, {{{0, 0, 0}, 1.0}, {{1, 0, 0}, 0.5}, {{0, 1, 0}, -0.3}, {{0, 0, 1}, 0.2}}));
    default:
      throw Error(ErrorKind::InvalidShape, "test model dimension must be 1, 2 or 3");
  }
}

FieldModel volterra() {
  return FieldModel::volterra(
      VolterraKernel::make(2, {{{0, 0, 0}, {1, 0, 0}, 1.0}, {{1, 1, 0}, {0, 1, 0}, 0.5}}));
}

FieldModel volterra_single_pair() {
  return FieldModel::volterra(VolterraKernel::make(2, {{{0, 0, 0}, {1, 0, 0}, 1.0}}));
}

}  // namespace test_models

}  // namespace rfclt
