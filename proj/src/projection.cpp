#include "rfclt/projection.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rfclt/error.hpp"
#include "rfclt/kernels.hpp"
#include "rfclt/stats.hpp"

namespace rfclt {

namespace {

void require_symbolic(const FieldModel& model) {
  if (model.as<GaussianColumnsModel>()) {
    throw Error(ErrorKind::UnsupportedModel,
                "projections of GaussianColumns fields have no finite symbolic form");
  }
}

std::int64_t active_extent(int axis, int dim, std::int64_t r) { return axis < dim ? r : 0; }

template <typename Fn>
void for_each_lag_in_box(int dim, std::int64_t r, Fn&& fn) {
  const std::int64_t r1 = active_extent(1, dim, r);
  const std::int64_t r2 = active_extent(2, dim, r);
  for (std::int64_t a = -r; a <= r; ++a) {
    for (std::int64_t b = -r1; b <= r1; ++b) {
      for (std::int64_t c = -r2; c <= r2; ++c) fn(Lag{a, b, c});
    }
  }
}

bool below_or_at(const Lag& f, const Lag& c, int dim) {
  for (int axis = 0; axis < dim; ++axis) {
    if (f[axis] > c[axis]) return false;
  }
  return true;
}

}  // namespace

TermList normalize(TermList terms) {
  for (Term& term : terms) {
    std::sort(term.factors.begin(), term.factors.end());
    if (std::adjacent_find(term.factors.begin(), term.factors.end()) != term.factors.end()) {
      throw Error(ErrorKind::InvalidKernel, "monomial with a repeated innovation factor");
    }
  }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& a, const Term& b) { return a.factors < b.factors; });
  TermList merged;
  for (Term& term : terms) {
    if (!merged.empty() && merged.back().factors == term.factors) {
      merged.back().coefficient += term.coefficient;
    } else {
      merged.push_back(std::move(term));
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coefficient == 0.0; });
  return merged;
}

TermList field_terms(const FieldModel& model, const Lag& j) {
  require_symbolic(model);
  TermList terms;
  if (model.as<IidModel>()) {
    terms.push_back({1.0, {j}});
  } else if (const auto* m = model.as<LinearModel>()) {
    for (const auto& e : m->kernel.entries()) terms.push_back({e.value, {j - e.lag}});
  } else if (const auto* m = model.as<VolterraModel>()) {
    for (const auto& e : m->kernel.entries()) terms.push_back({e.value, {j - e.u, j - e.v}});
  }
  return normalize(std::move(terms));
}

TermList conditional_expectation(const TermList& terms, const Lag& c, int dim) {
  TermList kept;
  for (const Term& term : terms) {
    const bool measurable = std::all_of(term.factors.begin(), term.factors.end(),
                                        [&](const Lag& f) { return below_or_at(f, c, dim); });
    if (measurable) kept.push_back(term);
  }
  return kept;
}

TermList project(const TermList& terms, const Lag& u, int dim) {
  TermList sum;
  for (unsigned mask = 0; mask < (1u << dim); ++mask) {
    Lag corner = u;
    int flips = 0;
    for (int axis = 0; axis < dim; ++axis) {
      if (mask & (1u << axis)) {
        corner[axis] -= 1;
        ++flips;
      }
    }
    const double sign = (flips % 2 == 0) ? 1.0 : -1.0;
    for (Term term : conditional_expectation(terms, corner, dim)) {
      term.coefficient *= sign;
      sum.push_back(std::move(term));
    }
  }
  return normalize(std::move(sum));
}

TermList project_p0(const FieldModel& model, const Lag& j) {
  return project(field_terms(model, j), Lag{0, 0, 0}, model.dim());
}

double second_moment(const TermList& terms, double innovation_variance) {
  CompensatedSum s;
  for (const Term& term : terms) {
    s.add(term.coefficient * term.coefficient *
          std::pow(innovation_variance, static_cast<double>(term.factors.size())));
  }
  return s.value();
}

std::int64_t default_truncation(const FieldModel& model) {
  require_symbolic(model);
  if (const auto* m = model.as<LinearModel>()) return m->kernel.radius();
  if (const auto* m = model.as<VolterraModel>()) return m->kernel.radius();
  return 0;
}

double projection_norm_sum(const FieldModel& model, std::int64_t ell) {
  const double var = model.innovation().variance();
  CompensatedSum total;
  for_each_lag_in_box(model.dim(), ell, [&](const Lag& j) { total.add(second_moment(project_p0(model, j), var)); });
  return total.value();
}

ProjectionSeries ProjectionSeries::build(const FieldModel& model, const FrequencyPoint& t,
                                         std::optional<std::int64_t> ell) {
  require_symbolic(model);
  if (t.dim() != model.dim()) {
    throw Error(ErrorKind::InvalidPlan, "frequency dimension does not match model dimension");
  }
  const std::int64_t truncation = ell.value_or(default_truncation(model));
  if (truncation < 0) throw Error(ErrorKind::InvalidPlan, "truncation must be non-negative");

  std::map<std::vector<Lag>, std::complex<double>> merged;
  for_each_lag_in_box(model.dim(), truncation, [&](const Lag& j) {
    const std::complex<double> phase = std::polar(1.0, -t.dot(j));
    for (const Term& term : project_p0(model, j)) merged[term.factors] += term.coefficient * phase;
  });

  ProjectionSeries series;
  series.model_ = model;
  series.t_ = t;
  series.ell_ = truncation;
  for (auto& [factors, c] : merged) {
    for (const Lag& f : factors) {
      for (int axis = 0; axis < model.dim(); ++axis) {
        series.halo_[axis] = std::max<std::int64_t>(series.halo_[axis], std::llabs(f[axis]));
      }
    }
    series.terms_.push_back({c, factors});
  }
  return series;
}

double ProjectionSeries::second_moment() const {
  const double var = model_.innovation().variance();
  CompensatedSum s;
  for (const auto& term : terms_) {
    s.add(std::norm(term.coefficient) * std::pow(var, static_cast<double>(term.factors.size())));
  }
  return s.value();
}

std::complex<double> ProjectionSeries::evaluate_at(const InnovationLattice& xi, const Lag& site,
                                                   bool conjugate) const {
  std::complex<double> acc{0.0, 0.0};
  for (const auto& term : terms_) {
    double product = 1.0;
    for (const Lag& f : term.factors) product *= xi.at(site + f);
    acc += (conjugate ? std::conj(term.coefficient) : term.coefficient) * product;
  }
  return acc;
}

Lag origin_site(int dim) {
  Lag o{1, 1, 1};
  for (int axis = 0; axis < dim; ++axis) o[axis] = 0;
  return o;
}

std::complex<double> d0_truncated(const ProjectionSeries& series, const InnovationLattice& innovations) {
  return series.evaluate_at(innovations, origin_site(series.dim()));
}

namespace {

StreamKey replicate_key(const StreamKey& key, std::size_t r) {
  return {key.master_seed, key.replicate_id + r, key.lane};
}

std::array<std::int64_t, kMaxDim> combined_halo(const ProjectionSeries& series) {
  const auto a = series.halo();
  const auto b = series.model().halo();
  return {std::max(a[0], b[0]), std::max(a[1], b[1]), std::max(a[2], b[2])};
}

}  // namespace

MeanEstimate spectral_density_projection_mc(const FieldModel& model, const FrequencyPoint& t,
                                            std::optional<std::int64_t> ell, std::size_t replicates,
                                            const StreamKey& key, Execution exec) {
  const ProjectionSeries series = ProjectionSeries::build(model, t, ell);
  const int d = model.dim();
  const LatticeShape cell = LatticeShape::cube(d, 1);
  // The origin sits one step below the single window site.
  auto halo = series.halo();
  for (int axis = 0; axis < d; ++axis) halo[axis] += 1;
  std::vector<double> squares(replicates);
  for_each_index(replicates, exec, [&](std::size_t r) {
    const InnovationLattice xi =
        sample_innovations(make_stream(replicate_key(key, r)), model.innovation(), cell, halo);
    squares[r] = std::norm(d0_truncated(series, xi));
  });
  const MeanEstimate m = estimate_mean(squares);
  const double norm = std::pow(kTwoPi, -d);
  return {m.mean * norm, m.standard_error * norm};
}

MartingaleSum martingale_sum(const ProjectionSeries& series, const InnovationLattice& innovations) {
  const LatticeShape& shape = innovations.shape();
  if (shape.dim() != series.dim()) {
    throw Error(ErrorKind::InvalidPlan, "innovation lattice dimension does not match the series");
  }
  for (int axis = 0; axis < shape.dim(); ++axis) {
    if (innovations.halo()[axis] < series.halo()[axis]) {
      throw Error(ErrorKind::MissingInnovation, "innovation halo is smaller than the projection series needs");
    }
  }
  const FrequencyPoint& t = series.t();
  CompensatedComplexSum sum;
  for (std::size_t o = 0; o < shape.volume(); ++o) {
    const Lag j = shape.site(o);
    sum.add(std::polar(1.0, t.dot(j)) * series.evaluate_at(innovations, j, true));
  }
  return MartingaleSum{sum.value(), shape, t, series.truncation()};
}

MartingaleSum martingale_sum(const ProjectionSeries& series, const LatticeShape& shape, const StreamKey& key) {
  const InnovationLattice xi =
      sample_innovations(make_stream(key), series.model().innovation(), shape, combined_halo(series));
  return martingale_sum(series, xi);
}

MartingaleSum paired_martingale_sum(const ProjectionSeries& series, const LatticeSample& sample,
                                    const StreamKey& key) {
  if (!(key == sample.key)) {
    throw Error(ErrorKind::InvalidPairing,
                "martingale sum keyed (seed " + std::to_string(key.master_seed) + ", replicate " +
                    std::to_string(key.replicate_id) + ", lane " + std::to_string(key.lane) +
                    ") but the sample was simulated with (seed " + std::to_string(sample.key.master_seed) +
                    ", replicate " + std::to_string(sample.key.replicate_id) + ", lane " +
                    std::to_string(sample.key.lane) + "); S_n and M_n must share innovations");
  }
  if (sample.model.dim() != series.dim()) {
    throw Error(ErrorKind::InvalidPairing, "sample and projection series differ in dimension");
  }
  return martingale_sum(series, sample.shape, key);
}

MeanEstimate martingale_approx_error(const FieldModel& model, const LatticeShape& shape, const FrequencyPoint& t,
                                     std::optional<std::int64_t> ell, std::size_t replicates,
                                     const StreamKey& key, Execution exec) {
  const ProjectionSeries series = ProjectionSeries::build(model, t, ell);
  const auto halo = combined_halo(series);
  const double volume = static_cast<double>(shape.volume());
  std::vector<double> errors(replicates);
  for_each_index(replicates, exec, [&](std::size_t r) {
    const InnovationLattice xi = sample_innovations(make_stream(replicate_key(key, r)), model.innovation(), shape, halo);
    const std::vector<double> x = evaluate_field(model, xi);
    const std::complex<double> s = kernels::serial::rotated_sum(shape, x, t);
    const std::complex<double> m = martingale_sum(series, xi).value;
    errors[r] = std::norm(s - m) / volume;
  });
  return estimate_mean(errors);
}

}  // namespace rfclt
