#include "rfclt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rfclt/error.hpp"

namespace rfclt {

MeanEstimate estimate_mean(std::span<const double> samples) {
  RunningMoments m;
  for (double x : samples) m.add(x);
  return {m.mean(), m.standard_error()};
}

double normal_cdf(double x, double variance) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
}

double exponential_cdf(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  // Below 0.2 the series converges slowly and Q differs from 1 by < 1e-10.
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_statistic(std::span<const double> samples, const Cdf& cdf) {
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

KsResult ks_test(std::span<const double> samples, const Cdf& cdf) {
  if (samples.size() < kKsMinSamples) {
    throw Error(ErrorKind::InsufficientData, "KS test needs at least " + std::to_string(kKsMinSamples) +
                                                 " samples, got " + std::to_string(samples.size()));
  }
  const double d = ks_statistic(samples, cdf);
  const double rn = std::sqrt(static_cast<double>(samples.size()));
  return {d, kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d)};
}

double sample_covariance(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0.0;
  const double mx = estimate_mean(x.first(n)).mean;
  const double my = estimate_mean(y.first(n)).mean;
  CompensatedSum s;
  for (std::size_t i = 0; i < n; ++i) s.add((x[i] - mx) * (y[i] - my));
  return s.value() / static_cast<double>(n - 1);
}

double sample_correlation(std::span<const double> x, std::span<const double> y) {
  const double sxy = sample_covariance(x, y);
  const double sxx = sample_covariance(x, x);
  const double syy = sample_covariance(y, y);
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

bool decreasing_within(std::span<const MeanEstimate> ladder, double slack) {
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    const double se = std::hypot(ladder[i - 1].standard_error, ladder[i].standard_error);
    if (ladder[i].mean > ladder[i - 1].mean + slack * se) return false;
  }
  return true;
}

}  // namespace rfclt
