#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "rfclt/numerics.hpp"

namespace rfclt {

using Cdf = std::function<double(double)>;

double normal_cdf(double x, double variance = 1.0);
/// Unit-mean exponential law.
double exponential_cdf(double x);

/// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2), the limiting
/// survival function of sqrt(n) D_n.
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// sup_x |F_n(x) - F(x)| for the empirical CDF of `samples`. No minimum
/// sample size; use ks_test for a p-value.
double ks_statistic(std::span<const double> samples, const Cdf& cdf);

/// One-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// Q((sqrt(n) + 0.12 + 0.11 / sqrt(n)) D). Throws Error(InsufficientData)
/// for fewer than 20 samples.
KsResult ks_test(std::span<const double> samples, const Cdf& cdf);

inline constexpr std::size_t kKsMinSamples = 20;

/// Pearson correlation; 0 when either series is constant.
double sample_correlation(std::span<const double> x, std::span<const double> y);

/// Unbiased sample covariance.
double sample_covariance(std::span<const double> x, std::span<const double> y);

/// True when every step of the sequence satisfies
/// next <= previous + slack * sqrt(se_prev^2 + se_next^2).
bool decreasing_within(std::span<const MeanEstimate> ladder, double slack);

}  // namespace rfclt
