#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "rfclt/error.hpp"
#include "rfclt/projection.hpp"
#include "rfclt/spectral.hpp"
#include "rfclt/stats.hpp"
#include "support/generators.hpp"

using namespace rfclt;
using rfclt::testing::Gen;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

FieldModel two_tap() {
  return FieldModel::linear(CoefficientKernel::make(2, {{{0, 0, 0}, 1.0}, {{1, 0, 0}, 0.5}}));
}

Lag coordinate_max(const std::vector<Lag>& factors, int dim) {
  Lag m = factors.front();
  for (const Lag& f : factors) m = lag_max(m, f);
  for (int axis = dim; axis < kMaxDim; ++axis) m[axis] = 0;
  return m;
}

// Random monomials with distinct factors, coefficients on a coarse grid so
// merges stay exact.
TermList random_terms(Gen& g, int dim, std::int64_t r) {
  TermList terms;
  const int n = static_cast<int>(g.integer(1, 6));
  for (int i = 0; i < n; ++i) {
    std::vector<Lag> factors;
    const int deg = static_cast<int>(g.integer(1, 3));
    while (static_cast<int>(factors.size()) < deg) {
      const Lag f = g.lag(dim, r);
      if (std::find(factors.begin(), factors.end(), f) == factors.end()) factors.push_back(f);
    }
    terms.push_back({static_cast<double>(g.integer(1, 8)) * 0.25, factors});
  }
  return normalize(terms);
}

InnovationLattice origin_lattice(const FieldModel& m, std::int64_t halo, const StreamKey& key) {
  const int d = m.dim();
  std::array<std::int64_t, kMaxDim> h{0, 0, 0};
  for (int axis = 0; axis < d; ++axis) h[axis] = halo;
  return sample_innovations(make_stream(key), m.innovation(), LatticeShape::cube(d, 1), h);
}

}  // namespace

TEST(Normalize, MergesSortsAndDropsZeros) {
  const TermList in{{1.0, {{1, 0, 0}, {0, 0, 0}}}, {2.0, {{0, 0, 0}, {1, 0, 0}}}, {0.5, {{3, 0, 0}}},
                    {-0.5, {{3, 0, 0}}}};
  const TermList out = normalize(in);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].coefficient, 3.0);
  EXPECT_EQ(out[0].factors, (std::vector<Lag>{{0, 0, 0}, {1, 0, 0}}));
  EXPECT_EQ(kind_of([] { normalize({{1.0, {{1, 1, 0}, {1, 1, 0}}}}); }), ErrorKind::InvalidKernel);
}

TEST(ProjectP0, LinearExample) {
  const TermList p = project_p0(two_tap(), {1, 0, 0});
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].coefficient, 0.5);
  EXPECT_EQ(p[0].factors, (std::vector<Lag>{{0, 0, 0}}));
  EXPECT_TRUE(project_p0(two_tap(), {2, 0, 0}).empty());
  EXPECT_TRUE(project_p0(two_tap(), {0, 1, 0}).empty());
}

TEST(ProjectP0, IidExample) {
  const auto m = FieldModel::iid(2);
  const TermList p = project_p0(m, {0, 0, 0});
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0], (Term{1.0, {{0, 0, 0}}}));
  EXPECT_TRUE(project_p0(m, {1, 0, 0}).empty());
  EXPECT_TRUE(project_p0(m, {-1, 2, 0}).empty());
}

TEST(ProjectP0, VolterraSinglePair) {
  const auto m = test_models::volterra_single_pair();
  // X_(1,0) = xi_(1,0) xi_(0,0): the factor (1,0) is not <= (0,0), so every
  // corner of the alternating sum kills it.
  EXPECT_TRUE(project_p0(m, {1, 0, 0}).empty());
  const TermList terms = field_terms(m, {1, 0, 0});
  for (const Lag& c : {Lag{0, 0, 0}, Lag{-1, 0, 0}, Lag{0, -1, 0}, Lag{-1, -1, 0}}) {
    EXPECT_TRUE(conditional_expectation(terms, c, 2).empty());
  }
  // X_0 = xi_0 xi_(-1,0) survives whole.
  const TermList p0 = project_p0(m, {0, 0, 0});
  ASSERT_EQ(p0.size(), 1u);
  EXPECT_EQ(p0[0], (Term{1.0, {{-1, 0, 0}, {0, 0, 0}}}));
}

TEST(ProjectP0, GaussianColumnsUnsupported) {
  EXPECT_EQ(kind_of([] { project_p0(FieldModel::gaussian_columns(2, 0.3), {0, 0, 0}); }),
            ErrorKind::UnsupportedModel);
  EXPECT_EQ(kind_of([] { ProjectionSeries::build(FieldModel::gaussian_columns(2, 0.3), FrequencyPoint::make({1.0, 2.0})); }),
            ErrorKind::UnsupportedModel);
}

// The alternating sum keeps a monomial exactly when the coordinate-wise
// maximum of its factors is u.
TEST(Project, AlternatingSumEqualsTheMaximumRule) {
  Gen g(42);
  for (int trial = 0; trial < 500; ++trial) {
    const int d = g.dim();
    const TermList terms = random_terms(g, d, 2);
    const Lag u = g.lag(d, 1);
    TermList expect;
    for (const Term& t : terms) {
      if (coordinate_max(t.factors, d) == u) expect.push_back(t);
    }
    ASSERT_EQ(project(terms, u, d), normalize(expect)) << "trial " << trial;
  }
}

TEST(Project, ProjectionsOverAllSitesResolveTheField) {
  // sum_u P_u X = X for a finite polynomial (telescoping over the corners).
  Gen g(43);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = g.dim();
    const TermList terms = random_terms(g, d, 2);
    TermList total;
    const std::int64_t r = 2;
    for (std::int64_t a = -r; a <= r; ++a) {
      for (std::int64_t b = (d > 1 ? -r : 0); b <= (d > 1 ? r : 0); ++b) {
        for (std::int64_t c = (d > 2 ? -r : 0); c <= (d > 2 ? r : 0); ++c) {
          for (const Term& t : project(terms, {a, b, c}, d)) total.push_back(t);
        }
      }
    }
    ASSERT_EQ(normalize(total), terms);
  }
}

TEST(Series, LinearD0IsTheTransferFunctionTimesXi0) {
  const auto m = test_models::linear(2);
  const auto t = default_frequencies(2)[3];
  const auto s = ProjectionSeries::build(m, t);
  ASSERT_EQ(s.terms().size(), 1u);
  EXPECT_EQ(s.terms()[0].factors, (std::vector<Lag>{{0, 0, 0}}));
  const auto a = transfer_function(m.as<LinearModel>()->kernel, t);
  EXPECT_NEAR(std::abs(s.terms()[0].coefficient - a), 0.0, 1e-15);
  EXPECT_EQ(s.truncation(), 1);
  // Truncating at 0 keeps only a_0.
  const auto s0 = ProjectionSeries::build(m, t, 0);
  ASSERT_EQ(s0.terms().size(), 1u);
  EXPECT_EQ(s0.terms()[0].coefficient, std::complex<double>(1.0, 0.0));
}

TEST(Series, D0IsRealAtZeroFrequency) {
  for (const auto& m : {test_models::linear(2), test_models::volterra(), FieldModel::iid(2)}) {
    const auto s = ProjectionSeries::build(m, FrequencyPoint::make({0.0, 0.0}));
    const auto xi = origin_lattice(m, s.halo()[0] + 1, {3, 0, 0});
    EXPECT_EQ(d0_truncated(s, xi).imag(), 0.0) << m.kind_name();
  }
}

TEST(Series, EvaluateNeedsTheHalo) {
  const auto m = test_models::volterra();
  const auto s = ProjectionSeries::build(m, default_frequencies(2)[0]);
  EXPECT_EQ(s.halo()[0], 1);
  const auto xi = origin_lattice(m, 0, {3, 0, 0});
  EXPECT_EQ(kind_of([&] { d0_truncated(s, xi); }), ErrorKind::MissingInnovation);
}

TEST(Series, BuildChecksArguments) {
  EXPECT_EQ(kind_of([] { ProjectionSeries::build(test_models::linear(2), FrequencyPoint::make({1.0})); }),
            ErrorKind::InvalidPlan);
  EXPECT_EQ(kind_of([] { ProjectionSeries::build(test_models::linear(2), FrequencyPoint::make({1.0, 1.0}), -1); }),
            ErrorKind::InvalidPlan);
}

TEST(Parseval, ProjectionNormsSumToGammaZero) {
  Gen g(44);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = g.dim();
    const auto lin = FieldModel::linear(g.linear_kernel(d, 2, 6), InnovationSpec::centered_uniform(1.5));
    EXPECT_DOUBLE_EQ(projection_norm_sum(lin, default_truncation(lin)), analytic_covariance(lin, {0, 0, 0}));
    const auto vol = FieldModel::volterra(g.volterra_kernel(d, 2, 5), InnovationSpec::rademacher());
    EXPECT_NEAR(projection_norm_sum(vol, default_truncation(vol)), analytic_covariance(vol, {0, 0, 0}), 1e-12);
  }
  EXPECT_NEAR(projection_norm_sum(test_models::volterra(), 1), 1.25, 1e-15);
}

TEST(Parseval, SecondMomentIsTheSpectralDensity) {
  // E|D_0(t)|^2 = (2 pi)^d f(t); for d = 2 this is 2 pi^2 f = E|D_0|^2 / 2.
  Gen g(45);
  for (int d = 1; d <= 3; ++d) {
    const auto m = test_models::linear(d);
    for (int i = 0; i < 10; ++i) {
      const auto t = g.frequency(d);
      const double lhs = ProjectionSeries::build(m, t).second_moment();
      EXPECT_NEAR(lhs, std::pow(kTwoPi, d) * analytic_spectral_density(m, t), 1e-14 * lhs);
      if (d == 2) EXPECT_NEAR(2.0 * kPi * kPi * analytic_spectral_density(m, t), lhs / 2.0, 1e-14 * lhs);
    }
  }
  const auto v = test_models::volterra();
  for (const auto& t : default_frequencies(2)) {
    EXPECT_NEAR(ProjectionSeries::build(v, t).second_moment() / (kTwoPi * kTwoPi),
                spectral_density_partial_sum(v, t, 1), 1e-14);
  }
}

TEST(ProjectionMc, IidIsWhiteNoise) {
  const auto e = spectral_density_projection_mc(FieldModel::iid(2), FrequencyPoint::make({1.0, 1.0}), std::nullopt,
                                                10000, {61, 0, 0}, Execution::Parallel);
  EXPECT_LT(std::fabs(e.mean - 1.0 / (kTwoPi * kTwoPi)), 3.0 * e.standard_error);
}

TEST(ProjectionMc, LinearMatchesClosedForm) {
  const auto m = test_models::linear(2);
  std::uint64_t seed = 70;
  for (const auto& t : default_frequencies(2)) {
    const auto e = spectral_density_projection_mc(m, t, std::nullopt, 10000, {seed++, 0, 0}, Execution::Parallel);
    EXPECT_LT(std::fabs(e.mean - analytic_spectral_density(m, t)), 3.0 * e.standard_error) << t.label();
  }
}

TEST(ProjectionMc, VolterraSinglePairMatchesPartialSum) {
  const auto m = test_models::volterra_single_pair();
  std::uint64_t seed = 80;
  for (const auto& t : default_frequencies(2)) {
    const auto e = spectral_density_projection_mc(m, t, std::nullopt, 10000, {seed++, 0, 0}, Execution::Parallel);
    EXPECT_LT(std::fabs(e.mean - spectral_density_partial_sum(m, t, 1)), 3.0 * e.standard_error) << t.label();
  }
}

TEST(ProjectionMc, SerialAndParallelAgree) {
  const auto m = test_models::volterra();
  const auto t = default_frequencies(2)[1];
  const auto a = spectral_density_projection_mc(m, t, std::nullopt, 500, {5, 0, 0}, Execution::Serial);
  const auto b = spectral_density_projection_mc(m, t, std::nullopt, 500, {5, 0, 0}, Execution::Parallel);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.standard_error, b.standard_error);
}

// E[D_0(t) h] = 0 for h measurable with respect to innovations strictly below
// 0 in one coordinate. The control h uses xi_0 and must be detected.
TEST(MartingaleDifference, OrthogonalToEachCoordinatePast) {
  const auto m = test_models::volterra();
  const auto t = default_frequencies(2)[0];
  const auto s = ProjectionSeries::build(m, t);
  const std::size_t n = 20000;
  std::vector<double> re1(n), im1(n), re2(n), im2(n), control(n);
  for_each_index(n, Execution::Parallel, [&](std::size_t r) {
    const auto xi = origin_lattice(m, 3, {90, r, 0});
    const auto d0 = d0_truncated(s, xi);
    // Past in the first coordinate: first index <= -1, any second index.
    const double h1 = std::tanh(xi.at({-1, 0, 1}) + xi.at({-1, 1, 1}) * xi.at({-2, -1, 1}) + xi.at({-1, -1, 1}));
    // Past in the second coordinate.
    const double h2 = std::tanh(xi.at({0, -1, 1}) + xi.at({1, -1, 1}) * xi.at({-1, -1, 1}) + xi.at({-1, -2, 1}));
    re1[r] = d0.real() * h1;
    im1[r] = d0.imag() * h1;
    re2[r] = d0.real() * h2;
    im2[r] = d0.imag() * h2;
    control[r] = d0.real() * std::tanh(xi.at({0, 0, 1}) * xi.at({-1, 0, 1}));
  });
  for (const auto* v : {&re1, &im1, &re2, &im2}) {
    const auto e = estimate_mean(*v);
    EXPECT_LT(std::fabs(e.mean), 4.0 * e.standard_error);
  }
  const auto c = estimate_mean(control);
  EXPECT_GT(std::fabs(c.mean), 10.0 * c.standard_error);
}

TEST(MartingaleDifference, SymbolicMonomialsTouchTheOrigin) {
  Gen g(46);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = g.dim();
    const auto m = FieldModel::volterra(g.volterra_kernel(d, 2, 5));
    const auto s = ProjectionSeries::build(m, g.frequency(d));
    for (const auto& term : s.terms()) ASSERT_EQ(coordinate_max(term.factors, d), (Lag{0, 0, 0}));
  }
}

// cov(D_u, D_v) = 0 for u != v.
TEST(MartingaleDifference, TranslatesAreOrthogonal) {
  const auto m = test_models::volterra();
  const auto t = default_frequencies(2)[2];
  const auto s = ProjectionSeries::build(m, t);
  const std::size_t n = 20000;
  const Lag shifts[] = {{1, 0, 0}, {0, 1, 0}, {1, -1, 0}};
  for (const Lag& h : shifts) {
    std::vector<double> re(n), im(n);
    for_each_index(n, Execution::Parallel, [&](std::size_t r) {
      const auto xi = origin_lattice(m, 3, {91, r, 0});
      const Lag o = origin_site(2);
      const auto prod = s.evaluate_at(xi, o) * std::conj(s.evaluate_at(xi, o + h));
      re[r] = prod.real();
      im[r] = prod.imag();
    });
    for (const auto* v : {&re, &im}) {
      const auto e = estimate_mean(*v);
      EXPECT_LT(std::fabs(e.mean), 4.0 * e.standard_error) << format_lag(h, 2);
    }
  }
}

TEST(MartingaleSum, IidEqualsTheFourierSum) {
  const auto m = FieldModel::iid(2);
  const auto t = default_frequencies(2)[4];
  const auto shape = LatticeShape::make(2, {9, 6, 1});
  const StreamKey key{12, 3, 0};
  const auto sample = simulate(m, shape, key);
  const auto mart = paired_martingale_sum(ProjectionSeries::build(m, t), sample, key);
  EXPECT_EQ(mart.value, kernels::serial::rotated_sum(shape, sample.values, t));
}

TEST(MartingaleSum, LinearTwoByTwoByHand) {
  const auto m = test_models::linear(2);
  const auto t = default_frequencies(2)[0];
  const auto shape = LatticeShape::cube(2, 2);
  const StreamKey key{13, 0, 0};
  const auto series = ProjectionSeries::build(m, t);
  const auto mart = martingale_sum(series, shape, key);
  const auto xi = sample_innovations(make_stream(key), m.innovation(), shape, {1, 1, 0});
  // D_j(-t) = conj(A(t)) xi_j for a linear field.
  const auto a = std::conj(transfer_function(m.as<LinearModel>()->kernel, t));
  std::complex<double> expect{0.0, 0.0};
  for (std::int64_t u = 1; u <= 2; ++u) {
    for (std::int64_t v = 1; v <= 2; ++v) {
      expect += std::polar(1.0, u * t[0] + v * t[1]) * a * xi.at({u, v, 1});
    }
  }
  EXPECT_LT(std::abs(mart.value - expect), 1e-14);
  EXPECT_EQ(mart.truncation, 1);
  EXPECT_EQ(mart.shape, shape);
}

TEST(MartingaleSum, IsCentered) {
  const auto m = test_models::volterra();
  const auto series = ProjectionSeries::build(m, default_frequencies(2)[1]);
  const std::size_t n = 4000;
  std::vector<double> re(n), im(n);
  for_each_index(n, Execution::Parallel, [&](std::size_t r) {
    const auto v = martingale_sum(series, LatticeShape::cube(2, 8), {14, r, 0}).value;
    re[r] = v.real();
    im[r] = v.imag();
  });
  for (const auto* v : {&re, &im}) {
    const auto e = estimate_mean(*v);
    EXPECT_LT(std::fabs(e.mean), 4.0 * e.standard_error);
  }
}

TEST(MartingaleSum, PairingIsEnforced) {
  const auto m = test_models::linear(2);
  const auto series = ProjectionSeries::build(m, default_frequencies(2)[0]);
  const auto sample = simulate(m, LatticeShape::cube(2, 4), {15, 2, 0});
  try {
    paired_martingale_sum(series, sample, {15, 2, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidPairing);
    EXPECT_NE(std::string(e.what()).find("lane 1"), std::string::npos) << e.what();
  }
  EXPECT_EQ(kind_of([&] { paired_martingale_sum(series, sample, {16, 2, 0}); }), ErrorKind::InvalidPairing);
  EXPECT_EQ(kind_of([&] { paired_martingale_sum(series, sample, {15, 3, 0}); }), ErrorKind::InvalidPairing);
  EXPECT_NO_THROW(paired_martingale_sum(series, sample, {15, 2, 0}));
}

TEST(MartingaleError, IidIsExactlyZero) {
  for (std::int64_t n : {8, 16, 32}) {
    const auto e = martingale_approx_error(FieldModel::iid(2), LatticeShape::cube(2, n), default_frequencies(2)[0],
                                           std::nullopt, 50, {17, 0, 0}, Execution::Parallel);
    EXPECT_EQ(e.mean, 0.0);
    EXPECT_EQ(e.standard_error, 0.0);
  }
}

// X = xi_k xi_{k-(1,0)} has P_0 X_j = 0 for j != 0, so D_j = X_j and the
// approximation is exact as well.
TEST(MartingaleError, SinglePairVolterraIsAlreadyAMartingaleDifferenceField) {
  for (std::int64_t n : {8, 16}) {
    const auto e = martingale_approx_error(test_models::volterra_single_pair(), LatticeShape::cube(2, n),
                                           default_frequencies(2)[0], std::nullopt, 50, {18, 0, 0});
    EXPECT_EQ(e.mean, 0.0);
  }
}

TEST(MartingaleError, DecreasesAlongTheLadder) {
  for (const auto& m : {test_models::linear(2), test_models::volterra()}) {
    std::vector<MeanEstimate> ladder;
    for (std::int64_t n : {8, 16, 32}) {
      ladder.push_back(martingale_approx_error(m, LatticeShape::cube(2, n), default_frequencies(2)[1], std::nullopt,
                                               300, {19, static_cast<std::uint64_t>(n) << 32, 0},
                                               Execution::Parallel));
    }
    EXPECT_TRUE(decreasing_within(ladder, 2.0)) << m.kind_name();
    EXPECT_LT(ladder.back().mean, 0.5 * ladder.front().mean) << m.kind_name();
    EXPECT_GT(ladder.back().mean, 0.0);
  }
}

TEST(MartingaleError, SerialAndParallelAgree) {
  const auto m = test_models::linear(2);
  const auto a = martingale_approx_error(m, LatticeShape::cube(2, 8), default_frequencies(2)[0], std::nullopt, 64,
                                         {20, 0, 0}, Execution::Serial);
  const auto b = martingale_approx_error(m, LatticeShape::cube(2, 8), default_frequencies(2)[0], std::nullopt, 64,
                                         {20, 0, 0}, Execution::Parallel);
  EXPECT_EQ(a.mean, b.mean);
}

// With unconjugated coefficients sum_j e^{ij.t} D_j(t) the normalized gap
// does not vanish for a kernel that is not symmetric.
TEST(MartingaleError, UnconjugatedCoefficientsLeaveAGap) {
  const auto m = test_models::linear(2);
  const auto t = default_frequencies(2)[4];
  const auto series = ProjectionSeries::build(m, t);
  auto literal_error = [&](std::int64_t n) {
    const auto shape = LatticeShape::cube(2, n);
    std::vector<double> v(200);
    for_each_index(v.size(), Execution::Parallel, [&](std::size_t r) {
      const auto xi = sample_innovations(make_stream({21, r, 0}), m.innovation(), shape, {1, 1, 0});
      const auto x = evaluate_field(m, xi);
      const auto s = kernels::serial::rotated_sum(shape, x, t);
      std::complex<double> mart{0.0, 0.0};
      for (std::size_t o = 0; o < shape.volume(); ++o) {
        const Lag j = shape.site(o);
        mart += std::polar(1.0, t.dot(j)) * series.evaluate_at(xi, j, false);
      }
      v[r] = std::norm(s - mart) / static_cast<double>(shape.volume());
    });
    return estimate_mean(v);
  };
  const auto small = literal_error(8);
  const auto large = literal_error(32);
  // The limit is |A(t) - conj(A(t))|^2 = 4 (Im A)^2 per unit variance.
  const double gap = 4.0 * std::pow(transfer_function(m.as<LinearModel>()->kernel, t).imag(), 2);
  EXPECT_GT(gap, 0.5);
  EXPECT_LT(std::fabs(large.mean - gap), 4.0 * large.standard_error + 0.05 * gap);
  EXPECT_GT(large.mean, 0.5 * small.mean);
}
