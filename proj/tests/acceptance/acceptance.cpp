// Acceptance run: one PASS/FAIL line per criterion.
//
// Monte Carlo criteria get two strikes: a failure on the fixed seed is
// retried once on an independent seed before it counts.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rfclt/error.hpp"
#include "rfclt/harness.hpp"
#include "rfclt/kernels.hpp"
#include "rfclt/numerics.hpp"
#include "rfclt/projection.hpp"
#include "rfclt/rng.hpp"
#include "rfclt/spectral.hpp"

namespace {

using namespace rfclt;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::uint64_t second_strike_seed(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ull; }

std::vector<FrequencyPoint> frequencies(int dim, std::initializer_list<int> which) {
  std::vector<FrequencyPoint> out;
  for (int i : which) out.push_back(default_frequencies(dim)[static_cast<std::size_t>(i)]);
  return out;
}

// Criterion 1 and 2: projection Monte Carlo against a reference density.
Outcome projection_triangle(const FieldModel& model, bool check_closed_form, std::uint64_t seed) {
  Outcome o;
  std::uint64_t k = 0;
  for (const auto& t : default_frequencies(2)) {
    const double partial = spectral_density_partial_sum(model, t, std::max<std::int64_t>(1, *covariance_range(model)));
    double reference = partial;
    if (check_closed_form) {
      reference = analytic_spectral_density(model, t);
      o.require(std::fabs(reference - partial) <= 1e-12, "t=" + t.label() + " analytic vs partial sum");
    }
    const MeanEstimate mc =
        spectral_density_projection_mc(model, t, std::nullopt, 10000, {seed, k++ << 32, lanes::kInnovations});
    o.require(std::fabs(mc.mean - reference) <= 3.0 * mc.standard_error,
              "t=" + t.label() + " projection MC " + fmt(mc.mean) + " vs " + fmt(reference) + " (SE " +
                  fmt(mc.standard_error) + ")");
  }
  return o;
}

Outcome criterion_fejer(std::uint64_t seed) {
  Outcome o;
  const FieldModel model = test_models::linear(2);
  const LatticeShape shape = LatticeShape::cube(2, 32);
  const DensityFn f = density_function(model);
  std::uint64_t k = 0;
  for (const auto& t : frequencies(2, {0, 1, 3})) {
    std::vector<double> v(2000);
    const std::uint64_t base = k++ << 32;
    for_each_index(v.size(), Execution::Parallel, [&](std::size_t r) {
      const LatticeSample s = simulate(model, shape, {seed, base + r, lanes::kInnovations});
      v[r] = fourier_sum(s, t).squared_modulus() / static_cast<double>(shape.volume());
    });
    const MeanEstimate mc = estimate_mean(v);
    const double exact = fejer_smoothed_variance(f, shape, t);
    o.require(std::fabs(mc.mean - exact) <= 3.0 * mc.standard_error,
              "t=" + t.label() + " " + fmt(mc.mean) + " vs " + fmt(exact) + " (SE " + fmt(mc.standard_error) + ")");
  }
  return o;
}

Outcome criterion_martingale(std::uint64_t seed) {
  Outcome o;
  const std::int64_t ladder[] = {8, 16, 32, 64};
  std::uint64_t k = 0;
  for (const auto& t : frequencies(2, {0, 1, 3})) {
    std::vector<MeanEstimate> linear;
    for (std::int64_t n : ladder) {
      const StreamKey key{seed, k++ << 32, lanes::kInnovations};
      linear.push_back(martingale_approx_error(test_models::linear(2), LatticeShape::cube(2, n), t, std::nullopt, 400,
                                               key, Execution::Parallel));
      const MeanEstimate iid =
          martingale_approx_error(FieldModel::iid(2), LatticeShape::cube(2, n), t, std::nullopt, 50, key);
      o.require(iid.mean == 0.0, "iid error " + fmt(iid.mean) + " at n=" + std::to_string(n));
    }
    o.require(decreasing_within(linear, 2.0), "t=" + t.label() + " linear ladder not decreasing");
    o.require(linear.back().mean < 0.25 * linear.front().mean,
              "t=" + t.label() + " error(64)/error(8) = " + fmt(linear.back().mean / linear.front().mean));
  }
  return o;
}

// The three criterion-5 plans: d = 1, 2, 3 with the linear test kernels.
std::vector<ExperimentPlan> clt_plans(std::uint64_t seed) {
  std::vector<ExperimentPlan> plans;
  const LatticeShape shapes[] = {LatticeShape::cube(1, 4096), LatticeShape::cube(2, 64), LatticeShape::cube(3, 16)};
  for (int d = 1; d <= 3; ++d) {
    ExperimentPlan p;
    p.model = test_models::linear(d);
    p.frequencies = frequencies(d, {0, 1, 3});
    p.shapes = {shapes[d - 1]};
    p.replicates = 2000;
    p.master_seed = seed + static_cast<std::uint64_t>(d);
    p.periodogram = false;
    plans.push_back(std::move(p));
  }
  return plans;
}

void require_report(Outcome& o, const CltReport& r) {
  for (const auto& e : r.entries) {
    if (e.pass()) continue;
    std::string failed;
    const std::pair<const char*, Verdict> checks[] = {
        {"var_re", e.variance_re}, {"var_im", e.variance_im}, {"corr", e.correlation_verdict},
        {"ks_re", e.ks_re_verdict}, {"ks_im", e.ks_im_verdict}, {"periodogram_mean", e.periodogram_mean_verdict},
        {"periodogram_ks", e.periodogram_ks_verdict}};
    for (const auto& [name, v] : checks) {
      if (v == Verdict::Fail) failed += std::string(failed.empty() ? "" : ",") + name;
    }
    o.require(false, e.shape.label() + " t=" + e.t.label() + " " + failed);
  }
}

Outcome criterion_clt(std::uint64_t seed) {
  Outcome o;
  for (const auto& p : clt_plans(seed)) require_report(o, run_clt_experiment(p));
  return o;
}

Outcome criterion_rectangle(std::uint64_t seed) {
  Outcome o;
  ExperimentPlan p = clt_plans(seed)[1];
  p.shapes = {LatticeShape::make(2, {128, 32, 1})};
  require_report(o, run_clt_experiment(p));
  return o;
}

Outcome criterion_periodogram(std::uint64_t seed) {
  Outcome o;
  ExperimentPlan p;
  p.model = test_models::linear(2);
  p.frequencies = frequencies(2, {0, 1, 3});
  p.shapes = {LatticeShape::cube(2, 64)};
  p.replicates = 2000;
  p.master_seed = seed;
  require_report(o, run_periodogram_experiment(p));
  return o;
}

Outcome criterion_lln(std::uint64_t seed) {
  Outcome o;
  const FrequencyPoint t = default_frequencies(2)[0];
  for (const auto& model : {FieldModel::iid(2), test_models::linear(2)}) {
    const auto points = lln_rotated_average(model, t, 16, {16, 64, 256}, 400, seed);
    std::vector<MeanEstimate> ladder;
    std::string values;
    for (const auto& p : points) {
      ladder.push_back({p.estimate, p.standard_error});
      values += (values.empty() ? "" : " ") + fmt(p.estimate);
    }
    o.require(decreasing_within(ladder, 2.0), model.kind_name() + " ladder " + values);
  }
  return o;
}

Outcome criterion_exactness(std::uint64_t seed) {
  Outcome o;
  RandomStream g = make_stream({seed, 0, lanes::kAuxiliary});
  const LatticeShape shape = LatticeShape::cube(2, 16);
  double fft_err = 0.0;
  double plancherel_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(shape.volume());
    for (double& x : v) x = g.next_normal();
    const FourierGrid grid = fourier_sum_grid(shape, v);
    double scale = 0.0;
    for (const auto& z : grid.values()) scale = std::max(scale, std::abs(z));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      fft_err = std::max(fft_err, std::abs(fourier_sum(shape, v, grid.point(i)).value - grid[i]) / scale);
    }
    CompensatedSum lhs;
    CompensatedSum rhs;
    for (const auto& z : grid.values()) lhs.add(std::norm(z));
    for (double x : v) rhs.add(x * x);
    const double expect = rhs.value() * static_cast<double>(shape.volume());
    plancherel_err = std::max(plancherel_err, std::fabs(lhs.value() - expect) / expect);
  }
  o.require(fft_err <= 1e-10, "FFT vs direct " + fmt(fft_err));
  o.require(plancherel_err <= 1e-10, "Plancherel " + fmt(plancherel_err));

  double fejer_err = 0.0;
  for (std::int64_t n : {1, 2, 8, 32}) {
    const int m = 8192;
    CompensatedSum s;
    for (int k = 0; k < m; ++k) s.add(fejer_kernel(n, -kPi + kTwoPi * (k + 0.5) / m));
    fejer_err = std::max(fejer_err, std::fabs(s.value() / m - 1.0));
  }
  o.require(fejer_err <= 1e-8, "Fejer normalization " + fmt(fejer_err));

  const FieldModel lin = test_models::linear(2);
  const double lin_sum = projection_norm_sum(lin, default_truncation(lin));
  o.require(lin_sum == analytic_covariance(lin, {0, 0, 0}), "Parseval linear " + fmt(lin_sum));
  const FieldModel vol = test_models::volterra();
  const double vol_sum = projection_norm_sum(vol, default_truncation(vol));
  o.require(std::fabs(vol_sum - analytic_covariance(vol, {0, 0, 0})) <= 1e-12, "Parseval volterra " + fmt(vol_sum));
  return o;
}

Outcome criterion_determinism(std::uint64_t seed) {
  Outcome o;
  for (ExperimentPlan p : clt_plans(seed)) {
    p.execution = Execution::Parallel;
    const std::string a = report_json(run_clt_experiment(p));
    const std::string b = report_json(run_clt_experiment(p));
    p.execution = Execution::Serial;
    const std::string c = report_json(run_clt_experiment(p));
    o.require(a == b, "d=" + std::to_string(p.model.dim()) + " two parallel runs differ");
    o.require(a == c, "d=" + std::to_string(p.model.dim()) + " serial and parallel differ");
  }
  return o;
}

Outcome criterion_negative_control(std::uint64_t seed, const std::string& cli, const std::string& source_dir) {
  Outcome o;
  for (ExperimentPlan p : clt_plans(seed)) {
    p.target_scale = 2.0;
    o.require(!run_clt_experiment(p).pass(), "d=" + std::to_string(p.model.dim()) + " passed with a doubled target");
  }
  if (!cli.empty()) {
    const std::string cmd = "\"" + cli + "\" clt --config \"" + source_dir +
                            "/configs/linear_clt.toml\" --negative-control --out /dev/null 2>/dev/null";
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.require(code == 1, "rfclt clt --negative-control exited " + std::to_string(code));
  }
  return o;
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  bool monte_carlo;
  std::uint64_t seed;
  std::function<Outcome(std::uint64_t)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria", "acceptance"};
  std::set<int> only;
  std::string cli;
  std::string source_dir = RFCLT_SOURCE_DIR;
  std::uint64_t seed_offset = 0;
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--cli", cli, "Path of the rfclt binary for the negative control");
  app.add_option("--source-dir", source_dir, "Repository root (for configs/)");
  app.add_option("--seed-offset", seed_offset, "Added to every fixed seed, for false-failure sweeps");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "spectral density triangle, linear", 30, true, 1001,
       [](std::uint64_t s) { return projection_triangle(test_models::linear(2), true, s); }},
      {2, "projection MC vs covariance series, volterra", 60, true, 1002,
       [](std::uint64_t s) { return projection_triangle(test_models::volterra(), false, s); }},
      {3, "Fejer variance identity at (32,32)", 60, true, 1003, criterion_fejer},
      {4, "martingale approximation ladder", 120, true, 1004, criterion_martingale},
      {5, "CLT, d = 1, 2, 3", 600, true, 1005, criterion_clt},
      {6, "CLT on the (128,32) rectangle", 180, true, 1006, criterion_rectangle},
      {7, "periodogram mean and exponential law", 120, true, 1007, criterion_periodogram},
      {8, "rotated-average LLN ladders", 60, true, 1008, criterion_lln},
      {9, "exactness oracles", 30, false, 1009, criterion_exactness},
      {10, "determinism of the criterion-5 reports", 600, false, 1005, criterion_determinism},
      {11, "negative control", 600, false, 1005,
       [&](std::uint64_t s) { return criterion_negative_control(s, cli, source_dir); }},
  };

  bool all = true;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    std::string strike;
    try {
      const std::uint64_t seed = c.seed + seed_offset;
      out = c.run(seed);
      if (!out.pass && c.monte_carlo) {
        const std::uint64_t retry = second_strike_seed(seed);
        const std::string first = out.detail;
        out = c.run(retry);
        strike = " [first strike: " + first + "; retried with seed " + std::to_string(retry) + "]";
      }
    } catch (const Error& e) {
      out.pass = false;
      out.detail = std::string(to_string(e.kind())) + ": " + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.require(secs <= c.budget_s, "runtime over the " + fmt(c.budget_s) + " s budget");
    all = all && out.pass;
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " (" << fmt(secs)
              << " s)" << strike << (out.detail.empty() ? "" : " :: " + out.detail) << std::endl;
  }
  return all ? 0 : 1;
}
