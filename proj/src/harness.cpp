#include "rfclt/harness.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "rfclt/error.hpp"
#include "rfclt/kernels.hpp"
#include "rfclt/projection.hpp"
#include "rfclt/spectral.hpp"

namespace rfclt {

namespace {

std::string non_generic_message(const FrequencyPoint& t) {
  return "frequency " + t.label() +
         " is not generic: a coordinate lies within 1e-9 of p*pi/q with q <= 16, inside the null set "
         "the limit theorems exclude; pick an irrational-looking point";
}

Verdict verdict(bool ok) { return ok ? Verdict::Pass : Verdict::Fail; }

double clt_constant(int d) {
  // 2^{d-1} pi^d
  return std::pow(2.0, d - 1) * std::pow(kPi, d);
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Skipped: return "skipped";
  }
  return "unknown";
}

bool CltEntry::pass() const {
  for (Verdict v : {variance_re, variance_im, correlation_verdict, ks_re_verdict, ks_im_verdict,
                    periodogram_mean_verdict, periodogram_ks_verdict}) {
    if (v == Verdict::Fail) return false;
  }
  return true;
}

bool CltReport::pass() const {
  for (const auto& e : entries) {
    if (!e.pass()) return false;
  }
  return true;
}

void validate_plan(const ExperimentPlan& plan) {
  const int d = plan.model.dim();
  if ((plan.clt || plan.periodogram) && plan.replicates < kMinDistributionalReplicates) {
    throw Error(ErrorKind::InvalidPlan, "distributional tests need at least " +
                                            std::to_string(kMinDistributionalReplicates) + " replicates, got " +
                                            std::to_string(plan.replicates));
  }
  if (!(plan.target_scale > 0.0) || !std::isfinite(plan.target_scale)) {
    throw Error(ErrorKind::InvalidPlan, "target scale must be positive");
  }
  for (const auto& shape : plan.shapes) {
    if (shape.dim() != d) {
      throw Error(ErrorKind::InvalidPlan, "shape " + shape.label() + " does not have the model dimension " +
                                              std::to_string(d));
    }
  }
  for (const auto& t : plan.frequencies) {
    if (t.dim() != d) {
      throw Error(ErrorKind::InvalidPlan, "frequency " + t.label() + " does not have the model dimension " +
                                              std::to_string(d));
    }
    if (!t.generic()) throw Error(ErrorKind::NonGenericFrequency, non_generic_message(t));
  }
}

std::uint64_t replicate_id(std::size_t shape_index, std::size_t r) {
  return (static_cast<std::uint64_t>(shape_index) << 32) + static_cast<std::uint64_t>(r);
}

DensityTarget target_density(const FieldModel& model, const FrequencyPoint& t) {
  if (model.as<VolterraModel>()) {
    const std::int64_t range = std::max<std::int64_t>(1, *covariance_range(model));
    return {spectral_density_partial_sum(model, t, range), "covariance_series"};
  }
  return {analytic_spectral_density(model, t), "closed_form"};
}

namespace {

void fill_clt(CltEntry& e, const std::vector<double>& re, const std::vector<double>& im, const ExperimentPlan& plan) {
  const std::size_t r = re.size();
  e.mean = {estimate_mean(re).mean, estimate_mean(im).mean};
  e.covariance = {{{sample_covariance(re, re), sample_covariance(re, im)},
                   {sample_covariance(im, re), sample_covariance(im, im)}}};
  e.correlation = sample_correlation(re, im);

  const double target = e.target_variance;
  const auto& tol = plan.tolerances;
  if (target > 0.0) {
    e.variance_re = verdict(std::fabs(e.covariance[0][0] - target) <= tol.variance_band * target);
    e.variance_im = verdict(std::fabs(e.covariance[1][1] - target) <= tol.variance_band * target);
    e.correlation_verdict =
        verdict(std::fabs(e.correlation) < tol.correlation_scale / std::sqrt(static_cast<double>(r)));
    const Cdf reference = [target](double x) { return normal_cdf(x, target); };
    e.ks_re = ks_test(re, reference);
    e.ks_im = ks_test(im, reference);
    e.ks_re_verdict = verdict(e.ks_re.p_value > tol.ks_alpha);
    e.ks_im_verdict = verdict(e.ks_im.p_value > tol.ks_alpha);
  } else {
    // f(t) = 0: the normalized sums must vanish identically.
    e.variance_re = verdict(e.covariance[0][0] == 0.0);
    e.variance_im = verdict(e.covariance[1][1] == 0.0);
    e.correlation_verdict = verdict(e.correlation == 0.0);
    e.notes.push_back("degenerate target f(t) = 0: KS tests skipped");
  }
}

void fill_periodogram(CltEntry& e, const std::vector<double>& re, const std::vector<double>& im,
                      const ExperimentPlan& plan) {
  const double scale = std::pow(kTwoPi, -e.shape.dim());
  std::vector<double> in(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) in[i] = (re[i] * re[i] + im[i] * im[i]) * scale;
  const MeanEstimate m = estimate_mean(in);
  e.mean_periodogram = m.mean;
  e.periodogram_se = m.standard_error;
  const double f = e.spectral_density;
  e.periodogram_mean_verdict = verdict(std::fabs(m.mean - f) <= plan.tolerances.periodogram_se * m.standard_error);
  if (f > 0.0) {
    for (double& x : in) x /= f;
    e.ks_periodogram = ks_test(in, exponential_cdf);
    e.periodogram_ks_verdict = verdict(e.ks_periodogram.p_value > plan.tolerances.ks_alpha);
  } else {
    e.notes.push_back("degenerate target f(t) = 0: periodogram KS test skipped");
  }
}

}  // namespace

CltReport run_clt_experiment(const ExperimentPlan& plan) {
  validate_plan(plan);
  CltReport report;
  report.model_kind = plan.model.kind_name();
  report.dim = plan.model.dim();
  report.master_seed = plan.master_seed;
  report.replicates = plan.replicates;
  report.target_scale = plan.target_scale;
  report.tolerances = plan.tolerances;

  const std::size_t nf = plan.frequencies.size();
  const std::size_t nr = plan.replicates;
  std::vector<DensityTarget> targets;
  for (const auto& t : plan.frequencies) targets.push_back(target_density(plan.model, t));

  for (std::size_t si = 0; si < plan.shapes.size(); ++si) {
    const LatticeShape& shape = plan.shapes[si];
    const double root_volume = std::sqrt(static_cast<double>(shape.volume()));
    // sums[f * nr + r]
    std::vector<std::complex<double>> sums(nf * nr);
    for_each_index(nr, plan.execution, [&](std::size_t r) {
      const StreamKey key{plan.master_seed, replicate_id(si, r), lanes::kInnovations};
      const LatticeSample sample = simulate(plan.model, shape, key);
      for (std::size_t fi = 0; fi < nf; ++fi) {
        sums[fi * nr + r] = kernels::serial::rotated_sum(shape, sample.values, plan.frequencies[fi]) / root_volume;
      }
    });
    for (std::size_t fi = 0; fi < nf; ++fi) {
      CltEntry e;
      e.t = plan.frequencies[fi];
      e.shape = shape;
      e.replicates = nr;
      e.spectral_density = targets[fi].value;
      e.density_source = targets[fi].source;
      e.target_variance = plan.target_scale * clt_constant(shape.dim()) * targets[fi].value;
      std::vector<double> re(nr), im(nr);
      for (std::size_t r = 0; r < nr; ++r) {
        re[r] = sums[fi * nr + r].real();
        im[r] = sums[fi * nr + r].imag();
      }
      if (plan.clt) fill_clt(e, re, im, plan);
      if (plan.periodogram) fill_periodogram(e, re, im, plan);
      report.entries.push_back(std::move(e));
    }
  }
  return report;
}

CltReport run_periodogram_experiment(const ExperimentPlan& plan) {
  ExperimentPlan p = plan;
  p.clt = false;
  p.periodogram = true;
  return run_clt_experiment(p);
}

std::vector<LlnPoint> lln_rotated_average(const FieldModel& model, const FrequencyPoint& t, std::int64_t n2,
                                          const std::vector<std::int64_t>& n1_ladder, std::size_t replicates,
                                          std::uint64_t master_seed, bool rotate, Execution exec) {
  if (!model.as<IidModel>() && !model.as<LinearModel>()) {
    throw Error(ErrorKind::UnsupportedModel, "the rotated-average experiment supports iid and linear models");
  }
  if (model.dim() != 2 || t.dim() != 2) {
    throw Error(ErrorKind::InvalidPlan, "the rotated-average experiment is two-dimensional");
  }
  if ((rotate && !is_generic_coordinate(t[0])) || !is_generic_coordinate(t[1])) {
    throw Error(ErrorKind::NonGenericFrequency, non_generic_message(t));
  }
  if (n2 < 1) throw Error(ErrorKind::InvalidShape, "n2 must be positive");
  if (replicates < 2) throw Error(ErrorKind::InvalidPlan, "need at least 2 replicates for a standard error");

  const ProjectionSeries series = ProjectionSeries::build(model, t);
  std::vector<LlnPoint> out;
  for (std::size_t li = 0; li < n1_ladder.size(); ++li) {
    const std::int64_t n1 = n1_ladder[li];
    const LatticeShape shape = LatticeShape::make(2, {n1, n2, 1});
    std::vector<double> moduli(replicates);
    for_each_index(replicates, exec, [&](std::size_t r) {
      const StreamKey key{master_seed, replicate_id(li, r), lanes::kInnovations};
      const InnovationLattice xi = sample_innovations(make_stream(key), model.innovation(), shape, series.halo());
      CompensatedComplexSum outer;
      for (std::int64_t j = 1; j <= n1; ++j) {
        CompensatedComplexSum column;
        for (std::int64_t k = 1; k <= n2; ++k) {
          column.add(std::polar(1.0, static_cast<double>(k) * t[1]) * series.evaluate_at(xi, {j, k, 1}, true));
        }
        const std::complex<double> y = column.value() / std::sqrt(static_cast<double>(n2));
        outer.add(rotate ? std::polar(1.0, static_cast<double>(j) * t[0]) * y : y);
      }
      moduli[r] = std::abs(outer.value()) / static_cast<double>(n1);
    });
    const MeanEstimate m = estimate_mean(moduli);
    out.push_back({n1, n2, m.mean, m.standard_error});
  }
  return out;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json ks_json(const KsResult& ks, Verdict v) {
  ordered_json j;
  if (v == Verdict::Skipped) {
    j["statistic"] = nullptr;
    j["p_value"] = nullptr;
  } else {
    j["statistic"] = ks.statistic;
    j["p_value"] = ks.p_value;
  }
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json entry_json(const CltEntry& e) {
  ordered_json j;
  const int d = e.shape.dim();
  j["frequency"] = std::vector<double>(e.t.coords().begin(), e.t.coords().begin() + d);
  j["shape"] = std::vector<std::int64_t>(e.shape.extents().begin(), e.shape.extents().begin() + d);
  j["replicates"] = e.replicates;
  j["spectral_density"] = e.spectral_density;
  j["density_source"] = e.density_source;
  j["target_variance"] = e.target_variance;
  j["target_variance_sum"] = 2.0 * e.target_variance;
  j["mean"] = e.mean;
  j["covariance"] = {e.covariance[0], e.covariance[1]};
  j["correlation"] = e.correlation;
  j["ks_re"] = ks_json(e.ks_re, e.ks_re_verdict);
  j["ks_im"] = ks_json(e.ks_im, e.ks_im_verdict);
  ordered_json p;
  if (e.periodogram_mean_verdict == Verdict::Skipped) {
    p["mean"] = nullptr;
    p["standard_error"] = nullptr;
  } else {
    p["mean"] = e.mean_periodogram;
    p["standard_error"] = e.periodogram_se;
  }
  p["ks_exponential"] = ks_json(e.ks_periodogram, e.periodogram_ks_verdict);
  j["periodogram"] = p;
  ordered_json v;
  v["variance_re"] = to_string(e.variance_re);
  v["variance_im"] = to_string(e.variance_im);
  v["correlation"] = to_string(e.correlation_verdict);
  v["ks_re"] = to_string(e.ks_re_verdict);
  v["ks_im"] = to_string(e.ks_im_verdict);
  v["periodogram_mean"] = to_string(e.periodogram_mean_verdict);
  v["periodogram_ks"] = to_string(e.periodogram_ks_verdict);
  j["verdicts"] = v;
  j["notes"] = e.notes;
  j["pass"] = e.pass();
  return j;
}

}  // namespace

std::string report_json(const CltReport& report, const ReportOptions& options) {
  ordered_json j;
  j["schema_version"] = 1;
  if (options.timestamp) j["timestamp"] = utc_timestamp();
  j["model"] = {{"kind", report.model_kind}, {"dim", report.dim}};
  j["master_seed"] = report.master_seed;
  j["replicates"] = report.replicates;
  j["target_scale"] = report.target_scale;
  j["tolerances"] = {{"variance_band", report.tolerances.variance_band},
                     {"correlation_scale", report.tolerances.correlation_scale},
                     {"ks_alpha", report.tolerances.ks_alpha},
                     {"periodogram_se", report.tolerances.periodogram_se}};
  ordered_json results = ordered_json::array();
  for (const auto& e : report.entries) results.push_back(entry_json(e));
  j["results"] = std::move(results);
  j["pass"] = report.pass();
  return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

void write_report(const CltReport& report, const std::filesystem::path& path, const ReportOptions& options) {
  write_text_file(path, report_json(report, options));
}

std::string report_csv(const CltReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "frequency,shape,spectral_density,target_variance,mean_re,mean_im,var_re,var_im,cov_re_im,"
         "correlation,ks_re_stat,ks_re_p,ks_im_stat,ks_im_p,periodogram_mean,periodogram_se,"
         "periodogram_ks_stat,periodogram_ks_p,pass\n";
  for (const auto& e : report.entries) {
    out << '"' << e.t.label() << "\"," << e.shape.label() << ',' << e.spectral_density << ',' << e.target_variance
        << ',' << e.mean[0] << ',' << e.mean[1] << ',' << e.covariance[0][0] << ',' << e.covariance[1][1] << ','
        << e.covariance[0][1] << ',' << e.correlation << ',' << e.ks_re.statistic << ',' << e.ks_re.p_value << ','
        << e.ks_im.statistic << ',' << e.ks_im.p_value << ',' << e.mean_periodogram << ',' << e.periodogram_se
        << ',' << e.ks_periodogram.statistic << ',' << e.ks_periodogram.p_value << ','
        << (e.pass() ? "true" : "false") << '\n';
  }
  return out.str();
}

void write_report_csv(const CltReport& report, const std::filesystem::path& path) {
  write_text_file(path, report_csv(report));
}

}  // namespace rfclt
