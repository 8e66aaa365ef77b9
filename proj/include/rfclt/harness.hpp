#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rfclt/execution.hpp"
#include "rfclt/frequency.hpp"
#include "rfclt/lattice.hpp"
#include "rfclt/models.hpp"
#include "rfclt/stats.hpp"

namespace rfclt {

/// Acceptance bands, stated once.
struct Tolerances {
  double variance_band = 0.10;          // relative, per marginal
  double correlation_scale = 4.0;       // |rho| < scale / sqrt(R)
  double ks_alpha = 0.01;
  double periodogram_se = 3.0;          // |mean I - f| <= k SE
};

inline constexpr std::size_t kMinDistributionalReplicates = 200;

struct ExperimentPlan {
  FieldModel model = FieldModel::iid(2);
  std::vector<FrequencyPoint> frequencies;
  std::vector<LatticeShape> shapes;
  std::size_t replicates = 2000;
  std::uint64_t master_seed = 0;
  bool clt = true;
  bool periodogram = true;
  /// Test hook: the CLT target variance is multiplied by this. The negative
  /// control sets it to 2 and must fail.
  double target_scale = 1.0;
  Tolerances tolerances;
  Execution execution = Execution::Parallel;
};

/// Throws Error(InvalidPlan) for replicates < 200 with distributional tests
/// enabled or dimension mismatches, Error(NonGenericFrequency) for
/// frequencies in the exceptional set.
void validate_plan(const ExperimentPlan& plan);

/// Replicate r of shape s draws from replicate id s * 2^32 + r.
std::uint64_t replicate_id(std::size_t shape_index, std::size_t r);

enum class Verdict { Pass, Fail, Skipped };
std::string_view to_string(Verdict v);

struct CltEntry {
  FrequencyPoint t;
  LatticeShape shape;
  std::size_t replicates = 0;
  double spectral_density = 0.0;
  std::string density_source;  // "closed_form" or "covariance_series"
  double target_variance = 0.0;  // target_scale * 2^{d-1} pi^d f(t)
  std::array<double, 2> mean{};  // of (Re, Im) S_n / sqrt(n_1...n_d)
  std::array<std::array<double, 2>, 2> covariance{};
  double correlation = 0.0;
  KsResult ks_re;
  KsResult ks_im;
  double mean_periodogram = 0.0;
  double periodogram_se = 0.0;
  KsResult ks_periodogram;

  Verdict variance_re = Verdict::Skipped;
  Verdict variance_im = Verdict::Skipped;
  Verdict correlation_verdict = Verdict::Skipped;
  Verdict ks_re_verdict = Verdict::Skipped;
  Verdict ks_im_verdict = Verdict::Skipped;
  Verdict periodogram_mean_verdict = Verdict::Skipped;
  Verdict periodogram_ks_verdict = Verdict::Skipped;
  std::vector<std::string> notes;

  bool pass() const;
};

struct CltReport {
  std::string model_kind;
  int dim = 0;
  std::uint64_t master_seed = 0;
  std::size_t replicates = 0;
  double target_scale = 1.0;
  Tolerances tolerances;
  std::vector<CltEntry> entries;

  bool pass() const;
};

/// f(t) used as the target: closed form when available, otherwise the
/// covariance series at the exact covariance range (Volterra).
struct DensityTarget {
  double value = 0.0;
  std::string source;
};
DensityTarget target_density(const FieldModel& model, const FrequencyPoint& t);

/// Simulates plan.replicates samples per shape and evaluates every
/// frequency on each. Deterministic given the plan; serial and parallel
/// execution give identical reports.
CltReport run_clt_experiment(const ExperimentPlan& plan);

/// The same experiment restricted to the periodogram checks.
CltReport run_periodogram_experiment(const ExperimentPlan& plan);

struct LlnPoint {
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// E| n1^{-1} sum_{j=1}^{n1} exp(i j t_1) Y_{n2,j} | along the n1 ladder,
/// with Y_{n2,j} = n2^{-1/2} sum_{k=1}^{n2} exp(i k t_2) D_{j,k}(-t) the
/// column-normalized martingale sums. rotate = false drops exp(i j t_1)
/// (plain average). Models: IID and Linear, d = 2. With rotate, t_1 must be
/// generic.
std::vector<LlnPoint> lln_rotated_average(const FieldModel& model, const FrequencyPoint& t, std::int64_t n2,
                                          const std::vector<std::int64_t>& n1_ladder, std::size_t replicates,
                                          std::uint64_t master_seed, bool rotate = true,
                                          Execution exec = Execution::Parallel);

struct ReportOptions {
  bool timestamp = false;
};

/// JSON with "schema_version": 1; keys in a fixed order so equal reports
/// give equal bytes. Throws Error(Io) with the path on failure.
std::string report_json(const CltReport& report, const ReportOptions& options = {});
void write_report(const CltReport& report, const std::filesystem::path& path, const ReportOptions& options = {});

/// One row per (frequency, shape) entry.
std::string report_csv(const CltReport& report);
void write_report_csv(const CltReport& report, const std::filesystem::path& path);

/// Writes `content` to `path`, throwing Error(Io) with the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace rfclt
