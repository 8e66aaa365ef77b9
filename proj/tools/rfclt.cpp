// rfclt: command-line front end.
//
// Exit codes: 0 pass, 1 verdict failure, 2 usage or config error, 3 I/O error.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rfclt/config.hpp"
#include "rfclt/error.hpp"
#include "rfclt/harness.hpp"
#include "rfclt/projection.hpp"
#include "rfclt/spectral.hpp"

namespace {

using namespace rfclt;

constexpr int kExitPass = 0;
constexpr int kExitVerdict = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  bool no_timestamp = false;
  bool negative_control = false;
  bool serial = false;
  std::uint64_t replicate = 0;
  std::optional<std::uint32_t> pair_lane;
  bool plain = false;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

RunConfig load(const Options& o) {
  RunConfig cfg = load_config(o.config);
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.replicates) cfg.replicates = *o.replicates;
  return cfg;
}

// --out, else the config's output.path, else stdout.
void emit(const Options& o, const RunConfig& cfg, const std::string& content) {
  if (!o.out.empty()) {
    write_text_file(o.out, content);
  } else if (cfg.output.path) {
    write_text_file(*cfg.output.path, content);
  } else {
    std::cout << content;
    std::cout.flush();
  }
}

int cmd_simulate(const Options& o) {
  const RunConfig cfg = load(o);
  if (cfg.shapes.empty()) throw Error(ErrorKind::Config, o.config + ": experiment.shapes: no shape to simulate");
  const LatticeShape& shape = cfg.shapes.front();
  const LatticeSample sample = simulate(cfg.model, shape, {cfg.master_seed, o.replicate, lanes::kInnovations});
  std::ostringstream out;
  for (int axis = 0; axis < shape.dim(); ++axis) out << 'u' << axis + 1 << ',';
  out << "value\n";
  for (std::size_t i = 0; i < sample.values.size(); ++i) {
    const Lag u = shape.site(i);
    for (int axis = 0; axis < shape.dim(); ++axis) out << u[axis] << ',';
    out << num(sample.values[i]) << '\n';
  }
  emit(o, cfg, out.str());
  return kExitPass;
}

int cmd_spectrum(const Options& o) {
  const RunConfig cfg = load(o);
  const FieldModel& model = cfg.model;
  const int d = model.dim();
  const LatticeShape fejer_shape = cfg.spectrum.shape.value_or(LatticeShape::cube(d, 16));
  std::int64_t radius = 64;
  if (cfg.spectrum.radius) {
    radius = *cfg.spectrum.radius;
  } else if (const auto r = covariance_range(model)) {
    radius = std::max<std::int64_t>(1, *r);
  }
  const DensityFn f = density_function(model);
  const double norm = std::pow(kTwoPi, -d);
  const auto& grid = cfg.spectrum.grid;

  std::ostringstream out;
  for (int axis = 0; axis < d; ++axis) out << 't' << axis + 1 << ',';
  out << "f_analytic,f_partial_sum,fejer_smoothed_variance_scaled\n";
  for (std::int64_t a = 0; a < grid[0]; ++a) {
    for (std::int64_t b = 0; b < grid[1]; ++b) {
      for (std::int64_t c = 0; c < grid[2]; ++c) {
        const std::array<std::int64_t, kMaxDim> k{a, b, c};
        std::array<double, kMaxDim> x{};
        for (int axis = 0; axis < d; ++axis) {
          x[axis] = -kPi + kTwoPi * (static_cast<double>(k[axis]) + 0.5) / static_cast<double>(grid[axis]);
        }
        const FrequencyPoint t = FrequencyPoint::make(std::span<const double>(x.data(), static_cast<std::size_t>(d)));
        const double analytic = model.as<VolterraModel>()
                                    ? ProjectionSeries::build(model, t).second_moment() * norm
                                    : analytic_spectral_density(model, t);
        const double partial = spectral_density_partial_sum(model, t, radius);
        const double fejer = fejer_smoothed_variance(f, fejer_shape, t, std::nullopt, Execution::Parallel) * norm;
        for (int axis = 0; axis < d; ++axis) out << num(x[axis]) << ',';
        out << num(analytic) << ',' << num(partial) << ',' << num(fejer) << '\n';
      }
    }
  }
  emit(o, cfg, out.str());
  return kExitPass;
}

int cmd_clt(const Options& o) {
  const RunConfig cfg = load(o);
  ExperimentPlan plan = cfg.plan();
  if (o.negative_control) plan.target_scale = 2.0;
  plan.execution = o.serial ? Execution::Serial : Execution::Parallel;
  const CltReport report = run_clt_experiment(plan);
  ReportOptions ro;
  ro.timestamp = cfg.output.timestamp && !o.no_timestamp;
  emit(o, cfg, report_json(report, ro));
  if (cfg.output.csv) write_report_csv(report, *cfg.output.csv);
  for (const auto& e : report.entries) {
    std::cerr << (e.pass() ? "PASS " : "FAIL ") << e.shape.label() << " t=" << e.t.label()
              << " var=(" << num(e.covariance[0][0]) << ", " << num(e.covariance[1][1])
              << ") target=" << num(e.target_variance) << '\n';
  }
  return report.pass() ? kExitPass : kExitVerdict;
}

int cmd_martingale_error(const Options& o) {
  const RunConfig cfg = load(o);
  const int d = cfg.model.dim();
  if (o.pair_lane) {
    // Pairing check: M_n must be built from the innovations behind S_n.
    const LatticeShape shape = cfg.shapes.empty() ? LatticeShape::cube(d, 8) : cfg.shapes.front();
    const StreamKey sample_key{cfg.master_seed, 0, lanes::kInnovations};
    const LatticeSample sample = simulate(cfg.model, shape, sample_key);
    const FrequencyPoint t = cfg.frequencies.empty() ? default_frequencies(d)[0] : cfg.frequencies.front();
    const ProjectionSeries series = ProjectionSeries::build(cfg.model, t, cfg.truncation);
    paired_martingale_sum(series, sample, {cfg.master_seed, 0, *o.pair_lane});
  }
  std::ostringstream out;
  for (int axis = 0; axis < d; ++axis) out << 't' << axis + 1 << ',';
  out << "shape,estimate,standard_error\n";
  bool pass = true;
  for (const auto& t : cfg.frequencies) {
    std::vector<MeanEstimate> ladder;
    for (std::size_t si = 0; si < cfg.shapes.size(); ++si) {
      const StreamKey key{cfg.master_seed, replicate_id(si, 0), lanes::kInnovations};
      const MeanEstimate m = martingale_approx_error(cfg.model, cfg.shapes[si], t, cfg.truncation, cfg.replicates,
                                                     key, Execution::Parallel);
      ladder.push_back(m);
      for (int axis = 0; axis < d; ++axis) out << num(t[axis]) << ',';
      out << cfg.shapes[si].label() << ',' << num(m.mean) << ',' << num(m.standard_error) << '\n';
    }
    if (!decreasing_within(ladder, 2.0)) {
      std::cerr << "FAIL t=" << t.label() << ": error does not decrease along the shape ladder\n";
      pass = false;
    }
  }
  emit(o, cfg, out.str());
  return pass ? kExitPass : kExitVerdict;
}

int cmd_lln(const Options& o) {
  const RunConfig cfg = load(o);
  const FrequencyPoint t = cfg.lln.t.value_or(default_frequencies(2)[0]);
  const bool rotate = cfg.lln.rotate && !o.plain;
  const auto points = lln_rotated_average(cfg.model, t, cfg.lln.n2, cfg.lln.n1, cfg.replicates, cfg.master_seed,
                                          rotate, Execution::Parallel);
  std::ostringstream out;
  out << "n1,n2,estimate,standard_error\n";
  std::vector<MeanEstimate> ladder;
  for (const auto& p : points) {
    out << p.n1 << ',' << p.n2 << ',' << num(p.estimate) << ',' << num(p.standard_error) << '\n';
    ladder.push_back({p.estimate, p.standard_error});
  }
  emit(o, cfg, out.str());
  if (!decreasing_within(ladder, 2.0)) {
    std::cerr << "FAIL: averages do not decrease along the n1 ladder\n";
    return kExitVerdict;
  }
  return kExitPass;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Model and experiment config (TOML, or JSON by .json extension)")
      ->required();
  cmd->add_option("--out", o.out, "Output file (default: output.path from the config, else stdout)");
  cmd->add_option("--seed", o.seed, "Master seed, overrides experiment.master_seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationary random fields on Z^d: simulation, spectral densities, and Monte Carlo checks of the "
               "Fourier-transform central limit theorem",
               "rfclt"};
  app.require_subcommand(1);
  Options o;

  auto* simulate_cmd = app.add_subcommand("simulate", "Write one realization as CSV (indices, then value)");
  add_common(simulate_cmd, o);
  simulate_cmd->add_option("--replicate", o.replicate, "Replicate id of the realization")->capture_default_str();

  auto* spectrum_cmd = app.add_subcommand(
      "spectrum", "Write f(t) on a frequency grid: closed form, covariance partial sum, Fejer-smoothed variance");
  add_common(spectrum_cmd, o);

  auto* clt_cmd = app.add_subcommand("clt", "Run the CLT and periodogram experiment and write a JSON report");
  add_common(clt_cmd, o);
  clt_cmd->add_option("--replicates", o.replicates, "Replicates per shape, overrides experiment.replicates");
  clt_cmd->add_flag("--no-timestamp", o.no_timestamp, "Omit the timestamp field from the report");
  clt_cmd->add_flag("--negative-control", o.negative_control,
                    "Test hook: double the target variance; a correct build must then exit 1");
  clt_cmd->add_flag("--serial", o.serial, "Run replicates on one thread (the report is identical)");

  auto* mart_cmd = app.add_subcommand(
      "martingale-error", "Write (n_1...n_d)^-1 E|S_n - M_n|^2 along the shape ladder as CSV");
  add_common(mart_cmd, o);
  mart_cmd->add_option("--replicates", o.replicates, "Replicates per shape, overrides experiment.replicates");
  mart_cmd->add_option("--pair-lane", o.pair_lane,
                       "Test hook: build M_n from this innovation lane; any lane but 0 is an invalid pairing");

  auto* lln_cmd = app.add_subcommand("lln", "Write rotated averages of column martingale sums along the n1 ladder");
  add_common(lln_cmd, o);
  lln_cmd->add_option("--replicates", o.replicates, "Replicates per ladder point, overrides experiment.replicates");
  lln_cmd->add_flag("--plain", o.plain, "Drop the rotation exp(i j t_1): plain averages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(o);
    if (*spectrum_cmd) return cmd_spectrum(o);
    if (*clt_cmd) return cmd_clt(o);
    if (*mart_cmd) return cmd_martingale_error(o);
    if (*lln_cmd) return cmd_lln(o);
  } catch (const Error& e) {
    std::cerr << "rfclt: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return e.kind() == ErrorKind::Io ? kExitIo : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "rfclt: error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
