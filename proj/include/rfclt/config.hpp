#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rfclt/frequency.hpp"
#include "rfclt/harness.hpp"
#include "rfclt/lattice.hpp"
#include "rfclt/models.hpp"

namespace rfclt {

struct SpectrumSettings {
  std::array<std::int64_t, kMaxDim> grid{16, 16, 16};  // frequency-grid points per axis
  std::optional<std::int64_t> radius;                  // covariance partial-sum radius
  std::optional<LatticeShape> shape;                   // Fejer orders
};

struct LlnSettings {
  std::optional<FrequencyPoint> t;
  std::int64_t n2 = 16;
  std::vector<std::int64_t> n1{16, 64, 256};
  bool rotate = true;
};

struct OutputSettings {
  std::optional<std::filesystem::path> path;
  std::optional<std::filesystem::path> csv;
  bool timestamp = false;
};

/// Everything a run needs, parsed from one config file.
///
///   [model]       kind, dim, innovation, half_width, phi, kernel
///   [experiment]  frequencies, shapes, replicates, master_seed, tests, truncation
///   [spectrum]    grid, radius, shape
///   [lln]         t, n2, n1, rotate
///   [output]      path, csv, timestamp
///
/// Unknown keys are errors.
struct RunConfig {
  FieldModel model = FieldModel::iid(2);
  std::vector<FrequencyPoint> frequencies;
  std::vector<LatticeShape> shapes;
  std::size_t replicates = 2000;
  std::uint64_t master_seed = 0;
  bool clt = true;
  bool periodogram = true;
  std::optional<std::int64_t> truncation;
  SpectrumSettings spectrum;
  LlnSettings lln;
  OutputSettings output;

  ExperimentPlan plan() const;
};

/// Throws Error(Config) with "source:line:column: field: message" (line and
/// column only for TOML input).
RunConfig parse_toml_config(std::string_view text, std::string_view source = "config");
RunConfig parse_json_config(std::string_view text, std::string_view source = "config");

/// Dispatches on the extension: .json is JSON, anything else TOML. Throws
/// Error(Io) when the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace rfclt
