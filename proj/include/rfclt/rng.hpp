#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfclt/lattice.hpp"

namespace rfclt {

/// Sub-stream purposes. Anything keyed by the same (seed, replicate) but a
/// different lane is statistically independent.
namespace lanes {
inline constexpr std::uint32_t kInnovations = 0;
inline constexpr std::uint32_t kAuxiliary = 1;
}  // namespace lanes

struct StreamKey {
  std::uint64_t master_seed = 0;
  std::uint64_t replicate_id = 0;
  std::uint32_t lane = lanes::kInnovations;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// Philox4x64-10 block function (Salmon et al., Random123). Pure function of
/// (counter, key); this is the only source of randomness in the library.
using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;
PhiloxCounter philox4x64(PhiloxCounter counter, PhiloxKey key);

/// Midpoint of one of 2^52 equal bins of (0, 1), from the top 52 bits of a word.
/// Every value is exact, so the result never rounds to 0 or 1.
double to_open_unit(std::uint64_t word);

/// Standard normal quantile (Wichura, AS 241 PPND16). Relative accuracy about
/// 1e-16 on (0, 1). Frozen: normal draws are inverse-CDF transforms of
/// to_open_unit, nothing else.
double normal_quantile(double p);

/// Sequential generator over the counter space of one key. Cheap to copy; two
/// copies made from the same key produce the same sequence.
class RandomStream {
 public:
  explicit RandomStream(const StreamKey& key);

  const StreamKey& key() const noexcept { return key_; }

  std::uint64_t next_u64();
  double next_uniform() { return to_open_unit(next_u64()); }
  double next_normal() { return normal_quantile(next_uniform()); }

 private:
  StreamKey key_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 4> buffer_{};
  int used_ = 4;
};

RandomStream make_stream(const StreamKey& key);

enum class Distribution { StandardNormal, Rademacher, CenteredUniform };

/// Marginal law of the innovations xi_u. Always centered.
class InnovationSpec {
 public:
  static InnovationSpec standard_normal();
  static InnovationSpec rademacher();
  /// Uniform on [-half_width, half_width]; half_width must be positive.
  static InnovationSpec centered_uniform(double half_width);

  Distribution distribution() const noexcept { return distribution_; }
  double half_width() const noexcept { return half_width_; }
  double variance() const noexcept { return variance_; }

  /// Maps one raw 64-bit word to a draw.
  double transform(std::uint64_t word) const;

  std::string name() const;

  friend bool operator==(const InnovationSpec&, const InnovationSpec&) = default;

 private:
  InnovationSpec(Distribution d, double half_width, double variance)
      : distribution_(d), half_width_(half_width), variance_(variance) {}

  Distribution distribution_ = Distribution::StandardNormal;
  double half_width_ = 0.0;
  double variance_ = 1.0;
};

InnovationSpec parse_innovation(std::string_view name, double half_width = 1.0);

/// Raw word for lattice site u of dimension dim under key. Draws are addressed
/// by site, so the value at u never depends on the window it was sampled in.
std::uint64_t site_word(const StreamKey& key, int dim, const Lag& u);

/// i.i.d. innovations over the window 1 - halo <= u <= n + halo.
class InnovationLattice {
 public:
  InnovationLattice(const StreamKey& key, const InnovationSpec& spec, const LatticeShape& shape,
                    const std::array<std::int64_t, kMaxDim>& halo, std::vector<double> values);

  const StreamKey& key() const noexcept { return key_; }
  const InnovationSpec& spec() const noexcept { return spec_; }
  const LatticeShape& shape() const noexcept { return shape_; }
  int dim() const noexcept { return shape_.dim(); }
  const std::array<std::int64_t, kMaxDim>& halo() const noexcept { return halo_; }

  /// First and last covered index on an axis.
  std::int64_t lo(int axis) const noexcept { return 1 - halo_[axis]; }
  std::int64_t hi(int axis) const noexcept { return shape_.extent(axis) + halo_[axis]; }
  std::int64_t width(int axis) const noexcept { return shape_.extent(axis) + 2 * halo_[axis]; }

  bool covers(const Lag& u) const noexcept;
  std::size_t size() const noexcept { return values_.size(); }

  /// Throws Error(MissingInnovation) when u lies outside the window.
  double at(const Lag& u) const;
  double operator[](const Lag& u) const noexcept { return values_[offset(u)]; }

  std::span<const double> values() const noexcept { return values_; }

  std::size_t offset(const Lag& u) const noexcept {
    return static_cast<std::size_t>(((u[0] - lo(0)) * width(1) + (u[1] - lo(1))) * width(2) +
                                    (u[2] - lo(2)));
  }

 private:
  StreamKey key_;
  InnovationSpec spec_;
  LatticeShape shape_;
  std::array<std::int64_t, kMaxDim> halo_{};
  std::vector<double> values_;
};

/// Halo entries on axes beyond shape.dim() are ignored (forced to 0).
/// Throws Error(InvalidShape) for negative halos.
InnovationLattice sample_innovations(const RandomStream& stream, const InnovationSpec& spec,
                                     const LatticeShape& shape,
                                     const std::array<std::int64_t, kMaxDim>& halo);

}  // namespace rfclt
