#include "rfclt/rng.hpp"

#include <cmath>
#include <limits>

#include "rfclt/error.hpp"

namespace rfclt {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73BULL;

// Sequential streams live in the half of counter space with the top bit of
// word 3 set; lattice sites never set it (word 3 there is lane | dim << 32).
constexpr std::uint64_t kSequentialTag = 1ULL << 63;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  __extension__ using u128 = unsigned __int128;
  const u128 product = static_cast<u128>(a) * b;
  hi = static_cast<std::uint64_t>(product >> 64);
  lo = static_cast<std::uint64_t>(product);
}

inline PhiloxCounter philox_round(const PhiloxCounter& c, const PhiloxKey& k) {
  std::uint64_t hi0, lo0, hi1, lo1;
  mulhilo(kPhiloxM0, c[0], hi0, lo0);
  mulhilo(kPhiloxM1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

PhiloxCounter philox4x64(PhiloxCounter counter, PhiloxKey key) {
  counter = philox_round(counter, key);
  for (int round = 1; round < 10; ++round) {
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
    counter = philox_round(counter, key);
  }
  return counter;
}

double to_open_unit(std::uint64_t word) {
  return (static_cast<double>(word >> 12) + 0.5) * 0x1.0p-52;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

RandomStream::RandomStream(const StreamKey& key) : key_(key) {}

std::uint64_t RandomStream::next_u64() {
  if (used_ == 4) {
    buffer_ = philox4x64({block_, 0, 0, kSequentialTag | key_.lane},
                         {key_.master_seed, key_.replicate_id});
    ++block_;
    used_ = 0;
  }
  return buffer_[used_++];
}

RandomStream make_stream(const StreamKey& key) { return RandomStream(key); }

InnovationSpec InnovationSpec::standard_normal() {
  return InnovationSpec(Distribution::StandardNormal, 0.0, 1.0);
}

InnovationSpec InnovationSpec::rademacher() {
  return InnovationSpec(Distribution::Rademacher, 0.0, 1.0);
}

InnovationSpec InnovationSpec::centered_uniform(double half_width) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw Error(ErrorKind::Config, "centered_uniform half_width must be positive and finite");
  }
  return InnovationSpec(Distribution::CenteredUniform, half_width, half_width * half_width / 3.0);
}

double InnovationSpec::transform(std::uint64_t word) const {
  switch (distribution_) {
    case Distribution::StandardNormal:
      return normal_quantile(to_open_unit(word));
    case Distribution::Rademacher:
      return (word >> 63) ? 1.0 : -1.0;
    case Distribution::CenteredUniform:
      return half_width_ * (2.0 * to_open_unit(word) - 1.0);
  }
  return 0.0;
}

std::string InnovationSpec::name() const {
  switch (distribution_) {
    case Distribution::StandardNormal: return "standard_normal";
    case Distribution::Rademacher: return "rademacher";
    case Distribution::CenteredUniform: return "centered_uniform";
  }
  return "unknown";
}

InnovationSpec parse_innovation(std::string_view name, double half_width) {
  if (name == "standard_normal") return InnovationSpec::standard_normal();
  if (name == "rademacher") return InnovationSpec::rademacher();
  if (name == "centered_uniform") return InnovationSpec::centered_uniform(half_width);
  throw Error(ErrorKind::Config, "unknown innovation distribution '" + std::string(name) +
                                     "' (expected standard_normal, rademacher or centered_uniform)");
}

std::uint64_t site_word(const StreamKey& key, int dim, const Lag& u) {
  const std::uint64_t tag = (static_cast<std::uint64_t>(dim) << 32) | key.lane;
  return philox4x64({static_cast<std::uint64_t>(u[0]), static_cast<std::uint64_t>(u[1]),
                     static_cast<std::uint64_t>(u[2]), tag},
                    {key.master_seed, key.replicate_id})[0];
}

InnovationLattice::InnovationLattice(const StreamKey& key, const InnovationSpec& spec,
                                     const LatticeShape& shape,
                                     const std::array<std::int64_t, kMaxDim>& halo,
                                     std::vector<double> values)
    : key_(key), spec_(spec), shape_(shape), halo_(halo), values_(std::move(values)) {}

bool InnovationLattice::covers(const Lag& u) const noexcept {
  for (int axis = 0; axis < kMaxDim; ++axis) {
    if (u[axis] < lo(axis) || u[axis] > hi(axis)) return false;
  }
  return true;
}

double InnovationLattice::at(const Lag& u) const {
  if (!covers(u)) {
    throw Error(ErrorKind::MissingInnovation,
                "innovation " + format_lag(u, dim()) + " lies outside the sampled window");
  }
  return values_[offset(u)];
}

InnovationLattice sample_innovations(const RandomStream& stream, const InnovationSpec& spec,
                                     const LatticeShape& shape,
                                     const std::array<std::int64_t, kMaxDim>& halo) {
  std::array<std::int64_t, kMaxDim> h{0, 0, 0};
  for (int axis = 0; axis < shape.dim(); ++axis) {
    if (halo[axis] < 0) {
      throw Error(ErrorKind::InvalidShape, "halo must be non-negative");
    }
    h[axis] = halo[axis];
  }
  const StreamKey& key = stream.key();
  const int dim = shape.dim();
  std::array<std::int64_t, kMaxDim> lo{}, width{};
  for (int axis = 0; axis < kMaxDim; ++axis) {
    lo[axis] = 1 - h[axis];
    width[axis] = shape.extent(axis) + 2 * h[axis];
  }
  std::vector<double> values(static_cast<std::size_t>(width[0] * width[1] * width[2]));
  std::size_t index = 0;
  for (std::int64_t i = 0; i < width[0]; ++i) {
    for (std::int64_t j = 0; j < width[1]; ++j) {
      for (std::int64_t k = 0; k < width[2]; ++k) {
        values[index++] = spec.transform(site_word(key, dim, {lo[0] + i, lo[1] + j, lo[2] + k}));
      }
    }
  }
  return InnovationLattice(key, spec, shape, h, std::move(values));
}

}  // namespace rfclt
