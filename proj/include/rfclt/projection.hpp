#pragma once

// Exact projection calculus for fields that are finite polynomials in
// independent centered innovations.
//
// A monomial is a product of innovations at distinct sites. Conditioning on
// the sigma-field of sites <= c keeps a monomial when all of its factors sit
// at or below c and kills it otherwise (the offending factors have mean 0).
// P_u is the alternating sum over the 2^d corners {u - eps : eps in {0,1}^d}.

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "rfclt/execution.hpp"
#include "rfclt/frequency.hpp"
#include "rfclt/lattice.hpp"
#include "rfclt/models.hpp"
#include "rfclt/numerics.hpp"
#include "rfclt/rng.hpp"

namespace rfclt {

/// coefficient * prod xi_{factors}. Factors are lags (unused axes 0), sorted
/// and distinct.
struct Term {
  double coefficient = 0.0;
  std::vector<Lag> factors;

  friend bool operator==(const Term&, const Term&) = default;
};

using TermList = std::vector<Term>;

/// Sorts factors, merges like monomials, drops exact zeros. Output is sorted
/// by factor list.
TermList normalize(TermList terms);

/// X_j as a term list. Throws Error(UnsupportedModel) for GaussianColumns.
TermList field_terms(const FieldModel& model, const Lag& j);

/// E(. | sites <= c) applied monomial-wise on the first `dim` axes.
TermList conditional_expectation(const TermList& terms, const Lag& c, int dim);

/// P_u of a term list, literally as the 2^d-term alternating sum.
TermList project(const TermList& terms, const Lag& u, int dim);

/// P_0 X_j. Throws Error(UnsupportedModel) for GaussianColumns.
TermList project_p0(const FieldModel& model, const Lag& j);

/// E|sum of terms|^2 = sum c^2 sigma^{2 deg} (distinct monomials are
/// orthogonal).
double second_moment(const TermList& terms, double innovation_variance);

/// sum_{|j|_inf <= ell} E|P_0 X_j|^2; equals gamma(0) once ell covers the
/// kernel.
double projection_norm_sum(const FieldModel& model, std::int64_t ell);

/// Exact radius of the kernel (0 for IID); the default truncation.
std::int64_t default_truncation(const FieldModel& model);

/// D_0^{(ell)}(t) = sum_{|j|_inf <= ell} exp(-i j.t) P_0 X_j as merged
/// complex-coefficient monomials. Immutable once built.
class ProjectionSeries {
 public:
  struct ComplexTerm {
    std::complex<double> coefficient;
    std::vector<Lag> factors;
  };

  /// ell defaults to the kernel radius, which makes the truncation exact.
  /// Throws Error(UnsupportedModel) for GaussianColumns, Error(InvalidPlan)
  /// on a dimension mismatch or negative ell.
  static ProjectionSeries build(const FieldModel& model, const FrequencyPoint& t,
                                std::optional<std::int64_t> ell = std::nullopt);

  const FieldModel& model() const noexcept { return model_; }
  const FrequencyPoint& t() const noexcept { return t_; }
  std::int64_t truncation() const noexcept { return ell_; }
  const std::vector<ComplexTerm>& terms() const noexcept { return terms_; }
  int dim() const noexcept { return t_.dim(); }

  /// Innovation halo needed to evaluate D_j for every site j of a window.
  std::array<std::int64_t, kMaxDim> halo() const noexcept { return halo_; }

  /// E|D_0^{(ell)}(t)|^2 from the symbolic form.
  double second_moment() const;

  /// D_j at the site j (1-based convention: unused axes 1). With
  /// `conjugate`, returns D_j(-t) = conj(D_j(t)). Throws
  /// Error(MissingInnovation) if a factor falls outside the window.
  std::complex<double> evaluate_at(const InnovationLattice& xi, const Lag& site, bool conjugate = false) const;

 private:
  FieldModel model_ = FieldModel::iid(1);
  FrequencyPoint t_;
  std::int64_t ell_ = 0;
  std::vector<ComplexTerm> terms_;
  std::array<std::int64_t, kMaxDim> halo_{0, 0, 0};
};

/// The lattice site that plays the role of the origin: 0 on active axes.
Lag origin_site(int dim);

/// D_0^{(ell)}(t) on the given innovations.
std::complex<double> d0_truncated(const ProjectionSeries& series, const InnovationLattice& innovations);

/// (2 pi)^{-d} times the Monte Carlo mean of |D_0(t)|^2 over `replicates`
/// innovation draws keyed (key.master_seed, key.replicate_id + r, key.lane).
MeanEstimate spectral_density_projection_mc(const FieldModel& model, const FrequencyPoint& t,
                                            std::optional<std::int64_t> ell, std::size_t replicates,
                                            const StreamKey& key, Execution exec = Execution::Serial);

struct MartingaleSum {
  std::complex<double> value;
  LatticeShape shape;
  FrequencyPoint t;
  std::int64_t truncation = 0;
};

/// M_n(t) = sum_{1<=j<=n} exp(i j.t) D_j(-t) over the given innovations.
///
/// The coefficients are conjugated: for a real field S_n(t) is approximated
/// by translates of D_0(-t) = conj(D_0(t)); with D_0(t) itself the gap does
/// not vanish for non-symmetric kernels.
MartingaleSum martingale_sum(const ProjectionSeries& series, const InnovationLattice& innovations);

/// Samples the innovations for (shape, key) with the series halo first.
MartingaleSum martingale_sum(const ProjectionSeries& series, const LatticeShape& shape, const StreamKey& key);

/// M_n for a sample that was already simulated. `key` must be the sample's
/// own key (same seed, replicate and lane) and the shape must match,
/// otherwise Error(InvalidPairing): S_n and M_n are only comparable on
/// shared innovations.
MartingaleSum paired_martingale_sum(const ProjectionSeries& series, const LatticeSample& sample,
                                    const StreamKey& key);

/// (n_1...n_d)^{-1} E|S_n(t) - M_n(t)|^2 over `replicates` shared-innovation
/// draws.
MeanEstimate martingale_approx_error(const FieldModel& model, const LatticeShape& shape, const FrequencyPoint& t,
                                     std::optional<std::int64_t> ell, std::size_t replicates,
                                     const StreamKey& key, Execution exec = Execution::Serial);

}  // namespace rfclt
