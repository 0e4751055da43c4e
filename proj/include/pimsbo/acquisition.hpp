#ifndef PIMSBO_ACQUISITION_HPP
#define PIMSBO_ACQUISITION_HPP

#include <optional>
#include <vector>

#include "pimsbo/domain.hpp"
#include "pimsbo/gp.hpp"
#include "pimsbo/rng.hpp"
#include "pimsbo/sampling.hpp"

namespace pimsbo {

/// Outcome of one selection step. `confidence` holds eta_t for TS, xi_t for
/// PIMS, beta_t^{1/2} for GP-UCB and zeta_t^{1/2} for IRGP-UCB; NaN for EI/PI.
struct AcquisitionRecord {
  Index chosen = 0;
  double score = 0.0;
  double confidence = 0.0;
  std::optional<double> g_star;
  double posterior_std_at_choice = 0.0;

  bool operator==(const AcquisitionRecord&) const = default;
};

/// Index of the largest entry; lowest index on ties.
Index argmax_lowest(const Vector& values);
/// Index of the smallest entry; lowest index on ties.
Index argmin_lowest(const Vector& values);

// Selection on precomputed posterior moments over the grid. The grid-level
// overloads below compute the moments and forward here.

AcquisitionRecord select_ts(const PosteriorMoments& moments, const Vector& path_values);
AcquisitionRecord select_pims(const PosteriorMoments& moments, const Vector& path_values);
AcquisitionRecord select_gp_ucb(const PosteriorMoments& moments, double beta_sqrt);
/// GP-UCB with beta^{1/2} = sqrt(zeta).
AcquisitionRecord select_irgp_ucb(const PosteriorMoments& moments, double zeta);
AcquisitionRecord select_ei(const PosteriorMoments& moments, double incumbent);
AcquisitionRecord select_pi_classic(const PosteriorMoments& moments, double incumbent);

AcquisitionRecord select_ts(const GpPosterior& post, const FiniteGrid& domain, const SamplePath& path);
AcquisitionRecord select_pims(const GpPosterior& post, const FiniteGrid& domain,
                              const SamplePath& path);
AcquisitionRecord select_gp_ucb(const GpPosterior& post, const FiniteGrid& domain, double beta_sqrt);
AcquisitionRecord select_ei(const GpPosterior& post, const FiniteGrid& domain, double incumbent);
AcquisitionRecord select_pi_classic(const GpPosterior& post, const FiniteGrid& domain,
                                    double incumbent);

/// Standardized gaps (g_star - mu) / sigma at every grid point.
Vector standardized_gaps(const PosteriorMoments& moments, double g_star);

/// max(0, 2 log(|X| t^2 / sqrt(2 pi))).
double beta_theoretical(Index cardinality, Index t);
/// 0.2 d log(2 t).
double beta_heuristic(Index d, Index t);

/// Two-parameter exponential: shift + Exp(rate).
double draw_zeta(double shift, double rate, Rng& rng);

inline constexpr double kZetaRate = 0.5;
/// 2 log(|X| / 2), clamped at 0.
double zeta_shift_theoretical(Index cardinality);
/// 2 / d.
double zeta_shift_heuristic(Index d);

struct EquivalenceReport {
  double xi = 0.0;
  double max_ucb = 0.0;
  Index pims_choice = 0;
  Index ucb_choice = 0;
  std::vector<Index> pims_set;
  std::vector<Index> ucb_set;
  bool identity_holds = false;  // |max(mu + xi sigma) - g_star| <= 1e-8
  bool scores_agree = false;    // identity holds and both index sets match
};

/// PIMS with sample maximum g_star against GP-UCB with beta^{1/2} = xi.
EquivalenceReport verify_equivalence(const PosteriorMoments& moments, double g_star);
EquivalenceReport verify_equivalence(const GpPosterior& post, const FiniteGrid& domain,
                                     double g_star);

}  // namespace pimsbo

#endif  // PIMSBO_ACQUISITION_HPP
