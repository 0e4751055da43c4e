#ifndef PIMSBO_THEORY_HPP
#define PIMSBO_THEORY_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pimsbo/domain.hpp"
#include "pimsbo/gp.hpp"
#include "pimsbo/rng.hpp"

namespace pimsbo {

struct RunTrace;

/// C1 = 2 / log(1 + 1/noise_var), C2 = 2 + 2 log(|X| / 2).
struct BoundConstants {
  double c1 = 0.0;
  double c2 = 0.0;

  static BoundConstants make(double noise_var, Index cardinality);
};

/// Outcome of one verifier. Serialized as {name, empirical, bound, stderr, pass}.
struct CheckReport {
  std::string name;
  double empirical = 0.0;
  double bound = 0.0;
  double stderr_ = 0.0;
  bool pass = false;
};

/// 1/2 log det(I + K_A / noise_var).
double info_gain(const KernelSpec& kernel, double noise_var, const PointMatrix& subset);

enum class MigMode { kExact, kGreedy };

struct MigResult {
  double value = 0.0;        // exact gamma_T, or the greedy lower bound
  double upper = 0.0;        // exact value, or greedy / (1 - 1/e)
  std::vector<Index> subset;
};

/// Largest enumeration mig() will attempt in exact mode.
inline constexpr double kMaxExactSubsets = 1e6;

MigResult mig(const KernelSpec& kernel, double noise_var, const FiniteGrid& domain, Index T,
              MigMode mode);

/// 1 - 1/e, the greedy guarantee for monotone submodular maximization.
double greedy_factor();

/// Sum over the trace of sigma^2_{t-1}(x_t) against C1 * gamma_upper.
/// `c1_scale` multiplies C1 and exists so fault injection can be tested.
/// The posterior is rebuilt from the trace's initial design and observations.
CheckReport variance_sum_bound_check(const RunTrace& trace, const KernelSpec& kernel,
                                     double noise_var, double gamma_upper,
                                     double c1_scale = 1.0);

struct EtaBoundReport {
  CheckReport eta;  // E[eta^2 1{eta >= 0}] for TS
  CheckReport xi;   // E[xi^2 1{xi >= 0}] for PIMS
  Index num_draws = 0;
};

/// Fixed number of RNG shards the Monte-Carlo verifiers split draws into.
/// Results depend on the shard count, never on the thread count.
inline constexpr int kMonteCarloShards = 16;

/// Monte-Carlo check of E[stat^2 1{stat >= 0}] <= 2 + 2 log(|X|/2) for the TS
/// statistic eta_t and the PIMS statistic xi_t, using exact grid draws.
/// Shard seeds are taken from `rng`.
EtaBoundReport mc_eta_bound(const KernelSpec& kernel, const FiniteGrid& domain,
                            const Dataset& dataset, Index num_draws, Rng& rng);

/// 1 - Phi(c) via erfc.
double normal_survival(double c);

CheckReport gauss_tail_check(std::span<const double> c_values);

/// Uniform lattice over a box with tau cell-centred points per axis.
class Discretization {
 public:
  Discretization(Box box, std::int64_t tau, std::int64_t max_points = kMaxLatticePoints);

  const Box& box() const { return box_; }
  std::int64_t tau() const { return tau_; }
  Index size() const { return points_.rows(); }
  const PointMatrix& points() const { return points_; }

  /// Lattice index minimizing the L1 distance to x; ties go to smaller coordinates.
  Index nearest_index(ConstPointRef x) const;
  Vector nearest_point(ConstPointRef x) const { return points_.row(nearest_index(x)).transpose(); }

  /// Worst-case L1 rounding distance d r / tau.
  double l1_error_bound() const;

 private:
  Box box_;
  std::int64_t tau_;
  PointMatrix points_;
};

Discretization build_discretization(const Box& box, std::int64_t tau,
                                    std::int64_t max_points = kMaxLatticePoints);

/// b (sqrt(log(a d)) + sqrt(pi)/2), the bound on the expected maximal partial derivative.
double derivative_bound(double a, double b, Index d);

/// L = max(L_sigma, b (sqrt(log(a d)) + sqrt(pi)/2)).
double smoothness_constant(Index d, double a, double b, const KernelSpec& kernel);

/// ceil(d r L t^2).
std::int64_t tau_ts(Index t, Index d, double r, double a, double b, const KernelSpec& kernel);

/// s_t = 2 - 2 log 2 + 2 d log(tau_t).
double s_t_ts(Index t, Index d, double r, double a, double b, const KernelSpec& kernel);

/// m_t = 2 d log(ceil(t^2 b d r (log(a d) + sqrt(pi)/2) sqrt((s + n_t)/s))) - 2 log 2 + 2.
double m_t_pims(Index t, Index d, double r, double a, double b, double noise_var, Index n_t);

/// sqrt(C1 C2 T gamma_upper).
double bcr_bound_finite(Index cardinality, Index T, double noise_var, double gamma_upper);

}  // namespace pimsbo

#endif  // PIMSBO_THEORY_HPP
