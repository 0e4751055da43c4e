#include "pimsbo/theory.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "pimsbo/bench.hpp"
#include "pimsbo/sampling.hpp"

namespace pimsbo {

BoundConstants BoundConstants::make(double noise_var, Index cardinality) {
  if (!(noise_var > 0.0)) throw std::invalid_argument("bound constants: noise variance must be positive");
  if (cardinality < 1) throw std::invalid_argument("bound constants: |X| must be >= 1");
  return {2.0 / std::log1p(1.0 / noise_var),
          2.0 + 2.0 * std::log(static_cast<double>(cardinality) / 2.0)};
}

double greedy_factor() { return 1.0 - std::exp(-1.0); }

double info_gain(const KernelSpec& kernel, double noise_var, const PointMatrix& subset) {
  if (!(noise_var > 0.0)) throw std::invalid_argument("info_gain: noise variance must be positive");
  if (subset.rows() == 0) return 0.0;
  Matrix a = kernel.gram(subset) / noise_var;
  a.diagonal().array() += 1.0;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) throw NumericalError("info_gain: factorization failed");
  // 1/2 log det A = sum log L_ii.
  return llt.matrixLLT().diagonal().array().log().sum();
}

namespace {

double binomial(Index n, Index k) {
  double out = 1.0;
  for (Index i = 1; i <= k; ++i) out *= static_cast<double>(n - k + i) / static_cast<double>(i);
  return out;
}

PointMatrix gather_rows(const PointMatrix& points, const std::vector<Index>& rows) {
  PointMatrix out(static_cast<Index>(rows.size()), points.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = points.row(rows[i]);
  return out;
}

// Greedy selection of the largest posterior variance: each pick maximizes the
// information-gain increment 1/2 log(1 + var / noise_var).
MigResult greedy_mig(const KernelSpec& kernel, double noise_var, const FiniteGrid& domain, Index T) {
  const PointMatrix& pts = domain.points();
  const Index n = domain.size();
  Vector var(n);
  for (Index i = 0; i < n; ++i) var(i) = kernel(pts.row(i).transpose(), pts.row(i).transpose());
  Matrix factors(T, n);  // rows v_k with var_k(x) = var_{k-1}(x) - v_k(x)^2
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  MigResult res;
  for (Index k = 0; k < T; ++k) {
    Index best = -1;
    for (Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || var(i) > var(best)) best = i;
    }
    res.value += 0.5 * std::log1p(std::max(var(best), 0.0) / noise_var);
    res.subset.push_back(best);
    taken[static_cast<std::size_t>(best)] = 1;
    const double denom = std::sqrt(std::max(var(best), 0.0) + noise_var);
    for (Index i = 0; i < n; ++i) {
      double c = kernel(pts.row(i).transpose(), pts.row(best).transpose());
      for (Index j = 0; j < k; ++j) c -= factors(j, i) * factors(j, best);
      factors(k, i) = c / denom;
    }
    var -= factors.row(k).transpose().cwiseAbs2();
  }
  res.upper = res.value / greedy_factor();
  return res;
}

MigResult exact_mig(const KernelSpec& kernel, double noise_var, const FiniteGrid& domain, Index T) {
  const Index n = domain.size();
  if (binomial(n, T) > kMaxExactSubsets)
    throw std::invalid_argument("mig: exact enumeration of C(" + std::to_string(n) + ", " +
                                std::to_string(T) + ") subsets exceeds the limit");
  std::vector<Index> comb(static_cast<std::size_t>(T));
  for (Index i = 0; i < T; ++i) comb[static_cast<std::size_t>(i)] = i;
  MigResult res;
  res.value = -std::numeric_limits<double>::infinity();
  while (true) {
    const double gain = info_gain(kernel, noise_var, gather_rows(domain.points(), comb));
    if (gain > res.value) {
      res.value = gain;
      res.subset = comb;
    }
    // Next combination in lexicographic order.
    Index i = T - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - T + i) --i;
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < T; ++j)
      comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
  }
  res.upper = res.value;
  return res;
}

}  // namespace

MigResult mig(const KernelSpec& kernel, double noise_var, const FiniteGrid& domain, Index T,
              MigMode mode) {
  if (T < 1) throw std::invalid_argument("mig: T must be >= 1");
  if (T > domain.size()) throw std::invalid_argument("mig: T exceeds the domain size");
  if (!(noise_var > 0.0)) throw std::invalid_argument("mig: noise variance must be positive");
  return mode == MigMode::kExact ? exact_mig(kernel, noise_var, domain, T)
                                 : greedy_mig(kernel, noise_var, domain, T);
}

CheckReport variance_sum_bound_check(const RunTrace& trace, const KernelSpec& kernel,
                                     double noise_var, double gamma_upper, double c1_scale) {
  CheckReport rep;
  rep.name = "variance_sum_bound";
  const double c1 = c1_scale * BoundConstants::make(noise_var, 2).c1;
  rep.bound = c1 * gamma_upper;
  if (trace.steps.empty()) {
    rep.pass = true;
    return rep;
  }
  Dataset data(trace.init_inputs, trace.init_observations, noise_var);
  double sum = 0.0;
  for (const StepRecord& step : trace.steps) {
    const GpPosterior post = GpPosterior::fit(kernel, data);
    sum += post.mean_var(step.x).var;
    data.add(step.x, step.y);
  }
  rep.empirical = sum;
  rep.pass = sum <= rep.bound + 1e-6;
  return rep;
}

EtaBoundReport mc_eta_bound(const KernelSpec& kernel, const FiniteGrid& domain,
                            const Dataset& dataset, Index num_draws, Rng& rng) {
  if (num_draws < 1) throw std::invalid_argument("mc_eta_bound: need at least one draw");
  const GpPosterior post = GpPosterior::fit(kernel, dataset);
  const ExactGridSampler sampler(post, domain.points());
  const PosteriorMoments moments = post.moments(domain.points());
  const Vector sd = moments.stddev();
  if ((sd.array() <= 0.0).any()) throw NumericalError("mc_eta_bound: zero posterior std on the grid");

  std::uint64_t shard_seeds[kMonteCarloShards];
  for (auto& s : shard_seeds) s = rng();

  // {sum, sum of squares} of eta^2 1{eta>=0} and xi^2 1{xi>=0} per shard.
  double sums[kMonteCarloShards][4] = {};
#pragma omp parallel for schedule(dynamic)
  for (int shard = 0; shard < kMonteCarloShards; ++shard) {
    Rng local(shard_seeds[shard]);
    const Index begin = num_draws * shard / kMonteCarloShards;
    const Index end = num_draws * (shard + 1) / kMonteCarloShards;
    double acc[4] = {};
    for (Index k = begin; k < end; ++k) {
      const Vector g = sampler.draw(local);
      Index arg = 0;
      const double g_star = g.maxCoeff(&arg);
      const double eta = (g(arg) - moments.mean(arg)) / sd(arg);
      const double xi = ((g_star - moments.mean.array()) / sd.array()).minCoeff();
      const double se = eta >= 0.0 ? eta * eta : 0.0;
      const double sx = xi >= 0.0 ? xi * xi : 0.0;
      acc[0] += se;
      acc[1] += se * se;
      acc[2] += sx;
      acc[3] += sx * sx;
    }
    for (int j = 0; j < 4; ++j) sums[shard][j] = acc[j];
  }
  double tot[4] = {};
  for (int shard = 0; shard < kMonteCarloShards; ++shard)
    for (int j = 0; j < 4; ++j) tot[j] += sums[shard][j];

  const double n = static_cast<double>(num_draws);
  const double bound = BoundConstants::make(1.0, domain.size()).c2;
  auto finish = [&](const char* name, double s, double sq) {
    CheckReport rep;
    rep.name = name;
    rep.empirical = s / n;
    const double var = num_draws > 1 ? std::max(0.0, (sq - s * s / n) / (n - 1.0)) : 0.0;
    rep.stderr_ = std::sqrt(var / n);
    rep.bound = bound;
    rep.pass = rep.empirical + 3.0 * rep.stderr_ <= rep.bound;
    return rep;
  };
  EtaBoundReport out;
  out.eta = finish("mc_eta_bound_ts", tot[0], tot[1]);
  out.xi = finish("mc_xi_bound_pims", tot[2], tot[3]);
  out.num_draws = num_draws;
  return out;
}

double normal_survival(double c) { return 0.5 * std::erfc(c / std::numbers::sqrt2); }

CheckReport gauss_tail_check(std::span<const double> c_values) {
  CheckReport rep;
  rep.name = "gauss_tail_bound";
  rep.bound = 1e-12;
  rep.empirical = -std::numeric_limits<double>::infinity();
  for (double c : c_values) {
    if (!(c >= 0.0)) throw std::invalid_argument("gauss_tail_check: c must be >= 0");
    rep.empirical = std::max(rep.empirical, normal_survival(c) - 0.5 * std::exp(-0.5 * c * c));
  }
  if (c_values.empty()) rep.empirical = 0.0;
  rep.pass = rep.empirical <= rep.bound;
  return rep;
}

Discretization::Discretization(Box box, std::int64_t tau, std::int64_t max_points)
    : box_(box), tau_(tau), points_(make_lattice(box, tau, max_points)) {}

Index Discretization::nearest_index(ConstPointRef x) const {
  if (x.size() != box_.d) throw std::invalid_argument("nearest_point: dimension mismatch");
  const double step = box_.r / static_cast<double>(tau_);
  Index index = 0;
  for (Index k = 0; k < box_.d; ++k) {
    const double u = x(k) / step;
    std::int64_t j = static_cast<std::int64_t>(std::floor(u));
    j = std::clamp<std::int64_t>(j, 0, tau_ - 1);
    // The per-axis L1 term is minimized independently; scan neighbours so exact
    // midpoints resolve toward the smaller coordinate.
    std::int64_t best = j;
    double best_dist = std::abs(x(k) - (static_cast<double>(j) + 0.5) * step);
    for (std::int64_t c : {j - 1, j + 1}) {
      if (c < 0 || c >= tau_) continue;
      const double dist = std::abs(x(k) - (static_cast<double>(c) + 0.5) * step);
      if (dist < best_dist || (dist == best_dist && c < best)) {
        best = c;
        best_dist = dist;
      }
    }
    index = index * tau_ + best;
  }
  return index;
}

double Discretization::l1_error_bound() const {
  return static_cast<double>(box_.d) * box_.r / static_cast<double>(tau_);
}

Discretization build_discretization(const Box& box, std::int64_t tau, std::int64_t max_points) {
  return Discretization(box, tau, max_points);
}

namespace {

void check_smoothness(double a, double b, Index d, Index t) {
  if (!(a >= 1.0)) throw std::invalid_argument("smoothness constant a must be >= 1");
  if (!(b > 0.0)) throw std::invalid_argument("smoothness constant b must be > 0");
  if (d < 1 || t < 1) throw std::invalid_argument("d and t must be >= 1");
}

}  // namespace

double derivative_bound(double a, double b, Index d) {
  return b * (std::sqrt(std::log(a * static_cast<double>(d))) + std::sqrt(std::numbers::pi) / 2.0);
}

double smoothness_constant(Index d, double a, double b, const KernelSpec& kernel) {
  return std::max(lipschitz_sigma(kernel), derivative_bound(a, b, d));
}

std::int64_t tau_ts(Index t, Index d, double r, double a, double b, const KernelSpec& kernel) {
  check_smoothness(a, b, d, t);
  const double tt = static_cast<double>(t);
  const double raw = static_cast<double>(d) * r * smoothness_constant(d, a, b, kernel) * tt * tt;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(raw)));
}

double s_t_ts(Index t, Index d, double r, double a, double b, const KernelSpec& kernel) {
  const double tau = static_cast<double>(tau_ts(t, d, r, a, b, kernel));
  return 2.0 - 2.0 * std::log(2.0) + 2.0 * static_cast<double>(d) * std::log(tau);
}

double m_t_pims(Index t, Index d, double r, double a, double b, double noise_var, Index n_t) {
  check_smoothness(a, b, d, t);
  if (!(noise_var > 0.0)) throw std::invalid_argument("m_t: noise variance must be positive");
  const double tt = static_cast<double>(t);
  const double dd = static_cast<double>(d);
  const double inner = std::ceil(tt * tt * b * dd * r *
                                 (std::log(a * dd) + std::sqrt(std::numbers::pi) / 2.0) *
                                 std::sqrt((noise_var + static_cast<double>(n_t)) / noise_var));
  return 2.0 * dd * std::log(inner) - 2.0 * std::log(2.0) + 2.0;
}

double bcr_bound_finite(Index cardinality, Index T, double noise_var, double gamma_upper) {
  if (cardinality < 2) throw std::invalid_argument("bcr bound: |X| must be >= 2");
  if (T < 1) throw std::invalid_argument("bcr bound: T must be >= 1");
  const BoundConstants c = BoundConstants::make(noise_var, cardinality);
  return std::sqrt(c.c1 * c.c2 * static_cast<double>(T) * gamma_upper);
}

}  // namespace pimsbo
