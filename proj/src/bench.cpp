#include "pimsbo/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

namespace pimsbo {

Objective::Objective(FiniteGrid domain_in, Vector values)
    : domain(std::move(domain_in)), true_values(std::move(values)) {
  if (true_values.size() != domain.size())
    throw std::invalid_argument("objective: one true value per grid point required");
  if (!true_values.allFinite()) throw std::invalid_argument("objective: non-finite true value");
  x_star = argmax_lowest(true_values);
  f_star = true_values(x_star);
}

Objective gen_objective(const KernelSpec& kernel, const FiniteGrid& domain, Rng& rng) {
  const GpPosterior prior = GpPosterior::fit(kernel, Dataset(domain.dim(), 1.0));
  const ExactGridSampler sampler(prior, domain.points());
  return Objective(domain, sampler.draw(rng));
}

namespace {

struct PolicyName {
  Policy policy;
  const char* name;
};

constexpr PolicyName kPolicyNames[] = {
    {Policy::kTs, "ts"},
    {Policy::kPims, "pims"},
    {Policy::kGpUcbTheoretical, "gpucb_theoretical"},
    {Policy::kGpUcbHeuristic, "gpucb_heuristic"},
    {Policy::kIrgpUcbTheoretical, "irgpucb_theoretical"},
    {Policy::kIrgpUcbHeuristic, "irgpucb_heuristic"},
    {Policy::kEi, "ei"},
    {Policy::kPi, "pi"},
};

enum StreamId : std::uint64_t { kInitStream = 1, kNoiseStream = 2, kPolicyStream = 3 };

}  // namespace

std::string to_string(Policy policy) {
  for (const auto& p : kPolicyNames)
    if (p.policy == policy) return p.name;
  return "unknown";
}

Policy parse_policy(const std::string& name) {
  for (const auto& p : kPolicyNames)
    if (name == p.name) return p.policy;
  throw std::invalid_argument("unknown policy '" + name + "'");
}

std::vector<Policy> all_policies() {
  std::vector<Policy> out;
  for (const auto& p : kPolicyNames) out.push_back(p.policy);
  return out;
}

std::string to_string(SamplerKind kind) { return kind == SamplerKind::kRff ? "rff" : "exact"; }

SamplerKind parse_sampler(const std::string& name) {
  if (name == "rff") return SamplerKind::kRff;
  if (name == "exact") return SamplerKind::kExactGrid;
  throw std::invalid_argument("unknown sampler '" + name + "'");
}

RunSeeds RunSeeds::make(std::uint64_t master, std::uint64_t trial, Policy policy,
                        bool common_random_numbers) {
  const auto pid = static_cast<std::uint64_t>(policy) + 1;
  RunSeeds s;
  s.initial_design = derive_seed(master, {trial, kInitStream});
  if (common_random_numbers) {
    s.noise = derive_seed(master, {trial, kNoiseStream});
    s.policy = derive_seed(master, {trial, kPolicyStream});
  } else {
    s.noise = derive_seed(master, {trial, kNoiseStream, pid});
    s.policy = derive_seed(master, {trial, kPolicyStream, pid});
  }
  return s;
}

std::vector<Index> initial_design(const FiniteGrid& domain, Index count, Rng& rng) {
  if (count < 0) throw std::invalid_argument("initial design: negative count");
  if (count > domain.size()) throw std::invalid_argument("initial design: more points than the grid holds");
  std::vector<Index> out;
  if (count == 0) return out;

  const PointMatrix& pts = domain.points();
  const Vector lo = pts.colwise().minCoeff().transpose();
  const Vector hi = pts.colwise().maxCoeff().transpose();
  const Index d = domain.dim();
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::vector<Index>> strata(static_cast<std::size_t>(d));
  for (auto& perm : strata) {
    perm.resize(static_cast<std::size_t>(count));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
  }
  auto snap = [&](const Vector& x) {
    Index best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < pts.rows(); ++i) {
      const double dist = (pts.row(i).transpose() - x).lpNorm<1>();
      if (dist < best_dist) {
        best = i;
        best_dist = dist;
      }
    }
    return best;
  };

  std::vector<char> used(static_cast<std::size_t>(domain.size()), 0);
  constexpr int kMaxRedraws = 32;
  for (Index i = 0; i < count; ++i) {
    Index pick = -1;
    for (int attempt = 0; attempt < kMaxRedraws && pick < 0; ++attempt) {
      Vector x(d);
      for (Index k = 0; k < d; ++k) {
        const double u = (static_cast<double>(strata[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]) +
                          unit(rng)) / static_cast<double>(count);
        x(k) = lo(k) + u * (hi(k) - lo(k));
      }
      const Index cand = snap(x);
      if (!used[static_cast<std::size_t>(cand)]) pick = cand;
    }
    if (pick < 0) {
      // Stratum exhausted on a coarse grid: fall back to a uniform unused point.
      std::vector<Index> free;
      for (Index j = 0; j < domain.size(); ++j)
        if (!used[static_cast<std::size_t>(j)]) free.push_back(j);
      std::uniform_int_distribution<std::size_t> any(0, free.size() - 1);
      pick = free[any(rng)];
    }
    used[static_cast<std::size_t>(pick)] = 1;
    out.push_back(pick);
  }
  return out;
}

RunTrace run_bo(const Objective& objective, const KernelSpec& kernel_in, Policy policy,
                const BoOptions& options, const RunSeeds& seeds) {
  if (options.iterations < 1) throw std::invalid_argument("run_bo: T must be >= 1");
  if (options.refit_every > 0 && options.lengthscale_candidates.empty())
    throw std::invalid_argument("run_bo: lengthscale refitting needs candidates");

  const FiniteGrid& domain = objective.domain;
  const PointMatrix& grid = domain.points();
  const double noise_sd = std::sqrt(options.noise_var);

  Rng init_rng(seeds.initial_design);
  Rng noise_rng(seeds.noise);
  Rng policy_rng(seeds.policy);
  std::normal_distribution<double> normal(0.0, 1.0);

  RunTrace trace;
  trace.policy = policy;
  trace.noise_var = options.noise_var;
  trace.init_indices = initial_design(domain, options.init_count, init_rng);

  Dataset data(domain.dim(), options.noise_var);
  for (Index idx : trace.init_indices) data.add(domain.point(idx), objective.true_values(idx) + noise_sd * normal(noise_rng));
  trace.init_inputs = data.inputs();
  trace.init_observations = data.observations();

  KernelSpec kernel = kernel_in;
  const Index cardinality = domain.size();
  for (Index t = 1; t <= options.iterations; ++t) {
    const GpPosterior post = GpPosterior::fit(kernel, data);
    const PosteriorMoments moments = post.moments(grid);

    auto path_values = [&]() -> Vector {
      if (options.sampler == SamplerKind::kExactGrid) return ExactGridSampler(post, grid).draw(policy_rng);
      auto fmap = std::make_shared<const FeatureMap>(
          build_rff(kernel, domain.dim(), options.rff_features, policy_rng));
      return draw_posterior_sample(post, std::move(fmap), policy_rng).eval_batch(grid);
    };
    const double incumbent = data.empty() ? moments.mean.maxCoeff() : data.observations().maxCoeff();

    AcquisitionRecord acq;
    switch (policy) {
      case Policy::kTs:
        acq = select_ts(moments, path_values());
        break;
      case Policy::kPims:
        acq = select_pims(moments, path_values());
        break;
      case Policy::kGpUcbTheoretical:
        acq = select_gp_ucb(moments, std::sqrt(beta_theoretical(cardinality, t)));
        break;
      case Policy::kGpUcbHeuristic:
        acq = select_gp_ucb(moments, std::sqrt(beta_heuristic(domain.dim(), t)));
        break;
      case Policy::kIrgpUcbTheoretical:
        acq = select_irgp_ucb(moments, draw_zeta(zeta_shift_theoretical(cardinality), kZetaRate, policy_rng));
        break;
      case Policy::kIrgpUcbHeuristic:
        acq = select_irgp_ucb(moments, draw_zeta(zeta_shift_heuristic(domain.dim()), kZetaRate, policy_rng));
        break;
      case Policy::kEi:
        acq = select_ei(moments, incumbent);
        break;
      case Policy::kPi:
        acq = select_pi_classic(moments, incumbent);
        break;
    }

    StepRecord step;
    step.t = t;
    step.chosen = acq.chosen;
    step.x = domain.point(acq.chosen);
    step.f_x = objective.true_values(acq.chosen);
    step.y = step.f_x + noise_sd * normal(noise_rng);
    step.acq = acq;
    step.recommendation = argmax_lowest(moments.mean);
    step.sigma = acq.posterior_std_at_choice;
    step.n_before = data.size();
    step.lengthscale = kernel.lengthscale();
    data.add(step.x, step.y);
    trace.steps.push_back(std::move(step));

    if (options.refit_every > 0 && t % options.refit_every == 0)
      kernel = fit_lengthscale(kernel, data, options.lengthscale_candidates);
  }
  return trace;
}

RegretSeries regret_series(const RunTrace& trace, const Objective& objective) {
  RegretSeries out;
  double best = -std::numeric_limits<double>::infinity();
  double cum = 0.0;
  for (const StepRecord& step : trace.steps) {
    if (step.chosen < 0 || step.chosen >= objective.domain.size() ||
        objective.true_values(step.chosen) != step.f_x)
      throw std::invalid_argument("regret_series: trace was not produced on this objective");
    best = std::max(best, step.f_x);
    cum += objective.f_star - step.f_x;
    out.simple.push_back(objective.f_star - best);
    out.cumulative.push_back(cum);
    out.modified_simple.push_back(objective.f_star - objective.true_values(step.recommendation));
  }
  return out;
}

SeriesSummary aggregate(const std::vector<std::vector<double>>& series) {
  if (series.size() < 2) throw std::invalid_argument("aggregate: need at least two series for a standard error");
  const std::size_t len = series.front().size();
  for (const auto& s : series)
    if (s.size() != len) throw std::invalid_argument("aggregate: series lengths differ");
  const double n = static_cast<double>(series.size());
  SeriesSummary out{std::vector<double>(len, 0.0), std::vector<double>(len, 0.0)};
  for (std::size_t t = 0; t < len; ++t) {
    double sum = 0.0;
    for (const auto& s : series) sum += s[t];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& s : series) ss += (s[t] - mean) * (s[t] - mean);
    out.mean[t] = mean;
    out.stderr_[t] = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

EvaluatedStdStats evaluated_std_stats(const std::vector<RunTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("evaluated_std_stats: no traces");
  EvaluatedStdStats out;
  for (const RunTrace& tr : traces) {
    if (tr.steps.empty()) throw std::invalid_argument("evaluated_std_stats: empty trace");
    double sum = 0.0;
    for (const StepRecord& s : tr.steps) sum += s.sigma;
    out.per_trace_mean.push_back(sum / static_cast<double>(tr.steps.size()));
  }
  const double n = static_cast<double>(out.per_trace_mean.size());
  out.mean = std::accumulate(out.per_trace_mean.begin(), out.per_trace_mean.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : out.per_trace_mean) ss += (v - out.mean) * (v - out.mean);
  out.std = out.per_trace_mean.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

ConfidenceTrack confidence_track(const std::vector<RunTrace>& traces) {
  ConfidenceTrack out;
  if (traces.empty()) return out;
  const std::size_t len = traces.front().steps.size();
  for (const auto& tr : traces)
    if (tr.steps.size() != len) throw std::invalid_argument("confidence_track: trace lengths differ");
  for (std::size_t t = 0; t < len; ++t) {
    std::vector<double> vals;
    for (const auto& tr : traces) vals.push_back(tr.steps[t].acq.confidence);
    out.median.push_back(quantile(vals, 0.5));
    out.q25.push_back(quantile(vals, 0.25));
    out.q75.push_back(quantile(vals, 0.75));
  }
  return out;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const RunTrace& trace, const RegretSeries& regret) {
  if (regret.simple.size() != trace.steps.size())
    throw std::invalid_argument("write_trace_csv: regret series and trace lengths differ");
  const Index d = trace.steps.empty() ? trace.init_inputs.cols() : trace.steps.front().x.size();
  out << "t,policy";
  for (Index j = 0; j < d; ++j) out << ",x_t_" << j;
  out << ",y_t,f_xt,confidence,sigma_at_choice,simple_regret,cumulative_regret,modified_simple_regret\n";
  const std::string name = to_string(trace.policy);
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const StepRecord& s = trace.steps[i];
    out << s.t << ',' << name;
    for (Index j = 0; j < d; ++j) out << ',' << format_double(s.x(j));
    out << ',' << format_double(s.y) << ',' << format_double(s.f_x) << ','
        << format_double(s.acq.confidence) << ',' << format_double(s.sigma) << ','
        << format_double(regret.simple[i]) << ',' << format_double(regret.cumulative[i]) << ','
        << format_double(regret.modified_simple[i]) << '\n';
  }
}

}  // namespace pimsbo
