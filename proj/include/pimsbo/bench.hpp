#ifndef PIMSBO_BENCH_HPP
#define PIMSBO_BENCH_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "pimsbo/acquisition.hpp"
#include "pimsbo/domain.hpp"
#include "pimsbo/gp.hpp"
#include "pimsbo/rng.hpp"
#include "pimsbo/sampling.hpp"

namespace pimsbo {

/// Tabulated objective on a finite grid.
struct Objective {
  FiniteGrid domain;
  Vector true_values;
  double f_star = 0.0;
  Index x_star = 0;

  Objective(FiniteGrid domain, Vector true_values);
};

/// Exact prior draw on the grid.
Objective gen_objective(const KernelSpec& kernel, const FiniteGrid& domain, Rng& rng);

enum class Policy {
  kTs,
  kPims,
  kGpUcbTheoretical,
  kGpUcbHeuristic,
  kIrgpUcbTheoretical,
  kIrgpUcbHeuristic,
  kEi,
  kPi,
};

std::string to_string(Policy policy);
Policy parse_policy(const std::string& name);
std::vector<Policy> all_policies();

enum class SamplerKind { kRff, kExactGrid };

std::string to_string(SamplerKind kind);
SamplerKind parse_sampler(const std::string& name);

struct BoOptions {
  Index iterations = 50;
  Index init_count = 5;
  /// Refit the lengthscale every this many steps; 0 disables refitting.
  Index refit_every = 0;
  std::vector<double> lengthscale_candidates;
  Index rff_features = kDefaultRffFeatures;
  SamplerKind sampler = SamplerKind::kRff;
  double noise_var = 1e-6;
};

/// Seeds for the three independent streams a run consumes.
struct RunSeeds {
  std::uint64_t initial_design = 0;
  std::uint64_t noise = 0;
  std::uint64_t policy = 0;

  /// The initial design is always paired across policies within a trial; the
  /// noise and policy streams are shared only under common random numbers.
  static RunSeeds make(std::uint64_t master, std::uint64_t trial, Policy policy,
                       bool common_random_numbers);
};

struct StepRecord {
  Index t = 0;  // 1-based BO iteration
  Index chosen = 0;
  Vector x;
  double y = 0.0;
  double f_x = 0.0;
  AcquisitionRecord acq;
  Index recommendation = 0;  // argmax of the posterior mean before observing x_t
  double sigma = 0.0;        // sigma_{t-1}(x_t)
  Index n_before = 0;        // observations the posterior was fitted on
  double lengthscale = 0.0;
};

struct RunTrace {
  Policy policy = Policy::kTs;
  double noise_var = 0.0;
  std::vector<Index> init_indices;
  PointMatrix init_inputs;
  Vector init_observations;
  std::vector<StepRecord> steps;

  Index length() const { return static_cast<Index>(steps.size()); }
};

RunTrace run_bo(const Objective& objective, const KernelSpec& kernel, Policy policy,
                const BoOptions& options, const RunSeeds& seeds);

/// Stratified per-dimension permutation design in the grid's bounding box,
/// snapped to the nearest grid point (L1) with duplicates redrawn.
std::vector<Index> initial_design(const FiniteGrid& domain, Index count, Rng& rng);

struct RegretSeries {
  std::vector<double> simple;
  std::vector<double> cumulative;
  std::vector<double> modified_simple;
};

RegretSeries regret_series(const RunTrace& trace, const Objective& objective);

struct SeriesSummary {
  std::vector<double> mean;
  std::vector<double> stderr_;
};

/// Pointwise mean and standard error (sample std / sqrt(n)); needs >= 2 series.
SeriesSummary aggregate(const std::vector<std::vector<double>>& series);

struct EvaluatedStdStats {
  std::vector<double> per_trace_mean;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation across traces
};

EvaluatedStdStats evaluated_std_stats(const std::vector<RunTrace>& traces);

struct ConfidenceTrack {
  std::vector<double> median;
  std::vector<double> q25;
  std::vector<double> q75;
};

/// Linear-interpolation quantile of unsorted values.
double quantile(std::vector<double> values, double q);

ConfidenceTrack confidence_track(const std::vector<RunTrace>& traces);

/// One row per BO step; columns t, policy, x_t_<j>, y_t, f_xt, confidence,
/// sigma_at_choice, simple_regret, cumulative_regret, modified_simple_regret.
void write_trace_csv(std::ostream& out, const RunTrace& trace, const RegretSeries& regret);

/// Shortest round-trip decimal form used in every emitted artifact.
std::string format_double(double value);

}  // namespace pimsbo

#endif  // PIMSBO_BENCH_HPP
