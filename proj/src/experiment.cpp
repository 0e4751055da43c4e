#include "pimsbo/experiment.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <optional>
#include <sstream>

#include "pimsbo/acquisition.hpp"
#include "pimsbo/sampling.hpp"

namespace pimsbo {

using nlohmann::json;

namespace {

enum : std::uint64_t { kObjectiveStream = 100, kVerifierStream = 200 };

json series_json(const std::vector<std::vector<double>>& series) {
  json out;
  if (series.size() >= 2) {
    const SeriesSummary s = aggregate(series);
    out["mean"] = s.mean;
    out["stderr"] = s.stderr_;
  } else {
    out["mean"] = series.front();
    out["stderr"] = nullptr;
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

PointMatrix uniform_points(Index count, Index d, double r, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, r);
  PointMatrix pts(count, d);
  for (Index i = 0; i < count; ++i)
    for (Index j = 0; j < d; ++j) pts(i, j) = unit(rng);
  return pts;
}

}  // namespace

std::vector<TrialResult> run_trials(const ExperimentConfig& config) {
  const KernelSpec kernel = config.kernel_spec();
  const FiniteGrid grid = config.grid();
  const BoOptions options = config.bo_options();
  const auto trials = static_cast<int>(config.trials);

  std::vector<std::optional<TrialResult>> slots(static_cast<std::size_t>(trials));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(trials));
  std::vector<std::string> contexts(static_cast<std::size_t>(trials));

#pragma omp parallel for schedule(dynamic)
  for (int trial = 0; trial < trials; ++trial) {
    try {
      Rng obj_rng = make_rng(config.seed, {static_cast<std::uint64_t>(trial), kObjectiveStream});
      TrialResult res{trial, gen_objective(kernel, grid, obj_rng), {}, {}};
      for (Policy p : config.policies) {
        const RunSeeds seeds = RunSeeds::make(config.seed, static_cast<std::uint64_t>(trial), p,
                                              config.common_random_numbers);
        RunTrace tr = run_bo(res.objective, kernel, p, options, seeds);
        res.regrets.push_back(regret_series(tr, res.objective));
        res.traces.push_back(std::move(tr));
      }
      slots[static_cast<std::size_t>(trial)] = std::move(res);
    } catch (const std::exception& e) {
      contexts[static_cast<std::size_t>(trial)] = e.what();
      errors[static_cast<std::size_t>(trial)] = std::current_exception();
    }
  }
  std::vector<TrialResult> out;
  for (int trial = 0; trial < trials; ++trial) {
    if (errors[static_cast<std::size_t>(trial)])
      throw std::runtime_error("trial " + std::to_string(trial) + ": " +
                               contexts[static_cast<std::size_t>(trial)]);
    out.push_back(std::move(*slots[static_cast<std::size_t>(trial)]));
  }
  return out;
}

json summarize(const ExperimentConfig& config, const std::vector<TrialResult>& trials) {
  json policies = json::object();
  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    std::vector<std::vector<double>> simple, cumulative, modified;
    std::vector<RunTrace> traces;
    for (const TrialResult& tr : trials) {
      simple.push_back(tr.regrets[p].simple);
      cumulative.push_back(tr.regrets[p].cumulative);
      modified.push_back(tr.regrets[p].modified_simple);
      traces.push_back(tr.traces[p]);
    }
    json entry;
    entry["simple_regret"] = series_json(simple);
    entry["cumulative_regret"] = series_json(cumulative);
    entry["modified_simple_regret"] = series_json(modified);
    const EvaluatedStdStats es = evaluated_std_stats(traces);
    entry["evaluated_std"] = {{"per_trial_mean", es.per_trace_mean}, {"mean", es.mean}, {"std", es.std}};
    if (config.confidence_tracking) {
      const ConfidenceTrack ct = confidence_track(traces);
      entry["confidence"] = {{"median", ct.median}, {"q25", ct.q25}, {"q75", ct.q75}};
    }
    policies[to_string(config.policies[p])] = std::move(entry);
  }
  const FiniteGrid grid = config.grid();
  const BoundConstants bc = BoundConstants::make(config.noise_var, grid.size());
  json out;
  out["policies"] = std::move(policies);
  out["constants"] = {{"c1", bc.c1}, {"c2", bc.c2}, {"cardinality", grid.size()}};
  out["constants"]["tau_ts_T"] = tau_ts(config.iterations, config.d, config.r, config.smoothness_a,
                                        config.smoothness_b, config.kernel_spec());
  out["constants"]["m_t_pims_T"] =
      m_t_pims(config.iterations, config.d, config.r, config.smoothness_a, config.smoothness_b,
               config.noise_var, config.init_count + config.iterations - 1);
  return out;
}

ExperimentArtifacts run_experiment(const ExperimentConfig& config) {
  const std::vector<TrialResult> trials = run_trials(config);

  // Single writer after collection.
  const std::filesystem::path dir(config.output_dir);
  std::filesystem::create_directories(dir);
  ExperimentArtifacts art;
  for (const TrialResult& tr : trials) {
    for (std::size_t p = 0; p < config.policies.size(); ++p) {
      std::ostringstream csv;
      write_trace_csv(csv, tr.traces[p], tr.regrets[p]);
      const auto path = dir / ("regret_" + to_string(config.policies[p]) + "_" +
                               std::to_string(tr.trial) + ".csv");
      write_file(path, csv.str());
      art.files.push_back(path);
    }
  }
  const auto summary_path = dir / "summary.json";
  write_file(summary_path, summarize(config, trials).dump(2) + "\n");
  art.files.push_back(summary_path);

  json manifest;
  manifest["config"] = config_to_json(config);
  manifest["config_hash"] = config_hash(config);
  manifest["seed"] = config.seed;
  manifest["files"] = json::array();
  for (const auto& f : art.files) manifest["files"].push_back(f.filename().string());
  const auto manifest_path = dir / "manifest.json";
  write_file(manifest_path, manifest.dump(2) + "\n");
  art.files.push_back(manifest_path);
  return art;
}

json check_to_json(const CheckReport& rep) {
  auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"name", rep.name},
          {"empirical", num(rep.empirical)},
          {"bound", num(rep.bound)},
          {"stderr", num(rep.stderr_)},
          {"pass", rep.pass}};
}

bool VerifierOutcome::all_pass() const {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

json VerifierOutcome::to_json() const {
  json out = json::array();
  for (const auto& r : reports) out.push_back(check_to_json(r));
  return out;
}

namespace {

CheckReport verify_gauss_tail() {
  std::vector<double> cs;
  for (int i = 0; i <= 1000; ++i) cs.push_back(static_cast<double>(i) * 0.01);
  return gauss_tail_check(cs);
}

std::vector<CheckReport> verify_mc_eta(const ExperimentConfig& config, Rng& rng) {
  std::vector<CheckReport> out;
  const KernelSpec kernel = config.kernel_spec();
  for (Index card : {2, 16, 64}) {
    const FiniteGrid grid(uniform_points(card, config.d, config.r, rng));
    for (bool with_data : {false, true}) {
      Dataset data(config.d, config.noise_var);
      if (with_data) {
        const PointMatrix obs = uniform_points(5, config.d, config.r, rng);
        const GpPosterior prior = GpPosterior::fit(kernel, Dataset(config.d, config.noise_var));
        const Vector f = ExactGridSampler(prior, obs).draw(rng);
        std::normal_distribution<double> normal(0.0, std::sqrt(config.noise_var));
        for (Index i = 0; i < obs.rows(); ++i) data.add(obs.row(i).transpose(), f(i) + normal(rng));
      }
      EtaBoundReport rep = mc_eta_bound(kernel, grid, data, config.mc_draws, rng);
      const std::string tag = "[|X|=" + std::to_string(card) + (with_data ? ",n=5]" : ",n=0]");
      rep.eta.name += tag;
      rep.xi.name += tag;
      out.push_back(rep.eta);
      out.push_back(rep.xi);
    }
  }
  return out;
}

CheckReport verify_equivalence_sweep(const ExperimentConfig& config, Rng& rng) {
  CheckReport rep;
  rep.name = "pims_ucb_equivalence";
  rep.bound = 1.0;
  std::uniform_int_distribution<Index> grid_size(1, 30);
  std::uniform_int_distribution<Index> num_obs(0, 8);
  std::uniform_real_distribution<double> lscale(0.1, 1.0);
  std::uniform_real_distribution<double> log_noise(-6.0, 0.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Index agree = 0;
  for (Index k = 0; k < config.equivalence_instances; ++k) {
    const FiniteGrid grid(uniform_points(grid_size(rng), config.d, config.r, rng));
    const KernelSpec kernel = KernelSpec::rbf(lscale(rng));
    Dataset data(config.d, std::pow(10.0, log_noise(rng)));
    const Index n = num_obs(rng);
    for (Index i = 0; i < n; ++i) data.add(uniform_points(1, config.d, config.r, rng).row(0).transpose(), normal(rng));
    const GpPosterior post = GpPosterior::fit(kernel, data);
    const PosteriorMoments m = post.moments(grid.points());
    const double g_star = ExactGridSampler(post, grid.points()).draw(rng).maxCoeff();
    const EquivalenceReport eq = verify_equivalence(m, g_star);
    bool ok = eq.scores_agree;
    // Pathwise tail identity: xi > c iff g_star > max(mu + c sigma).
    for (double c : {0.0, 0.5, 1.0, 2.0}) {
      const double ucb_max = (m.mean + c * m.stddev()).maxCoeff();
      if ((eq.xi > c) != (g_star > ucb_max)) ok = false;
    }
    if (ok) ++agree;
  }
  rep.empirical = config.equivalence_instances > 0
                      ? static_cast<double>(agree) / static_cast<double>(config.equivalence_instances)
                      : 1.0;
  rep.pass = agree == config.equivalence_instances;
  return rep;
}

CheckReport verify_variance_sum(const ExperimentConfig& config, const FaultInjection& fault) {
  ExperimentConfig small = config;
  small.trials = std::min<Index>(config.trials, 2);
  small.policies = {Policy::kTs, Policy::kPims};
  const std::vector<TrialResult> trials = run_trials(small);
  const KernelSpec kernel = config.kernel_spec();
  const FiniteGrid grid = config.grid();
  const Index T = std::min<Index>(config.iterations, grid.size());
  const double gamma_upper = mig(kernel, config.noise_var, grid, T, MigMode::kGreedy).upper;

  CheckReport rep;
  rep.name = "variance_sum_bound";
  rep.pass = true;
  for (const auto& tr : trials) {
    for (const auto& trace : tr.traces) {
      const CheckReport r = variance_sum_bound_check(trace, kernel, config.noise_var, gamma_upper,
                                                     fault.c1_scale);
      rep.empirical = std::max(rep.empirical, r.empirical);
      rep.bound = r.bound;
      rep.pass = rep.pass && r.pass;
    }
  }
  return rep;
}

CheckReport verify_mig_sandwich(const ExperimentConfig& config, Rng& rng) {
  CheckReport rep;
  rep.name = "mig_greedy_sandwich";
  rep.bound = 1.0 / greedy_factor();
  rep.pass = true;
  std::uniform_real_distribution<double> lscale(0.1, 1.0);
  std::uniform_real_distribution<double> log_noise(-3.0, 0.0);
  double worst = 1.0;
  for (Index card = 4; card <= 12; ++card) {
    for (Index T = 1; T <= 4; ++T) {
      for (int rep_i = 0; rep_i < 3; ++rep_i) {
        const FiniteGrid grid(uniform_points(card, config.d, config.r, rng));
        const KernelSpec kernel = KernelSpec::rbf(lscale(rng));
        const double noise = std::pow(10.0, log_noise(rng));
        const double exact = mig(kernel, noise, grid, T, MigMode::kExact).value;
        const MigResult greedy = mig(kernel, noise, grid, T, MigMode::kGreedy);
        if (greedy.value > exact + 1e-10 || exact > greedy.upper + 1e-10) rep.pass = false;
        worst = std::max(worst, exact / greedy.value);
      }
    }
  }
  rep.empirical = worst;
  return rep;
}

}  // namespace

VerifierOutcome run_verifiers(const ExperimentConfig& config, const FaultInjection& fault) {
  VerifierOutcome out;
  Rng rng = make_rng(config.seed, {kVerifierStream});
  for (const std::string& check : config.checks) {
    if (check == "gauss_tail") {
      out.reports.push_back(verify_gauss_tail());
    } else if (check == "mc_eta") {
      for (auto& r : verify_mc_eta(config, rng)) out.reports.push_back(std::move(r));
    } else if (check == "equivalence") {
      out.reports.push_back(verify_equivalence_sweep(config, rng));
    } else if (check == "variance_sum") {
      out.reports.push_back(verify_variance_sum(config, fault));
    } else if (check == "mig_sandwich") {
      out.reports.push_back(verify_mig_sandwich(config, rng));
    } else {
      throw ConfigError("unknown check '" + check + "'");
    }
  }
  return out;
}

json run_mig(const ExperimentConfig& config, MigMode mode) {
  const FiniteGrid grid = config.grid();
  const MigResult res = mig(config.kernel_spec(), config.noise_var, grid, config.iterations, mode);
  json out;
  out["mode"] = mode == MigMode::kExact ? "exact" : "greedy";
  out["T"] = config.iterations;
  out["cardinality"] = grid.size();
  out["value"] = res.value;
  out["upper"] = res.upper;
  out["subset"] = res.subset;
  out["bcr_bound"] = grid.size() >= 2 ? json(bcr_bound_finite(grid.size(), config.iterations,
                                                                config.noise_var, res.upper))
                                      : json(nullptr);
  return out;
}

}  // namespace pimsbo
