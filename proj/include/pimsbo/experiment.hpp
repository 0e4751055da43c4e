#ifndef PIMSBO_EXPERIMENT_HPP
#define PIMSBO_EXPERIMENT_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "pimsbo/bench.hpp"
#include "pimsbo/config.hpp"
#include "pimsbo/theory.hpp"

namespace pimsbo {

/// Exit-code contract shared by the CLI subcommands.
enum ExitCode : int { kExitPass = 0, kExitCheckFailure = 1, kExitUsage = 2 };

/// One trial: a shared synthetic objective and one trace per configured policy.
struct TrialResult {
  Index trial = 0;
  Objective objective;
  std::vector<RunTrace> traces;  // config.policies order
  std::vector<RegretSeries> regrets;
};

/// Run every trial in memory. Trials run in parallel; results are ordered by
/// trial index, so output does not depend on the thread count.
std::vector<TrialResult> run_trials(const ExperimentConfig& config);

/// policy name -> {regret summaries, evaluated-std stats, confidence quantiles}.
nlohmann::json summarize(const ExperimentConfig& config, const std::vector<TrialResult>& trials);

struct ExperimentArtifacts {
  std::vector<std::filesystem::path> files;
};

/// Writes regret_<policy>_<trial>.csv, summary.json and manifest.json into
/// config.output_dir.
ExperimentArtifacts run_experiment(const ExperimentConfig& config);

nlohmann::json check_to_json(const CheckReport& rep);

/// Knobs for deliberately breaking a verifier in tests.
struct FaultInjection {
  double c1_scale = 1.0;
};

struct VerifierOutcome {
  std::vector<CheckReport> reports;
  bool all_pass() const;
  int exit_code() const { return all_pass() ? kExitPass : kExitCheckFailure; }
  nlohmann::json to_json() const;
};

/// Runs the verifier suite selected by config.checks.
VerifierOutcome run_verifiers(const ExperimentConfig& config, const FaultInjection& fault = {});

/// MIG of the configured grid for T = config.iterations.
nlohmann::json run_mig(const ExperimentConfig& config, MigMode mode);

}  // namespace pimsbo

#endif  // PIMSBO_EXPERIMENT_HPP
