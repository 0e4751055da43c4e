// Command-line entry point: run | verify | mig.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "pimsbo/experiment.hpp"
#include "pimsbo/parallel.hpp"

namespace {

using namespace pimsbo;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file (or a manifest.json)");
  cmd->add_option("--seed", args.seed, "master seed, overrides the config");
  cmd->add_option("--out", args.out, "output directory, overrides the config");
  cmd->add_option("--jobs", args.jobs, "worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
}

ExperimentConfig load(const CommonArgs& args) {
  ExperimentConfig cfg;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + args.config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    cfg = parse_config(buf.str());
  }
  if (args.seed) cfg.seed = *args.seed;
  if (!args.out.empty()) cfg.output_dir = args.out;
  if (args.jobs > 0) kernels::set_threads(args.jobs);
  return cfg;
}

void emit(const nlohmann::json& report, const CommonArgs& args, const std::string& file_name) {
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!args.out.empty()) {
    std::filesystem::create_directories(args.out);
    std::ofstream out(std::filesystem::path(args.out) / file_name, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error("failed to write " + file_name);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Posterior-sampling Bayesian optimization experiments and checks"};
  app.require_subcommand(1);

  CommonArgs run_args, verify_args, mig_args;
  auto* run = app.add_subcommand("run", "run the BO experiment and write CSV/JSON artifacts");
  add_common(run, run_args);
  auto* verify = app.add_subcommand("verify", "run the verifier suite");
  add_common(verify, verify_args);
  auto* mig_cmd = app.add_subcommand("mig", "maximum information gain of the configured grid");
  add_common(mig_cmd, mig_args);
  std::string mode = "greedy";
  mig_cmd->add_option("--mode", mode, "exact or greedy")->check(CLI::IsMember({"exact", "greedy"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*run) {
      const ExperimentConfig cfg = load(run_args);
      const ExperimentArtifacts art = run_experiment(cfg);
      std::cerr << "wrote " << art.files.size() << " files to " << cfg.output_dir << "\n";
      return kExitPass;
    }
    if (*verify) {
      const ExperimentConfig cfg = load(verify_args);
      const VerifierOutcome outcome = run_verifiers(cfg);
      emit(outcome.to_json(), verify_args, "verify_report.json");
      for (const auto& r : outcome.reports)
        if (!r.pass) std::cerr << "FAILED: " << r.name << "\n";
      return outcome.exit_code();
    }
    const ExperimentConfig cfg = load(mig_args);
    emit(run_mig(cfg, mode == "exact" ? MigMode::kExact : MigMode::kGreedy), mig_args, "mig.json");
    return kExitPass;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
}
