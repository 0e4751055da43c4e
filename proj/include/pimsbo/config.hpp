#ifndef PIMSBO_CONFIG_HPP
#define PIMSBO_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "pimsbo/bench.hpp"
#include "pimsbo/domain.hpp"
#include "pimsbo/kernel.hpp"

namespace pimsbo {

/// Invalid configuration; the message names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline const std::vector<std::string> kAllChecks = {"gauss_tail", "mc_eta", "equivalence",
                                                    "variance_sum", "mig_sandwich"};

/// Flat experiment description. Every key is listed in the README; unknown
/// keys are rejected.
struct ExperimentConfig {
  // kernel
  KernelFamily kernel = KernelFamily::kRbf;
  double lengthscale = 0.2;
  double nu = 2.5;
  // domain: divisions^d cell-centred lattice over [0, r]^d
  Index d = 2;
  std::int64_t divisions = 15;
  double r = 1.0;
  double noise_var = 1e-6;
  // experiment
  std::vector<Policy> policies = all_policies();
  Index iterations = 50;
  Index init_count = 5;
  Index trials = 20;
  std::uint64_t seed = 0;
  Index rff_features = kDefaultRffFeatures;
  Index refit_every = 0;
  std::vector<double> lengthscale_candidates = {0.05, 0.1, 0.2, 0.5, 1.0};
  SamplerKind sampler = SamplerKind::kRff;
  bool common_random_numbers = false;
  bool confidence_tracking = true;
  std::string output_dir = "out";
  // verifiers
  std::vector<std::string> checks = kAllChecks;
  Index mc_draws = 100000;
  Index equivalence_instances = 1000;
  double smoothness_a = 1.0;
  double smoothness_b = 1.0;

  KernelSpec kernel_spec() const;
  Box box() const { return Box{r, d}; }
  FiniteGrid grid() const;
  BoOptions bo_options() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parse a JSON object. A manifest ({"config": {...}, ...}) is accepted and
/// its embedded config used.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);
std::string serialize_config(const ExperimentConfig& config);

/// FNV-1a 64 over the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace pimsbo

#endif  // PIMSBO_CONFIG_HPP
