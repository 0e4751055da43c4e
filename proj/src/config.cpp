#include "pimsbo/config.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <set>

namespace pimsbo {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& why) {
  throw ConfigError("config key '" + key + "': " + why);
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) fail(key, "expected a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) fail(key, "expected an integer");
  return v.get<std::int64_t>();
}

bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) fail(key, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) fail(key, "expected a string");
  return v.get<std::string>();
}

std::vector<std::string> get_string_list(const json& v, const std::string& key) {
  if (!v.is_array()) fail(key, "expected a list of strings");
  std::vector<std::string> out;
  for (const auto& e : v) out.push_back(get_string(e, key));
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"kernel",
       [](ExperimentConfig& c, const json& v, const std::string& k) {
         try {
           c.kernel = parse_kernel_family(get_string(v, k));
         } catch (const ConfigError&) {
           throw;
         } catch (const std::invalid_argument& e) {
           fail(k, e.what());
         }
       }},
      {"lengthscale", [](ExperimentConfig& c, const json& v, const std::string& k) { c.lengthscale = get_number(v, k); }},
      {"nu", [](ExperimentConfig& c, const json& v, const std::string& k) { c.nu = get_number(v, k); }},
      {"d", [](ExperimentConfig& c, const json& v, const std::string& k) { c.d = get_integer(v, k); }},
      {"divisions", [](ExperimentConfig& c, const json& v, const std::string& k) { c.divisions = get_integer(v, k); }},
      {"r", [](ExperimentConfig& c, const json& v, const std::string& k) { c.r = get_number(v, k); }},
      {"noise_var", [](ExperimentConfig& c, const json& v, const std::string& k) { c.noise_var = get_number(v, k); }},
      {"policies",
       [](ExperimentConfig& c, const json& v, const std::string& k) {
         c.policies.clear();
         for (const auto& name : get_string_list(v, k)) {
           try {
             c.policies.push_back(parse_policy(name));
           } catch (const std::invalid_argument& e) {
             fail(k, e.what());
           }
         }
       }},
      {"T", [](ExperimentConfig& c, const json& v, const std::string& k) { c.iterations = get_integer(v, k); }},
      {"init_count", [](ExperimentConfig& c, const json& v, const std::string& k) { c.init_count = get_integer(v, k); }},
      {"trials", [](ExperimentConfig& c, const json& v, const std::string& k) { c.trials = get_integer(v, k); }},
      {"seed",
       [](ExperimentConfig& c, const json& v, const std::string& k) {
         if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
           fail(k, "expected a non-negative integer");
         c.seed = v.get<std::uint64_t>();
       }},
      {"rff_features", [](ExperimentConfig& c, const json& v, const std::string& k) { c.rff_features = get_integer(v, k); }},
      {"refit_every", [](ExperimentConfig& c, const json& v, const std::string& k) { c.refit_every = get_integer(v, k); }},
      {"lengthscale_candidates",
       [](ExperimentConfig& c, const json& v, const std::string& k) {
         if (!v.is_array()) fail(k, "expected a list of numbers");
         c.lengthscale_candidates.clear();
         for (const auto& e : v) c.lengthscale_candidates.push_back(get_number(e, k));
       }},
      {"sampler",
       [](ExperimentConfig& c, const json& v, const std::string& k) {
         try {
           c.sampler = parse_sampler(get_string(v, k));
         } catch (const ConfigError&) {
           throw;
         } catch (const std::invalid_argument& e) {
           fail(k, e.what());
         }
       }},
      {"common_random_numbers", [](ExperimentConfig& c, const json& v, const std::string& k) { c.common_random_numbers = get_bool(v, k); }},
      {"confidence_tracking", [](ExperimentConfig& c, const json& v, const std::string& k) { c.confidence_tracking = get_bool(v, k); }},
      {"output_dir", [](ExperimentConfig& c, const json& v, const std::string& k) { c.output_dir = get_string(v, k); }},
      {"checks", [](ExperimentConfig& c, const json& v, const std::string& k) { c.checks = get_string_list(v, k); }},
      {"mc_draws", [](ExperimentConfig& c, const json& v, const std::string& k) { c.mc_draws = get_integer(v, k); }},
      {"equivalence_instances", [](ExperimentConfig& c, const json& v, const std::string& k) { c.equivalence_instances = get_integer(v, k); }},
      {"smoothness_a", [](ExperimentConfig& c, const json& v, const std::string& k) { c.smoothness_a = get_number(v, k); }},
      {"smoothness_b", [](ExperimentConfig& c, const json& v, const std::string& k) { c.smoothness_b = get_number(v, k); }},
  };
  return table;
}

void validate(const ExperimentConfig& c) {
  if (c.kernel != KernelFamily::kLinear && !(c.lengthscale > 0.0)) fail("lengthscale", "must be > 0");
  if (c.kernel == KernelFamily::kMatern && c.nu != 1.5 && c.nu != 2.5) fail("nu", "must be 1.5 or 2.5");
  if (c.d < 1 || c.d > 16) fail("d", "must be in [1, 16]");
  if (c.divisions < 1) fail("divisions", "must be >= 1");
  {
    double count = 1.0;
    for (Index k = 0; k < c.d; ++k) count *= static_cast<double>(c.divisions);
    if (count > static_cast<double>(kMaxLatticePoints)) fail("divisions", "divisions^d exceeds the lattice limit");
    if (c.init_count > static_cast<Index>(count)) fail("init_count", "exceeds the number of grid points");
  }
  if (!(c.r > 0.0)) fail("r", "must be > 0");
  if (!(c.noise_var > 0.0)) fail("noise_var", "must be > 0 (the posterior variance floor needs positive noise)");
  if (c.policies.empty()) fail("policies", "must list at least one policy");
  {
    std::set<Policy> seen(c.policies.begin(), c.policies.end());
    if (seen.size() != c.policies.size()) fail("policies", "duplicate policy");
  }
  if (c.iterations < 1) fail("T", "must be >= 1");
  if (c.init_count < 0) fail("init_count", "must be >= 0");
  if (c.trials < 1) fail("trials", "must be >= 1");
  if (c.rff_features < 1) fail("rff_features", "must be >= 1");
  if (c.refit_every < 0) fail("refit_every", "must be >= 0");
  if (c.lengthscale_candidates.empty()) fail("lengthscale_candidates", "must not be empty");
  for (double l : c.lengthscale_candidates)
    if (!(l > 0.0)) fail("lengthscale_candidates", "entries must be > 0");
  if (c.kernel == KernelFamily::kLinear && c.sampler == SamplerKind::kRff)
    fail("sampler", "the linear kernel requires the exact sampler");
  for (const auto& name : c.checks)
    if (std::find(kAllChecks.begin(), kAllChecks.end(), name) == kAllChecks.end())
      fail("checks", "unknown check '" + name + "'");
  if (c.mc_draws < 1) fail("mc_draws", "must be >= 1");
  if (c.equivalence_instances < 0) fail("equivalence_instances", "must be >= 0");
  if (!(c.smoothness_a >= 1.0)) fail("smoothness_a", "must be >= 1");
  if (!(c.smoothness_b > 0.0)) fail("smoothness_b", "must be > 0");
}

}  // namespace

KernelSpec ExperimentConfig::kernel_spec() const {
  switch (kernel) {
    case KernelFamily::kRbf:
      return KernelSpec::rbf(lengthscale);
    case KernelFamily::kMatern:
      return KernelSpec::matern(nu, lengthscale);
    case KernelFamily::kLinear:
      break;
  }
  return KernelSpec::linear();
}

FiniteGrid ExperimentConfig::grid() const { return FiniteGrid(make_lattice(box(), divisions)); }

BoOptions ExperimentConfig::bo_options() const {
  BoOptions o;
  o.iterations = iterations;
  o.init_count = init_count;
  o.refit_every = refit_every;
  o.lengthscale_candidates = lengthscale_candidates;
  o.rff_features = rff_features;
  o.sampler = sampler;
  o.noise_var = noise_var;
  return o;
}

ExperimentConfig config_from_json(const json& doc_in) {
  const json* doc = &doc_in;
  if (doc->is_object() && doc->contains("config")) doc = &(*doc)["config"];
  if (!doc->is_object()) throw ConfigError("config: expected a JSON object");
  for (const char* required : {"kernel", "d", "divisions"})
    if (!doc->contains(required)) fail(required, "missing required field");
  ExperimentConfig cfg;
  const auto& table = setters();
  for (const auto& [key, value] : doc->items()) {
    const auto it = table.find(key);
    if (it == table.end()) fail(key, "unknown key");
    it->second(cfg, value, key);
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["kernel"] = to_string(c.kernel);
  j["lengthscale"] = c.lengthscale;
  j["nu"] = c.nu;
  j["d"] = c.d;
  j["divisions"] = c.divisions;
  j["r"] = c.r;
  j["noise_var"] = c.noise_var;
  j["policies"] = json::array();
  for (Policy p : c.policies) j["policies"].push_back(to_string(p));
  j["T"] = c.iterations;
  j["init_count"] = c.init_count;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["rff_features"] = c.rff_features;
  j["refit_every"] = c.refit_every;
  j["lengthscale_candidates"] = c.lengthscale_candidates;
  j["sampler"] = to_string(c.sampler);
  j["common_random_numbers"] = c.common_random_numbers;
  j["confidence_tracking"] = c.confidence_tracking;
  j["output_dir"] = c.output_dir;
  j["checks"] = c.checks;
  j["mc_draws"] = c.mc_draws;
  j["equivalence_instances"] = c.equivalence_instances;
  j["smoothness_a"] = c.smoothness_a;
  j["smoothness_b"] = c.smoothness_b;
  return j;
}

std::string serialize_config(const ExperimentConfig& config) { return config_to_json(config).dump(2); }

std::string config_hash(const ExperimentConfig& config) {
  const std::string canonical = config_to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pimsbo
