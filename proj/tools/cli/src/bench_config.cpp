#include "nsdwav_cli/bench_config.hpp"

#include <algorithm>
#include <utility>

#include "nsdwav/error.hpp"

namespace nsdwav::cli {

namespace {

const std::vector<std::pair<std::string, std::string>>& defaults() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"signals", "spikes,corner"},
      {"n_values", "1024"},
      {"snr", "4"},
      {"noise", "nsd"},
      {"rho0", "-0.5"},
      {"sigma1sq", "1"},
      {"sigma2sq", "9"},
      {"standardize", "true"},
      {"methods", "term,block"},
      {"wavelet", "coif3"},
      {"s", "2"},
      {"sigma_estimator", "local"},
      {"replicates", "100"},
      {"seed", "1"},
  };
  return table;
}

// Runs `fn`, turning library validation errors into ConfigError on `key`.
template <typename Fn>
auto as_config(const KeyValues& kv, const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw ConfigError(kv.line_of(key), key, e.what());
  }
}

}  // namespace

const std::vector<std::string>& bench_config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [key, value] : defaults()) k.push_back(key);
    for (const char* opt : {"threshold", "coarse_level", "rates", "noise_sigma"}) k.push_back(opt);
    return k;
  }();
  return keys;
}

NoiseModel noise_from(const KeyValues& kv) {
  const std::string kind = kv.get_or("noise", "nsd");
  if (kind == "iid") return NoiseModel(IidGaussian{1.0});
  if (kind != "nsd") throw ConfigError(kv.line_of("noise"), "noise", "expected nsd or iid, got '" + kind + "'");
  NsdPairMixture pair;
  if (kv.contains("rho0")) pair.rho0 = kv.get_double("rho0");
  if (kv.contains("sigma1sq")) pair.sigma1_sq = kv.get_double("sigma1sq");
  if (kv.contains("sigma2sq")) pair.sigma2_sq = kv.get_double("sigma2sq");
  if (kv.contains("standardize")) pair.standardize = kv.get_bool("standardize");
  const std::string key = !(pair.rho0 > -1.0 && pair.rho0 < 0.0) ? "rho0" : "sigma1sq";
  return as_config(kv, key, [&] { return NoiseModel(pair); });
}

BenchPlan make_bench_plan(const KeyValues& config) {
  config.require_known(bench_config_keys());
  BenchPlan plan;
  plan.resolved = config;
  for (const auto& [key, value] : defaults()) {
    if (!plan.resolved.contains(key)) plan.resolved.set(key, value);
  }
  const KeyValues& kv = plan.resolved;

  for (const auto& name : kv.get_list("signals")) {
    plan.signals.push_back(as_config(kv, "signals", [&] { return parse_test_function(name); }));
  }
  if (plan.signals.empty()) throw ConfigError(kv.line_of("signals"), "signals", "no signals listed");

  ExperimentConfig& e = plan.experiment;
  e.n_values.clear();
  for (const auto& text : kv.get_list("n_values")) {
    long long n = 0;
    try {
      KeyValues one;
      one.set("n_values", text);
      n = one.get_int("n_values");
    } catch (const ConfigError&) {
      throw ConfigError(kv.line_of("n_values"), "n_values", "'" + text + "' is not an integer");
    }
    if (n < 4 || !is_power_of_two(static_cast<std::size_t>(n))) {
      throw ConfigError(kv.line_of("n_values"), "n_values",
                        "sample size " + text + " is not a power of two >= 4");
    }
    e.n_values.push_back(static_cast<std::size_t>(n));
  }
  e.snr = kv.get_double("snr");
  e.noise = noise_from(kv);
  e.methods.clear();
  for (const auto& name : kv.get_list("methods")) {
    e.methods.push_back(as_config(kv, "methods", [&] { return parse_method(name); }));
  }
  e.basis = as_config(kv, "wavelet", [&] { return parse_basis(kv.get_or("wavelet", "")); });
  e.denoise.smoothness_s = kv.get_double("s");
  const std::string estimator = kv.get_or("sigma_estimator", "");
  if (estimator == "local") {
    e.denoise.sigma_estimator = SigmaEstimator::LocalBlock;
  } else if (estimator == "first_difference") {
    e.denoise.sigma_estimator = SigmaEstimator::FirstDifference;
  } else {
    throw ConfigError(kv.line_of("sigma_estimator"), "sigma_estimator",
                      "expected local or first_difference, got '" + estimator + "'");
  }
  if (kv.contains("threshold")) e.denoise.threshold_override = kv.get_double("threshold");
  if (kv.contains("coarse_level")) {
    e.denoise.coarse_level_override = static_cast<int>(kv.get_int("coarse_level"));
  }
  const long long replicates = kv.get_int("replicates");
  if (replicates < 1) throw ConfigError(kv.line_of("replicates"), "replicates", "must be >= 1");
  e.replicates = static_cast<std::size_t>(replicates);
  const long long seed = kv.get_int("seed");
  if (seed < 0) throw ConfigError(kv.line_of("seed"), "seed", "must be nonnegative");
  e.master_seed = static_cast<std::uint64_t>(seed);
  if (kv.contains("noise_sigma")) e.noise_sigma_override = kv.get_double("noise_sigma");

  const bool increasing = std::adjacent_find(e.n_values.begin(), e.n_values.end(),
                                             [](auto a, auto b) { return a >= b; }) ==
                          e.n_values.end();
  plan.fit_rates = kv.contains("rates") ? kv.get_bool("rates") : (e.n_values.size() >= 4 && increasing);
  if (plan.fit_rates && (e.n_values.size() < 4 || !increasing)) {
    throw ConfigError(kv.line_of("rates"), "rates",
                      "rate fitting needs at least 4 strictly increasing n_values");
  }
  plan.resolved.set("rates", plan.fit_rates ? "true" : "false");

  // Remaining cross-field checks (n against filter length, coarse level, ...).
  as_config(kv, "n_values", [&] {
    e.validate();
    return 0;
  });
  return plan;
}

}  // namespace nsdwav::cli
