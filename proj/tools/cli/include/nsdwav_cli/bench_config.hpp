#pragma once

#include <vector>

#include "nsdwav/experiment.hpp"
#include "nsdwav_cli/key_value.hpp"

namespace nsdwav::cli {

// Keys understood by bench configs, in manifest order.
const std::vector<std::string>& bench_config_keys();

struct BenchPlan {
  std::vector<TestFunction> signals;
  // Shared settings; `signal` is overwritten per entry of `signals`.
  ExperimentConfig experiment;
  bool fit_rates = false;
  // Every key with its default filled in.
  KeyValues resolved;
};

// Noise model from the noise / rho0 / sigma1sq / sigma2sq / standardize keys
// (missing keys take their defaults).
NoiseModel noise_from(const KeyValues& kv);

// Validates a bench config. Every failure is a ConfigError naming the field
// and, when the value came from a file, its line.
BenchPlan make_bench_plan(const KeyValues& config);

}  // namespace nsdwav::cli
