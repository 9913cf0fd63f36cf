#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsdwav/estimators.hpp"
#include "nsdwav/noise.hpp"
#include "nsdwav/signals.hpp"
#include "nsdwav/wavelet.hpp"

namespace nsdwav {

std::string method_label(Method method);
Method parse_method(std::string_view name);

struct ExperimentConfig {
  TestFunction signal = make_test_function(TestFunctionName::Spikes);
  std::vector<std::size_t> n_values = {1024};
  double snr = 4.0;
  NoiseModel noise{NsdPairMixture{}};
  std::vector<Method> methods = {Method::TermByTerm, Method::Block};
  DenoiseConfig denoise;
  WaveletBasis basis = make_basis(WaveletFamily::Coiflet, 3);
  std::size_t replicates = 100;
  std::uint64_t master_seed = 1;
  // Noise sd used instead of the SNR calibration; 0 gives noiseless data.
  std::optional<double> noise_sigma_override;
  // Worker threads for replicates; 0 picks hardware concurrency.
  unsigned threads = 1;

  // Throws Error{InvalidConfig}.
  void validate() const;
};

struct RiskCell {
  Method method;
  std::size_t n;
  double mean_mse;
  double sd_mse;
  std::size_t replicates;
  double mean_threshold;
  double mean_sigma_sq;
  double noise_sigma;
  // One entry per replicate, in replicate order; replicate r shares its noise
  // across methods.
  std::vector<double> mse_samples;
};

struct RiskReport {
  std::string signal;
  std::string basis;
  std::string noise;
  double snr;
  std::uint64_t master_seed;
  std::vector<RiskCell> cells;

  const RiskCell& cell(Method method, std::size_t n) const;
};

double mse(std::span<const double> fitted, std::span<const double> truth);
double mse(const Signal& fitted, const Signal& truth);

// Noise seed of replicate r at sample size n.
std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t n, std::size_t replicate);

// Observed signal for one replicate: truth + sigma * eps / sqrt(population var).
Signal noisy_observation(const Signal& truth, const NoiseModel& noise, double sigma,
                         std::uint64_t seed);

RiskReport run_risk_experiment(const ExperimentConfig& config);

struct PairedComparison {
  double mean_difference;  // mean of (a - b)
  double std_error;
};

// Per-replicate paired difference MSE(a) - MSE(b) at size n.
PairedComparison paired_difference(const RiskReport& report, std::size_t n, Method a, Method b);

struct RateFit {
  Method method;
  double slope;
  double intercept;
  double slope_se;
  // Rate exponent -2s/(2s+1).
  double target;
  // "log(n)" for block, "log(n/log n)" for term-by-term.
  std::string covariate;
};

// Least-squares slope of log(mean MSE) on log n (block) or log(n / log n)
// (term-by-term). Needs at least 3 sample sizes.
RateFit fit_rate(const RiskReport& report, Method method, double smoothness_s);

// Runs the experiment and fits one rate per configured method.
// Throws Error{InvalidConfig} for fewer than 4 strictly increasing n values.
std::vector<RateFit> empirical_rate(const ExperimentConfig& config);

}  // namespace nsdwav
