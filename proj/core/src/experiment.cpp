#include "nsdwav/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "nsdwav/error.hpp"

namespace nsdwav {

std::string method_label(Method method) {
  return method == Method::TermByTerm ? "term" : "block";
}

Method parse_method(std::string_view name) {
  if (name == "term" || name == "termbyterm" || name == "term-by-term") return Method::TermByTerm;
  if (name == "block") return Method::Block;
  throw Error(ErrorCode::InvalidConfig, "unknown method '" + std::string(name) +
                                            "' (expected term or block)");
}

void ExperimentConfig::validate() const {
  if (replicates < 1) throw Error(ErrorCode::InvalidConfig, "replicates must be >= 1");
  if (n_values.empty()) throw Error(ErrorCode::InvalidConfig, "n_values must be nonempty");
  if (methods.empty()) throw Error(ErrorCode::InvalidConfig, "at least one method is required");
  for (std::size_t n : n_values) {
    if (!is_power_of_two(n) || n < 2 * basis.length() || n < 4) {
      throw Error(ErrorCode::InvalidConfig,
                  "sample size " + std::to_string(n) + " must be a power of two >= " +
                      std::to_string(std::max<std::size_t>(4, 2 * basis.length())));
    }
    denoise.validate(log2_exact(n));
  }
  if (!noise_sigma_override && !(snr > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "snr must be positive");
  }
  if (noise_sigma_override && !(*noise_sigma_override >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "noise sigma override must be nonnegative");
  }
}

const RiskCell& RiskReport::cell(Method method, std::size_t n) const {
  for (const auto& c : cells) {
    if (c.method == method && c.n == n) return c;
  }
  throw Error(ErrorCode::InvalidConfig,
              "report has no cell for " + method_label(method) + " at n=" + std::to_string(n));
}

double mse(std::span<const double> fitted, std::span<const double> truth) {
  if (fitted.size() != truth.size() || fitted.empty()) {
    throw Error(ErrorCode::LengthMismatch, "mse needs equal nonzero lengths, got " +
                                               std::to_string(fitted.size()) + " and " +
                                               std::to_string(truth.size()));
  }
  double sum = 0.0;
  for (std::size_t m = 0; m < fitted.size(); ++m) {
    const double e = fitted[m] - truth[m];
    sum += e * e;
  }
  return sum / static_cast<double>(fitted.size());
}

double mse(const Signal& fitted, const Signal& truth) { return mse(fitted.samples(), truth.samples()); }

std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t n, std::size_t replicate) {
  return derive_seed(derive_seed(master_seed, n), replicate);
}

Signal noisy_observation(const Signal& truth, const NoiseModel& noise, double sigma,
                         std::uint64_t seed) {
  const auto eps = generate(noise, truth.size(), seed);
  const double pop = noise.population_sigma_sq();
  const double scale = pop > 0.0 ? sigma / std::sqrt(pop) : 0.0;
  std::vector<double> y(truth.samples().begin(), truth.samples().end());
  for (std::size_t m = 0; m < y.size(); ++m) y[m] += scale * eps[m];
  return Signal(std::move(y), SignalKind::Observed);
}

namespace {

struct ReplicateOutcome {
  double mse;
  double threshold;
  double sigma_sq;
};

unsigned resolve_threads(unsigned requested, std::size_t work) {
  unsigned threads = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(work, 1)));
}

// Evaluates fn(r) for r in [0, count) into slot r; workers take a strided
// share so results never depend on scheduling.
template <typename Fn>
void for_each_replicate(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1) {
    for (std::size_t r = 0; r < count; ++r) fn(r);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t r = w; r < count; r += threads) fn(r);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

RiskReport run_risk_experiment(const ExperimentConfig& config) {
  config.validate();
  RiskReport report{config.signal.label(), config.basis.name(), config.noise.describe(),
                    config.snr, config.master_seed, {}};
  const unsigned threads = resolve_threads(config.threads, config.replicates);

  for (std::size_t n : config.n_values) {
    const Signal truth = sample(config.signal, n);
    const double sigma = config.noise_sigma_override ? *config.noise_sigma_override
                                                     : calibrate_snr(truth, config.snr);

    // outcomes[method][replicate]
    std::vector<std::vector<ReplicateOutcome>> outcomes(
        config.methods.size(), std::vector<ReplicateOutcome>(config.replicates));
    for_each_replicate(config.replicates, threads, [&](std::size_t r) {
      const Signal observed =
          noisy_observation(truth, config.noise, sigma, replicate_seed(config.master_seed, n, r));
      for (std::size_t k = 0; k < config.methods.size(); ++k) {
        DenoiseConfig dc = config.denoise;
        dc.method = config.methods[k];
        const DenoiseResult result = denoise(observed, config.basis, dc);
        outcomes[k][r] = {mse(result.fitted, truth), result.threshold_used, result.sigma_sq_hat};
      }
    });

    for (std::size_t k = 0; k < config.methods.size(); ++k) {
      std::vector<double> mses, thresholds, sigmas;
      for (const auto& o : outcomes[k]) {
        mses.push_back(o.mse);
        thresholds.push_back(o.threshold);
        sigmas.push_back(o.sigma_sq);
      }
      report.cells.push_back(RiskCell{config.methods[k], n, mean_of(mses), sd_of(mses),
                                      config.replicates, mean_of(thresholds), mean_of(sigmas),
                                      sigma, std::move(mses)});
    }
  }
  return report;
}

PairedComparison paired_difference(const RiskReport& report, std::size_t n, Method a, Method b) {
  const auto& ca = report.cell(a, n);
  const auto& cb = report.cell(b, n);
  std::vector<double> diff(ca.mse_samples.size());
  for (std::size_t r = 0; r < diff.size(); ++r) diff[r] = ca.mse_samples[r] - cb.mse_samples[r];
  const double se = diff.size() > 1 ? sd_of(diff) / std::sqrt(static_cast<double>(diff.size())) : 0.0;
  return {mean_of(diff), se};
}

RateFit fit_rate(const RiskReport& report, Method method, double smoothness_s) {
  std::vector<double> xs, ys;
  for (const auto& c : report.cells) {
    if (c.method != method) continue;
    const double n = static_cast<double>(c.n);
    xs.push_back(method == Method::Block ? std::log(n) : std::log(n / std::log(n)));
    ys.push_back(std::log(c.mean_mse));
  }
  if (xs.size() < 3) {
    throw Error(ErrorCode::InvalidConfig, "rate fit needs at least 3 sample sizes");
  }
  const double k = static_cast<double>(xs.size());
  const double mx = mean_of(xs);
  const double my = mean_of(ys);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - intercept - slope * xs[i];
    rss += r * r;
  }
  const double slope_se = std::sqrt(rss / (k - 2.0) / sxx);
  return RateFit{method, slope, intercept, slope_se,
                 -2.0 * smoothness_s / (2.0 * smoothness_s + 1.0),
                 method == Method::Block ? "log(n)" : "log(n/log n)"};
}

std::vector<RateFit> empirical_rate(const ExperimentConfig& config) {
  if (config.n_values.size() < 4 ||
      !std::is_sorted(config.n_values.begin(), config.n_values.end(),
                      [](std::size_t a, std::size_t b) { return a <= b; })) {
    throw Error(ErrorCode::InvalidConfig,
                "rate estimation needs at least 4 strictly increasing sample sizes");
  }
  const RiskReport report = run_risk_experiment(config);
  std::vector<RateFit> fits;
  for (Method m : config.methods) fits.push_back(fit_rate(report, m, config.denoise.smoothness_s));
  return fits;
}

}  // namespace nsdwav
