#include "nsdwav_cli/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "nsdwav/error.hpp"
#include "nsdwav/estimators.hpp"
#include "nsdwav/experiment.hpp"
#include "nsdwav/noise.hpp"
#include "nsdwav/signals.hpp"
#include "nsdwav_cli/bench_config.hpp"
#include "nsdwav_cli/csv.hpp"
#include "nsdwav_cli/key_value.hpp"
#include "nsdwav_cli/report_io.hpp"
#include "nsdwav_cli/svg.hpp"

#ifndef NSDWAV_VERSION
#define NSDWAV_VERSION "unknown"
#endif

namespace nsdwav::cli {

namespace {

namespace fs = std::filesystem;

// Check failures in noisecheck reuse the data-error status.
constexpr int kChecksFailed = kData;

struct OptionSpec {
  std::string key;       // manifest key; the flag is --key with '_' -> '-'
  std::string fallback;  // empty: no default
  std::string help;
};

// One subcommand's string-valued options. Resolution order for each key:
// explicit flag, then manifest, then default.
class OptionSet {
 public:
  OptionSet(CLI::App* app, std::string command, std::vector<OptionSpec> specs)
      : app_(app), command_(std::move(command)), specs_(std::move(specs)) {
    for (const auto& spec : specs_) {
      std::string flag = "--" + spec.key;
      for (char& c : flag) c = c == '_' ? '-' : c;
      std::string help = spec.help;
      if (!spec.fallback.empty()) help += " (default " + spec.fallback + ")";
      options_[spec.key] = app_->add_option(flag, values_[spec.key], help);
    }
    app_->add_option("--manifest", manifest_path_, "Replay a manifest written by an earlier run");
  }

  bool explicit_flag(const std::string& key) const { return options_.at(key)->count() > 0; }
  const std::string& flag_value(const std::string& key) const { return values_.at(key); }
  bool has_manifest() const { return !manifest_path_.empty(); }

  KeyValues manifest() const {
    if (!has_manifest()) return {};
    KeyValues kv = KeyValues::load(manifest_path_);
    const auto command = kv.get("command");
    if (command && *command != command_) {
      throw ConfigError(kv.line_of("command"), "command",
                        "manifest was written by '" + *command + "', not '" + command_ + "'");
    }
    for (const char* meta : {"command", "version", "timestamp"}) kv.erase(meta);
    return kv;
  }

  // Resolves every declared key; `extra` names further keys the manifest may carry.
  KeyValues resolve(const std::vector<std::string>& extra = {}) const {
    const KeyValues from_manifest = manifest();
    std::vector<std::string> allowed = extra;
    for (const auto& spec : specs_) allowed.push_back(spec.key);
    from_manifest.require_known(allowed);
    KeyValues resolved = from_manifest;
    for (const auto& spec : specs_) {
      if (explicit_flag(spec.key)) {
        resolved.set(spec.key, values_.at(spec.key));
      } else if (!resolved.contains(spec.key) && !spec.fallback.empty()) {
        resolved.set(spec.key, spec.fallback);
      }
    }
    return resolved;
  }

 private:
  CLI::App* app_;
  std::string command_;
  std::vector<OptionSpec> specs_;
  std::map<std::string, std::string> values_;
  std::map<std::string, CLI::Option*> options_;
  std::string manifest_path_;
};

std::string require(const KeyValues& kv, const std::string& key) {
  auto value = kv.get(key);
  if (!value || value->empty()) {
    std::string flag = "--" + key;
    for (char& c : flag) c = c == '_' ? '-' : c;
    throw ConfigError(0, key, "missing required option " + flag);
  }
  return *value;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_manifest(const std::string& path, const std::string& command, KeyValues resolved) {
  resolved.set("command", command);
  resolved.set("version", NSDWAV_VERSION);
  resolved.set("timestamp", utc_timestamp());
  write_text_file(path, "# nsdwav run manifest; replay with --manifest\n" + resolved.serialize());
}

std::string fixed(double v, int digits) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::setprecision(digits) << v;
  return out.str();
}

unsigned threads_from_env() {
  const char* text = std::getenv("NSDWAV_THREADS");
  if (text == nullptr || *text == '\0') return 1;
  KeyValues kv;
  kv.set("NSDWAV_THREADS", text);
  const long long threads = kv.get_int("NSDWAV_THREADS");
  if (threads < 0) throw ConfigError(0, "NSDWAV_THREADS", "must be >= 0");
  return static_cast<unsigned>(threads);
}

DenoiseConfig denoise_config_from(const KeyValues& kv) {
  DenoiseConfig config;
  config.method = parse_method(require(kv, "method"));
  config.smoothness_s = kv.get_double("s");
  const std::string estimator = require(kv, "sigma_estimator");
  if (estimator == "local") {
    config.sigma_estimator = SigmaEstimator::LocalBlock;
  } else if (estimator == "first_difference") {
    config.sigma_estimator = SigmaEstimator::FirstDifference;
  } else {
    throw ConfigError(0, "sigma_estimator", "expected local or first_difference, got '" + estimator + "'");
  }
  if (kv.contains("threshold")) config.threshold_override = kv.get_double("threshold");
  if (kv.contains("coarse_level")) config.coarse_level_override = static_cast<int>(kv.get_int("coarse_level"));
  return config;
}

std::vector<double> design_grid(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t m = 1; m <= n; ++m) x[m - 1] = static_cast<double>(m) / static_cast<double>(n);
  return x;
}

// ---- denoise ----

struct DenoiseCommand {
  explicit DenoiseCommand(CLI::App& parent)
      : app(parent.add_subcommand("denoise", "Denoise a two-column (x, y) CSV")),
        options(app, "denoise",
                {{"in", "", "Input CSV with header x,y"},
                 {"out", "", "Output CSV (x,fitted); the manifest goes to <out>.manifest"},
                 {"method", "block", "term or block"},
                 {"wavelet", "coif3", "haar, dbK or coifK"},
                 {"s", "2", "Smoothness used for the coarse level"},
                 {"sigma_estimator", "local", "local or first_difference (block only)"},
                 {"threshold", "", "Absolute threshold (lambda0 for term, lambda^2 for block)"},
                 {"coarse_level", "", "Override the coarse level"},
                 {"truth", "", "CSV with the true signal; prints the MSE"}}) {}

  int execute(std::ostream& out) const {
    const KeyValues kv = options.resolve();
    const std::string in_path = require(kv, "in");
    const std::string out_path = require(kv, "out");
    const WaveletBasis basis = parse_basis(require(kv, "wavelet"));
    const DenoiseConfig config = denoise_config_from(kv);

    const XYColumns data = read_xy_csv(in_path);
    if (!is_power_of_two(data.y.size()) || data.y.size() < 2) {
      throw DataError(in_path + ": " + std::to_string(data.y.size()) +
                      " samples; the length must be a power of two >= 2");
    }
    const Signal observed(data.y, SignalKind::Observed);
    const DenoiseResult result = denoise(observed, basis, config);
    write_xy_csv(out_path, "fitted", data.x, result.fitted.samples());
    write_manifest(out_path + ".manifest", "denoise", kv);

    out << "method " << method_label(config.method) << ", wavelet " << basis.name() << ", n "
        << observed.size() << ", coarse level " << result.coarse_level << ", kept "
        << result.kept_detail_count << " detail coefficients\n";
    if (kv.contains("truth")) {
      const std::string truth_path = require(kv, "truth");
      const XYColumns truth = read_xy_csv(truth_path);
      if (truth.y.size() != data.y.size()) {
        throw DataError(truth_path + ": " + std::to_string(truth.y.size()) + " samples, expected " +
                        std::to_string(data.y.size()));
      }
      out << "mse " << format_double(mse(result.fitted.samples(), truth.y)) << "\n";
    }
    return kOk;
  }

  CLI::App* app;
  OptionSet options;
};

// ---- sample ----

struct SampleCommand {
  explicit SampleCommand(CLI::App& parent)
      : app(parent.add_subcommand("sample", "Write a noisy test signal as a two-column CSV")),
        options(app, "sample",
                {{"signal", "spikes", "spikes, corner, sine or polynomial"},
                 {"n", "1024", "Sample size (power of two)"},
                 {"snr", "4", "Signal-to-noise ratio sd(f)/sigma"},
                 {"noise", "nsd", "nsd or iid"},
                 {"rho0", "-0.5", "Within-pair correlation, -1 < rho0 < 0"},
                 {"sigma1sq", "1", "Variance of the first pair member"},
                 {"sigma2sq", "9", "Variance of the second pair member"},
                 {"standardize", "true", "Standardize pair members to unit variance"},
                 {"seed", "1", "Noise seed"},
                 {"out", "", "Output CSV (x,y); the manifest goes to <out>.manifest"},
                 {"truth_out", "", "Also write the noiseless signal here"}}) {}

  int execute(std::ostream& out) const {
    const KeyValues kv = options.resolve();
    const std::string out_path = require(kv, "out");
    const TestFunction fn = parse_test_function(require(kv, "signal"));
    const long long n = kv.get_int("n");
    if (n < 2 || !is_power_of_two(static_cast<std::size_t>(n))) {
      throw ConfigError(0, "n", "sample size must be a power of two >= 2");
    }
    const long long seed = kv.get_int("seed");
    if (seed < 0) throw ConfigError(0, "seed", "must be nonnegative");
    const NoiseModel noise = noise_from(kv);

    const Signal truth = sample(fn, static_cast<std::size_t>(n));
    const double sigma = calibrate_snr(truth, kv.get_double("snr"));
    const Signal observed = noisy_observation(truth, noise, sigma, static_cast<std::uint64_t>(seed));
    const auto x = design_grid(truth.size());
    write_xy_csv(out_path, "y", x, observed.samples());
    if (kv.contains("truth_out")) write_xy_csv(require(kv, "truth_out"), "y", x, truth.samples());
    write_manifest(out_path + ".manifest", "sample", kv);
    out << fn.label() << " n " << n << " noise sd " << format_double(sigma) << "\n";
    return kOk;
  }

  CLI::App* app;
  OptionSet options;
};

// ---- bench ----

void write_plot(const std::string& path, const ExperimentConfig& config, const RiskReport& report) {
  const std::size_t n = config.n_values.front();
  const Signal truth = sample(config.signal, n);
  const double sigma = config.noise_sigma_override ? *config.noise_sigma_override
                                                   : calibrate_snr(truth, config.snr);
  const Signal observed =
      noisy_observation(truth, config.noise, sigma, replicate_seed(config.master_seed, n, 0));
  static const char* kColors[] = {"#c0392b", "#2471a3", "#239b56", "#7d3c98"};

  std::vector<PlotPanel> panels;
  const auto to_vec = [](const Signal& s) { return std::vector<double>(s.samples().begin(), s.samples().end()); };
  panels.push_back({"noisy observation (replicate 0)", {{"y", to_vec(observed), "#555"}}});
  std::vector<std::pair<std::string, double>> bars;
  for (std::size_t k = 0; k < config.methods.size(); ++k) {
    DenoiseConfig dc = config.denoise;
    dc.method = config.methods[k];
    const DenoiseResult result = denoise(observed, config.basis, dc);
    panels.push_back({method_label(dc.method) + " reconstruction",
                      {{"truth", to_vec(truth), "#aaa"},
                       {method_label(dc.method), to_vec(result.fitted), kColors[k % 4]}}});
    bars.emplace_back(method_label(dc.method), report.cell(dc.method, n).mean_mse);
  }
  write_text_file(path, render_svg(report.signal + ", n = " + std::to_string(n), design_grid(n),
                                   panels, bars));
}

struct BenchCommand {
  explicit BenchCommand(CLI::App& parent)
      : app(parent.add_subcommand("bench", "Run a Monte Carlo risk experiment from a config file")),
        options(app, "bench",
                {{"out", ".", "Output directory"},
                 {"replicates", "", "Override the config's replicate count"},
                 {"seed", "", "Override the config's master seed"},
                 {"snr", "", "Override the config's SNR"},
                 {"rho0", "", "Override the config's rho0"},
                 {"sigma1sq", "", "Override the config's sigma1sq"},
                 {"sigma2sq", "", "Override the config's sigma2sq"},
                 {"wavelet", "", "Override the config's wavelet"},
                 {"s", "", "Override the config's smoothness"},
                 {"method", "", "Override the config's method list"},
                 {"n", "", "Override the config's n_values"}}) {
    app->add_option("config", config_path, "Config file (key = value lines)");
    plot_flag = app->add_flag("--plot", "Also write SVG panels per signal");
  }

  int execute(std::ostream& out) const {
    if (config_path.empty() && !options.has_manifest()) {
      throw ConfigError(0, "config", "bench needs a config file or --manifest");
    }
    // Config keys: manifest, overlaid by an explicit config file, overlaid by flags.
    std::vector<std::string> manifest_keys = bench_config_keys();
    for (const char* key : {"out", "plot", "config"}) manifest_keys.push_back(key);
    KeyValues config = options.manifest();
    config.require_known(manifest_keys);
    const std::string out_dir = options.explicit_flag("out") ? options.flag_value("out")
                                                             : config.get_or("out", ".");
    bool plot = plot_flag->count() > 0 || (config.contains("plot") && config.get_bool("plot"));
    std::string source = config.get_or("config", "");
    for (const char* key : {"out", "plot", "config"}) config.erase(key);
    if (!config_path.empty()) {
      source = config_path;
      const KeyValues file = KeyValues::load(config_path);
      file.require_known(bench_config_keys());
      if (options.has_manifest()) {
        for (const auto& [key, value] : file.entries()) config.set(key, value);
      } else {
        config = file;
      }
    }
    static const std::map<std::string, std::string> kFlagKeys = {
        {"replicates", "replicates"}, {"seed", "seed"},         {"snr", "snr"},
        {"rho0", "rho0"},             {"sigma1sq", "sigma1sq"}, {"sigma2sq", "sigma2sq"},
        {"wavelet", "wavelet"},       {"s", "s"},               {"method", "methods"},
        {"n", "n_values"}};
    for (const auto& [flag, key] : kFlagKeys) {
      if (options.explicit_flag(flag)) config.set(key, options.flag_value(flag));
    }

    BenchPlan plan = make_bench_plan(config);
    plan.experiment.threads = threads_from_env();
    fs::create_directories(out_dir);

    std::vector<RiskReport> reports;
    std::vector<SignalRates> rates;
    for (const auto& fn : plan.signals) {
      ExperimentConfig e = plan.experiment;
      e.signal = fn;
      reports.push_back(run_risk_experiment(e));
      if (plan.fit_rates) {
        SignalRates r{fn.label(), {}};
        for (Method m : e.methods) r.fits.push_back(fit_rate(reports.back(), m, e.denoise.smoothness_s));
        rates.push_back(std::move(r));
      }
      if (plot) write_plot((fs::path(out_dir) / ("plot_" + fn.label() + ".svg")).string(), e, reports.back());
    }

    write_text_file((fs::path(out_dir) / "risk.csv").string(), risk_csv(reports));
    write_text_file((fs::path(out_dir) / "risk.jsonl").string(), risk_jsonl(reports));
    if (plan.fit_rates) write_text_file((fs::path(out_dir) / "rates.csv").string(), rates_csv(rates));
    KeyValues manifest = plan.resolved;
    manifest.set("out", out_dir);
    manifest.set("plot", plot ? "true" : "false");
    if (!source.empty()) manifest.set("config", source);
    write_manifest((fs::path(out_dir) / "manifest.txt").string(), "bench", manifest);

    out << "signal      method  n        mean_mse      sd_mse\n";
    for (const auto& report : reports) {
      for (const auto& c : report.cells) {
        out << std::left << std::setw(12) << report.signal << std::setw(8) << method_label(c.method)
            << std::setw(9) << c.n << std::setw(14) << fixed(c.mean_mse, 6) << fixed(c.sd_mse, 6)
            << "\n";
      }
    }
    if (plan.fit_rates) {
      out << "\nsignal      method  slope     se        target\n";
      for (const auto& r : rates) {
        for (const auto& f : r.fits) {
          out << std::left << std::setw(12) << r.signal << std::setw(8) << method_label(f.method)
              << std::setw(10) << fixed(f.slope, 4) << std::setw(10) << fixed(f.slope_se, 3)
              << fixed(f.target, 4) << "  (vs " << f.covariate << ")\n";
        }
      }
    }
    return kOk;
  }

  CLI::App* app;
  OptionSet options;
  std::string config_path;
  CLI::Option* plot_flag = nullptr;
};

// ---- noisecheck ----

struct NoiseCheckCommand {
  explicit NoiseCheckCommand(CLI::App& parent)
      : app(parent.add_subcommand("noisecheck", "Monte Carlo checks of the noise model")),
        options(app, "noisecheck",
                {{"noise", "nsd", "nsd or iid"},
                 {"rho0", "-0.5", "Within-pair correlation, -1 < rho0 < 0"},
                 {"sigma1sq", "1", "Variance of the first pair member"},
                 {"sigma2sq", "9", "Variance of the second pair member"},
                 {"standardize", "true", "Standardize pair members to unit variance"},
                 {"n", "1024", "Sequence length for the dominance and weighted-sum checks"},
                 {"replicates", "20000", "Monte Carlo replicates per check"},
                 {"seed", "1", "Master seed"},
                 {"umax", "8", "Largest lag of the covariance-decay table"},
                 {"out", "", "Directory for noisecheck.jsonl and manifest.txt"}}) {}

  int execute(std::ostream& out) const {
    const KeyValues kv = options.resolve();
    const NoiseModel model = noise_from(kv);  // rejects rho0 >= 0 before any work
    const long long n = kv.get_int("n");
    const long long replicates = kv.get_int("replicates");
    const long long umax = kv.get_int("umax");
    const long long seed = kv.get_int("seed");
    if (n < 2 || n % 2 != 0) throw ConfigError(0, "n", "must be even and >= 2");
    if (replicates < 10) throw ConfigError(0, "replicates", "must be >= 10");
    if (umax < 1) throw ConfigError(0, "umax", "must be >= 1");
    if (seed < 0) throw ConfigError(0, "seed", "must be nonnegative");
    const auto master = static_cast<std::uint64_t>(seed);
    const auto reps = static_cast<std::size_t>(replicates);

    const SupermodularReport dominance =
        supermodular_check(model, static_cast<std::size_t>(n), reps, derive_seed(master, 1));
    // Lags beyond one pair are what matter, so a short sequence is enough.
    const std::size_t cov_n = std::max<std::size_t>(64, 4 * static_cast<std::size_t>(umax));
    const CovDecayProfile profile =
        cov_decay_profile(model, static_cast<std::size_t>(umax), cov_n, reps, derive_seed(master, 2));
    const std::vector<double> weights(static_cast<std::size_t>(n),
                                      1.0 / std::sqrt(static_cast<double>(n)));
    const WeightedVarianceReport weighted =
        weighted_variance_check(model, weights, reps, derive_seed(master, 3));

    constexpr double kTolerance = 3.0;
    bool all_pass = dominance.all_pass() && weighted.pass;
    out << "model: " << model.describe() << "\n\n";
    out << "check                       estimate      reference     se          result\n";
    const auto row = [&](const std::string& name, double estimate, double reference, double se,
                         bool pass) {
      out << std::left << std::setw(28) << name << std::setw(14) << fixed(estimate, 6)
          << std::setw(14) << fixed(reference, 6) << std::setw(12) << fixed(se, 3)
          << (pass ? "PASS" : "FAIL") << "\n";
    };
    for (const auto& e : dominance.entries) {
      row("dominance " + e.function, e.dependent_mean, e.independent_mean, e.std_error, e.pass);
    }
    const double lag1 = std::abs(model.within_pair_covariance());
    const bool lag1_pass = std::abs(profile.v_hat[0] - lag1) <= kTolerance * profile.std_error[0];
    all_pass = all_pass && lag1_pass;
    row("cov decay v(1)", profile.v_hat[0], lag1, profile.std_error[0], lag1_pass);
    for (std::size_t u = 1; u < profile.v_hat.size(); ++u) {
      const bool pass = std::abs(profile.v_hat[u]) <= kTolerance * profile.std_error[u];
      all_pass = all_pass && pass;
      row("cov decay v(" + std::to_string(u + 1) + ")", profile.v_hat[u], 0.0, profile.std_error[u], pass);
    }
    row("weighted variance", weighted.variance_estimate, weighted.bound, weighted.std_error,
        weighted.pass);
    out << "\n" << (all_pass ? "all checks passed" : "some checks FAILED") << "\n";

    if (kv.contains("out")) {
      const std::string dir = require(kv, "out");
      fs::create_directories(dir);
      write_text_file((fs::path(dir) / "noisecheck.jsonl").string(),
                      noise_jsonl(model.describe(), dominance, profile, kTolerance, weighted));
      write_manifest((fs::path(dir) / "manifest.txt").string(), "noisecheck", kv);
    }
    return all_pass ? kOk : kChecksFailed;
  }

  CLI::App* app;
  OptionSet options;
};

int usage_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedOrder:
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidRho:
      return kUsage;
    default:
      return kData;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wavelet denoising for regression with negatively dependent noise", "nsdwav"};
  app.set_version_flag("--version", NSDWAV_VERSION);
  app.require_subcommand(1);
  DenoiseCommand denoise_cmd(app);
  SampleCommand sample_cmd(app);
  BenchCommand bench_cmd(app);
  NoiseCheckCommand noisecheck_cmd(app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out, help_err;
    const int code = app.exit(e, help_out, help_err);
    out << help_out.str();
    err << help_err.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (denoise_cmd.app->parsed()) return denoise_cmd.execute(out);
    if (sample_cmd.app->parsed()) return sample_cmd.execute(out);
    if (bench_cmd.app->parsed()) return bench_cmd.execute(out);
    if (noisecheck_cmd.app->parsed()) return noisecheck_cmd.execute(out);
    err << "nsdwav: no command given\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "nsdwav: config error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "nsdwav: data error: " << e.what() << "\n";
    return kData;
  } catch (const Error& e) {
    err << "nsdwav: " << e.what() << "\n";
    return usage_code(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "nsdwav: data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    err << "nsdwav: internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace nsdwav::cli
