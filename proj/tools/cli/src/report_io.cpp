#include "nsdwav_cli/report_io.hpp"

#include <json.hpp>

#include "nsdwav_cli/csv.hpp"

namespace nsdwav::cli {

std::string risk_csv(const std::vector<RiskReport>& reports) {
  std::string out = "signal,method,n,mean_mse,sd_mse,replicates,seed\n";
  for (const auto& report : reports) {
    for (const auto& c : report.cells) {
      out += report.signal + "," + method_label(c.method) + "," + std::to_string(c.n) + "," +
             format_double(c.mean_mse) + "," + format_double(c.sd_mse) + "," +
             std::to_string(c.replicates) + "," + std::to_string(report.master_seed) + "\n";
    }
  }
  return out;
}

std::string risk_jsonl(const std::vector<RiskReport>& reports) {
  std::string out;
  for (const auto& report : reports) {
    for (const auto& c : report.cells) {
      nlohmann::ordered_json record;
      record["signal"] = report.signal;
      record["basis"] = report.basis;
      record["noise"] = report.noise;
      record["snr"] = report.snr;
      record["method"] = method_label(c.method);
      record["n"] = c.n;
      record["mean_mse"] = c.mean_mse;
      record["sd_mse"] = c.sd_mse;
      record["replicates"] = c.replicates;
      record["mean_threshold"] = c.mean_threshold;
      record["mean_sigma_sq"] = c.mean_sigma_sq;
      record["noise_sigma"] = c.noise_sigma;
      record["seed"] = report.master_seed;
      out += record.dump() + "\n";
    }
  }
  return out;
}

std::string rates_csv(const std::vector<SignalRates>& rates) {
  std::string out = "signal,method,covariate,slope,slope_se,intercept,target\n";
  for (const auto& r : rates) {
    for (const auto& f : r.fits) {
      out += r.signal + "," + method_label(f.method) + "," + f.covariate + "," +
             format_double(f.slope) + "," + format_double(f.slope_se) + "," +
             format_double(f.intercept) + "," + format_double(f.target) + "\n";
    }
  }
  return out;
}

std::string noise_jsonl(const std::string& model, const SupermodularReport& supermodular,
                        const CovDecayProfile& profile, double profile_tolerance_se,
                        const WeightedVarianceReport& weighted) {
  std::string out;
  for (const auto& e : supermodular.entries) {
    nlohmann::ordered_json r;
    r["check"] = "supermodular";
    r["model"] = model;
    r["function"] = e.function;
    r["dependent_mean"] = e.dependent_mean;
    r["independent_mean"] = e.independent_mean;
    r["difference"] = e.difference;
    r["std_error"] = e.std_error;
    r["pass"] = e.pass;
    out += r.dump() + "\n";
  }
  for (std::size_t u = 0; u < profile.v_hat.size(); ++u) {
    nlohmann::ordered_json r;
    r["check"] = "cov_decay";
    r["model"] = model;
    r["u"] = u + 1;
    r["v_hat"] = profile.v_hat[u];
    r["std_error"] = profile.std_error[u];
    if (u >= 1) {
      r["pass"] = std::abs(profile.v_hat[u]) <= profile_tolerance_se * profile.std_error[u];
    }
    out += r.dump() + "\n";
  }
  nlohmann::ordered_json r;
  r["check"] = "weighted_variance";
  r["model"] = model;
  r["variance_estimate"] = weighted.variance_estimate;
  r["bound"] = weighted.bound;
  r["weight_norm_sq"] = weighted.weight_norm_sq;
  r["std_error"] = weighted.std_error;
  r["pass"] = weighted.pass;
  out += r.dump() + "\n";
  return out;
}

}  // namespace nsdwav::cli
