#pragma once

#include <string>
#include <vector>

#include "nsdwav/experiment.hpp"
#include "nsdwav/noise.hpp"

namespace nsdwav::cli {

// Columns: signal,method,n,mean_mse,sd_mse,replicates,seed
std::string risk_csv(const std::vector<RiskReport>& reports);
// One JSON object per (signal, method, n), field names matching RiskReport.
std::string risk_jsonl(const std::vector<RiskReport>& reports);

struct SignalRates {
  std::string signal;
  std::vector<RateFit> fits;
};
// Columns: signal,method,covariate,slope,slope_se,intercept,target
std::string rates_csv(const std::vector<SignalRates>& rates);

std::string noise_jsonl(const std::string& model, const SupermodularReport& supermodular,
                        const CovDecayProfile& profile, double profile_tolerance_se,
                        const WeightedVarianceReport& weighted);

}  // namespace nsdwav::cli
