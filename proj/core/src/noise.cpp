#include "nsdwav/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nsdwav/error.hpp"

namespace nsdwav {

namespace {

std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct RunningMoments {
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t count = 0;

  void add(double x) noexcept {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  double variance() const noexcept {
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
  }
  double std_error() const noexcept {
    return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix_finalize(splitmix_finalize(seed + 0x9e3779b97f4a7c15ULL) ^
                           (index * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

StreamEngine::result_type StreamEngine::operator()() noexcept {
  state_ += 0x9e3779b97f4a7c15ULL;
  return splitmix_finalize(state_);
}

NoiseModel::NoiseModel(Variant variant) : variant_(variant) {
  if (const auto* iid = std::get_if<IidGaussian>(&variant_)) {
    if (!(iid->sigma >= 0.0) || !std::isfinite(iid->sigma)) {
      throw Error(ErrorCode::InvalidConfig, "iid noise sigma must be nonnegative");
    }
    return;
  }
  const auto& pair = std::get<NsdPairMixture>(variant_);
  if (!(pair.rho0 > -1.0 && pair.rho0 < 0.0)) {
    std::ostringstream msg;
    msg << "rho0 must satisfy -1 < rho0 < 0 for negatively dependent pairs, got " << pair.rho0;
    throw Error(ErrorCode::InvalidRho, msg.str());
  }
  if (!(pair.sigma1_sq > 0.0) || !(pair.sigma2_sq > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "pair variances must be positive");
  }
}

double NoiseModel::population_sigma_sq() const noexcept {
  if (const auto* iid = std::get_if<IidGaussian>(&variant_)) return iid->sigma * iid->sigma;
  const auto& pair = std::get<NsdPairMixture>(variant_);
  return pair.standardize ? 1.0 : 0.5 * (pair.sigma1_sq + pair.sigma2_sq);
}

double NoiseModel::marginal_variance(std::size_t m) const noexcept {
  if (const auto* iid = std::get_if<IidGaussian>(&variant_)) return iid->sigma * iid->sigma;
  const auto& pair = std::get<NsdPairMixture>(variant_);
  if (pair.standardize) return 1.0;
  return m % 2 == 0 ? pair.sigma1_sq : pair.sigma2_sq;
}

double NoiseModel::within_pair_covariance() const noexcept {
  if (std::holds_alternative<IidGaussian>(variant_)) return 0.0;
  const auto& pair = std::get<NsdPairMixture>(variant_);
  return pair.standardize ? pair.rho0
                          : pair.rho0 * std::sqrt(pair.sigma1_sq) * std::sqrt(pair.sigma2_sq);
}

std::string NoiseModel::describe() const {
  std::ostringstream out;
  out.precision(17);
  if (const auto* iid = std::get_if<IidGaussian>(&variant_)) {
    out << "iid_gaussian(sigma=" << iid->sigma << ")";
  } else {
    const auto& pair = std::get<NsdPairMixture>(variant_);
    out << "nsd_pair_mixture(rho0=" << pair.rho0 << ", sigma1_sq=" << pair.sigma1_sq
        << ", sigma2_sq=" << pair.sigma2_sq << ", standardize=" << (pair.standardize ? 1 : 0)
        << ")";
  }
  return out.str();
}

std::array<double, 2> generate_pair(const NoiseModel& model, std::uint64_t seed,
                                    std::size_t pair_index) {
  StreamEngine engine(derive_seed(seed, pair_index));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double z1 = normal(engine);
  const double z2 = normal(engine);
  if (const auto* iid = std::get_if<IidGaussian>(&model.variant())) {
    return {iid->sigma * z1, iid->sigma * z2};
  }
  const auto& pair = std::get<NsdPairMixture>(model.variant());
  const double second = pair.rho0 * z1 + std::sqrt(1.0 - pair.rho0 * pair.rho0) * z2;
  if (pair.standardize) return {z1, second};
  return {std::sqrt(pair.sigma1_sq) * z1, std::sqrt(pair.sigma2_sq) * second};
}

std::vector<double> generate(const NoiseModel& model, std::size_t n, std::uint64_t seed) {
  if (model.is_pair_model() && n % 2 != 0) {
    throw Error(ErrorCode::OddLengthForPairModel,
                "pair model needs an even length, got " + std::to_string(n));
  }
  std::vector<double> out(n);
  for (std::size_t t = 0; 2 * t < n; ++t) {
    const auto pair = generate_pair(model, seed, t);
    out[2 * t] = pair[0];
    if (2 * t + 1 < n) out[2 * t + 1] = pair[1];
  }
  return out;
}

CovDecayProfile cov_decay_profile(const NoiseModel& model, std::size_t u_max, std::size_t n,
                                  std::size_t replicates, std::uint64_t seed) {
  if (u_max < 1 || n < 2 * u_max) {
    throw Error(ErrorCode::InsufficientLength, "covariance profile needs u_max >= 1 and n >= " +
                                                   std::to_string(2 * u_max));
  }
  if (replicates < 4) {
    throw Error(ErrorCode::InsufficientLength, "covariance profile needs at least 4 replicates");
  }
  const std::size_t max_lag = n / 2;
  std::vector<std::vector<double>> draws(replicates);
  for (std::size_t r = 0; r < replicates; ++r) draws[r] = generate(model, n, derive_seed(seed, r));

  const std::size_t half = replicates / 2;
  // cov[h][k] holds the product mean for the pair (k, k+h), lag h in 1..max_lag.
  auto mean_products = [&](std::size_t begin, std::size_t end) {
    std::vector<std::vector<double>> cov(max_lag + 1);
    for (std::size_t h = 1; h <= max_lag; ++h) {
      cov[h].assign(n - h, 0.0);
      for (std::size_t r = begin; r < end; ++r) {
        const auto& x = draws[r];
        for (std::size_t k = 0; k + h < n; ++k) cov[h][k] += x[k] * x[k + h];
      }
      for (double& c : cov[h]) c /= static_cast<double>(end - begin);
    }
    return cov;
  };
  const auto cov_first = mean_products(0, half);
  const auto cov_second = mean_products(half, replicates);

  // Each ordered pair (k, m) contributes once; an unordered lag-h pair counts
  // twice, then dividing by n averages over k.
  auto evaluate = [&](const std::vector<std::vector<double>>& signs, std::size_t begin,
                      std::size_t end, std::vector<double>& value, std::vector<double>& se) {
    std::vector<RunningMoments> moments(u_max);
    std::vector<double> per_lag(max_lag + 1);
    for (std::size_t r = begin; r < end; ++r) {
      const auto& x = draws[r];
      for (std::size_t h = 1; h <= max_lag; ++h) {
        double z = 0.0;
        for (std::size_t k = 0; k + h < n; ++k) {
          const double s = signs[h][k] > 0.0 ? 1.0 : (signs[h][k] < 0.0 ? -1.0 : 0.0);
          z += s * x[k] * x[k + h];
        }
        per_lag[h] = 2.0 * z / static_cast<double>(n);
      }
      double tail = 0.0;
      for (std::size_t h = max_lag; h >= 1; --h) {
        tail += per_lag[h];
        if (h <= u_max) moments[h - 1].add(tail);
      }
    }
    value.resize(u_max);
    se.resize(u_max);
    for (std::size_t u = 0; u < u_max; ++u) {
      value[u] = moments[u].mean;
      se[u] = moments[u].std_error();
    }
  };
  std::vector<double> v_a, se_a, v_b, se_b;
  evaluate(cov_first, half, replicates, v_a, se_a);
  evaluate(cov_second, 0, half, v_b, se_b);

  CovDecayProfile profile;
  profile.v_hat.resize(u_max);
  profile.std_error.resize(u_max);
  for (std::size_t u = 0; u < u_max; ++u) {
    profile.v_hat[u] = 0.5 * (v_a[u] + v_b[u]);
    // The two halves share data, so average the errors rather than pooling.
    profile.std_error[u] = 0.5 * (se_a[u] + se_b[u]);
  }
  return profile;
}

bool SupermodularReport::all_pass() const noexcept {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
}

namespace {

constexpr std::array<const char*, 3> kBatteryNames = {"pair_max_product", "exp_mean",
                                                      "pair_product"};

std::array<double, 3> evaluate_battery(std::span<const double> x) {
  const std::size_t pairs = x.size() / 2;
  double max_product = 0.0;
  double product = 0.0;
  for (std::size_t t = 0; t < pairs; ++t) {
    max_product += std::max(x[2 * t], 0.1) * std::max(x[2 * t + 1], 0.1);
    product += x[2 * t] * x[2 * t + 1];
  }
  double clipped_sum = 0.0;
  for (double v : x) clipped_sum += std::clamp(v, -5.0, 5.0);
  const double p = static_cast<double>(std::max<std::size_t>(pairs, 1));
  return {max_product / p, std::exp(clipped_sum / static_cast<double>(x.size())), product / p};
}

}  // namespace

SupermodularReport supermodular_check(const NoiseModel& model, std::size_t n,
                                      std::size_t replicates, std::uint64_t seed) {
  if (n < 2 || n % 2 != 0) {
    throw Error(ErrorCode::OddLengthForPairModel,
                "supermodular battery needs an even length >= 2, got " + std::to_string(n));
  }
  const std::uint64_t independent_seed = derive_seed(seed, 0xa5a5a5a5ULL);
  std::array<RunningMoments, 3> dependent{};
  std::array<RunningMoments, 3> independent{};
  std::vector<double> copy(n);
  for (std::size_t r = 0; r < replicates; ++r) {
    const auto x = generate(model, n, derive_seed(seed, r));
    // Coordinate m of X* comes from its own independent draw of pair m/2.
    for (std::size_t m = 0; m < n; ++m) {
      const auto pair = generate_pair(model, derive_seed(independent_seed, r * n + m), m / 2);
      copy[m] = pair[m % 2];
    }
    const auto phi = evaluate_battery(x);
    const auto phi_star = evaluate_battery(copy);
    for (std::size_t f = 0; f < 3; ++f) {
      dependent[f].add(phi[f]);
      independent[f].add(phi_star[f]);
    }
  }
  SupermodularReport report;
  for (std::size_t f = 0; f < 3; ++f) {
    const double diff = dependent[f].mean - independent[f].mean;
    const double se = std::hypot(dependent[f].std_error(), independent[f].std_error());
    report.entries.push_back({kBatteryNames[f], dependent[f].mean, independent[f].mean, diff, se,
                              diff <= 3.0 * se});
  }
  return report;
}

WeightedVarianceReport weighted_variance_check(const NoiseModel& model,
                                               std::span<const double> weights,
                                               std::size_t replicates, std::uint64_t seed) {
  if (weights.empty() || (model.is_pair_model() && weights.size() % 2 != 0)) {
    throw Error(ErrorCode::LengthMismatch,
                "weights must be nonempty and even-length under the pair model");
  }
  if (replicates < 2) {
    throw Error(ErrorCode::InsufficientLength, "variance check needs at least 2 replicates");
  }
  std::vector<double> sums(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    const auto eps = generate(model, weights.size(), derive_seed(seed, r));
    double s = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m) s += weights[m] * eps[m];
    sums[r] = s;
  }
  RunningMoments level;
  for (double s : sums) level.add(s);
  RunningMoments squares;
  for (double s : sums) squares.add((s - level.mean) * (s - level.mean));
  double c0 = 0.0;
  for (double a : weights) c0 += a * a;
  WeightedVarianceReport report{};
  report.variance_estimate = level.variance();
  report.weight_norm_sq = c0;
  report.bound = c0 * model.population_sigma_sq();
  report.std_error = squares.std_error();
  report.pass = report.variance_estimate <= report.bound + 3.0 * report.std_error;
  return report;
}

}  // namespace nsdwav
