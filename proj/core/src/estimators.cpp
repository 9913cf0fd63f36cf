#include "nsdwav/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsdwav/error.hpp"

namespace nsdwav {

void DenoiseConfig::validate(int finest_level) const {
  if (!(smoothness_s > 0.0) || !std::isfinite(smoothness_s)) {
    throw Error(ErrorCode::InvalidConfig, "smoothness s must be positive");
  }
  if (threshold_override && !(*threshold_override > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "threshold override must be positive");
  }
  if (coarse_level_override &&
      (*coarse_level_override < 0 || *coarse_level_override > finest_level)) {
    throw Error(ErrorCode::InvalidConfig, "coarse level override " +
                                              std::to_string(*coarse_level_override) +
                                              " outside [0, " + std::to_string(finest_level) +
                                              "]");
  }
}

CoefficientTree empirical_tree(const Signal& observed, const WaveletBasis& basis,
                               int coarse_level) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(observed.size()));
  std::vector<double> scaled(observed.samples().begin(), observed.samples().end());
  for (double& y : scaled) y *= scale;
  return dwt(scaled, basis, coarse_level);
}

double sigma_hat_first_difference(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::SignalTooShort, "first-difference variance needs n >= 2");
  }
  double sum = 0.0;
  for (std::size_t m = 0; m + 1 < samples.size(); ++m) {
    const double diff = samples[m + 1] - samples[m];
    sum += diff * diff;
  }
  return sum / (2.0 * static_cast<double>(samples.size() - 1));
}

double sigma_hat_first_difference(const Signal& observed) {
  return sigma_hat_first_difference(observed.samples());
}

std::size_t local_window_width(std::size_t n, int level) {
  const std::size_t per_coefficient = n >> level;
  return std::clamp<std::size_t>(std::max<std::size_t>(16, per_coefficient), 1, n);
}

namespace {

std::size_t block_count(int level, std::size_t block_length) {
  const std::size_t width = std::size_t{1} << level;
  return (width + block_length - 1) / block_length;
}

void check_block(std::size_t n, int level, std::size_t block_index, std::size_t block_length) {
  const int finest = log2_exact(n);
  if (level < 0 || level >= finest) {
    throw Error(ErrorCode::BlockOutOfRange, "level " + std::to_string(level) +
                                                " is not a detail level of a length-" +
                                                std::to_string(n) + " signal");
  }
  if (block_length == 0 || block_index >= block_count(level, block_length)) {
    throw Error(ErrorCode::BlockOutOfRange, "block " + std::to_string(block_index) +
                                                " does not exist at level " +
                                                std::to_string(level));
  }
}

}  // namespace

std::size_t block_design_point(std::size_t n, int level, std::size_t block_index,
                               std::size_t block_length) {
  check_block(n, level, block_index, block_length);
  const std::size_t width = std::size_t{1} << level;
  const std::size_t first = block_index * block_length;
  const std::size_t last = std::min(first + block_length, width);
  // Block covers [first, last) / 2^level on [0, 1); its midpoint times n,
  // rounded half up, is the nearest 1-based design point.
  const std::size_t numerator = (first + last) * n;
  const std::size_t denominator = std::size_t{2} << level;
  std::size_t m = (numerator + denominator / 2) / denominator;
  if (m == 0) m = n;
  return m;
}

double sigma_hat_local(const Signal& observed, int level, std::size_t block_index,
                       std::size_t block_length) {
  const std::size_t n = observed.size();
  const std::size_t m = block_design_point(n, level, block_index, block_length);
  const std::size_t w = local_window_width(n, level);
  if (w < 2) return 0.0;
  const auto y = observed.samples();
  const std::size_t start = (m - 1 + n - (w / 2) % n) % n;
  double sum = 0.0;
  for (std::size_t t = 0; t + 1 < w; ++t) {
    const double diff = y[(start + t + 1) % n] - y[(start + t) % n];
    sum += diff * diff;
  }
  return sum / (2.0 * static_cast<double>(w - 1));
}

double universal_threshold(double sigma_sq, std::size_t n) {
  const double nd = static_cast<double>(n);
  return std::sqrt(2.0 * sigma_sq * std::log(nd) / nd);
}

int term_level_cutoff(std::size_t n) {
  const int finest = log2_exact(n);
  const double target = std::log2(static_cast<double>(n) / std::log(static_cast<double>(n)));
  const int cutoff = static_cast<int>(std::ceil(target));
  return std::clamp(cutoff, 0, finest);
}

int block_coarse_level(std::size_t n, double s) {
  const int finest = log2_exact(n);
  // log2(n^{1/(2s+1)}) = i_2 / (2s+1); exact at integer quotients.
  const double target = static_cast<double>(finest) / (2.0 * s + 1.0);
  const int level = static_cast<int>(std::ceil(target - 1e-12));
  return std::clamp(level, 0, finest);
}

std::size_t block_length(std::size_t n) {
  const double rounded = std::round(std::log(static_cast<double>(n)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(rounded));
}

CoefficientTree term_threshold_apply(const CoefficientTree& tree, double lambda0, int cutoff) {
  CoefficientTree out = tree;
  for (int level = out.coarse_level(); level < out.finest_level(); ++level) {
    auto detail = out.detail(level);
    if (level > cutoff) {
      std::fill(detail.begin(), detail.end(), 0.0);
      continue;
    }
    for (double& beta : detail) {
      if (!(std::abs(beta) > lambda0)) beta = 0.0;
    }
  }
  return out;
}

std::vector<Block> block_partition(int level, std::size_t block_length) {
  if (block_length == 0) {
    throw Error(ErrorCode::InvalidConfig, "block length must be positive");
  }
  const std::size_t width = std::size_t{1} << level;
  std::vector<Block> blocks;
  blocks.reserve(block_count(level, block_length));
  for (std::size_t first = 0; first < width; first += block_length) {
    blocks.push_back({first, std::min(first + block_length, width)});
  }
  return blocks;
}

double block_energy(const CoefficientTree& tree, int level, const Block& block,
                    std::size_t block_length) {
  const auto detail = tree.detail(level);
  if (block.first >= block.last || block.last > detail.size() || block_length == 0) {
    throw Error(ErrorCode::BlockOutOfRange, "block [" + std::to_string(block.first) + ", " +
                                                std::to_string(block.last) +
                                                ") is not inside level " + std::to_string(level));
  }
  double sum = 0.0;
  for (std::size_t j = block.first; j < block.last; ++j) sum += detail[j] * detail[j];
  return sum / static_cast<double>(block_length);
}

CoefficientTree block_threshold_apply(const CoefficientTree& tree,
                                      const BlockThreshold& lambda_sq_of_block,
                                      std::size_t block_length) {
  CoefficientTree out = tree;
  for (int level = out.coarse_level(); level < out.finest_level(); ++level) {
    const auto blocks = block_partition(level, block_length);
    auto detail = out.detail(level);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const double energy = block_energy(tree, level, blocks[k], block_length);
      if (energy > lambda_sq_of_block(level, k)) continue;
      std::fill(detail.begin() + static_cast<std::ptrdiff_t>(blocks[k].first),
                detail.begin() + static_cast<std::ptrdiff_t>(blocks[k].last), 0.0);
    }
  }
  return out;
}

namespace {

// Inverse of empirical_tree: synthesis followed by the sqrt(n) rescale.
Signal reconstruct(const CoefficientTree& tree, const WaveletBasis& basis) {
  auto samples = idwt_samples(tree, basis);
  const double scale = std::sqrt(static_cast<double>(samples.size()));
  for (double& v : samples) v *= scale;
  return Signal(std::move(samples), SignalKind::Fitted);
}

std::size_t count_nonzero_details(const CoefficientTree& tree) {
  std::size_t count = 0;
  for (int level = tree.coarse_level(); level < tree.finest_level(); ++level) {
    for (double beta : tree.detail(level)) count += (beta != 0.0);
  }
  return count;
}

}  // namespace

DenoiseResult denoise(const Signal& observed, const WaveletBasis& basis,
                      const DenoiseConfig& config) {
  const std::size_t n = observed.size();
  const int finest = observed.finest_level();
  config.validate(finest);
  const int coarse = config.coarse_level_override.value_or(block_coarse_level(n, config.smoothness_s));
  const double sigma_sq = sigma_hat_first_difference(observed);
  CoefficientTree raw = empirical_tree(observed, basis, coarse);

  if (config.method == Method::TermByTerm) {
    const double lambda0 = config.threshold_override.value_or(universal_threshold(sigma_sq, n));
    const int cutoff = term_level_cutoff(n);
    CoefficientTree kept = term_threshold_apply(raw, lambda0, cutoff);
    Signal fitted = reconstruct(kept, basis);
    const std::size_t kept_count = count_nonzero_details(kept);
    return DenoiseResult{std::move(fitted), std::move(raw), std::move(kept), lambda0, coarse,
                         cutoff, sigma_sq, kept_count};
  }

  const std::size_t l = block_length(n);
  const double nd = static_cast<double>(n);
  // Thresholds are computed once per block so the callback stays a cheap lookup.
  std::vector<std::vector<double>> lambda_sq(static_cast<std::size_t>(finest - coarse));
  double lambda_sq_total = 0.0;
  std::size_t block_total = 0;
  for (int level = coarse; level < finest; ++level) {
    auto& row = lambda_sq[level - coarse];
    const std::size_t blocks = block_partition(level, l).size();
    row.resize(blocks);
    for (std::size_t k = 0; k < blocks; ++k) {
      if (config.threshold_override) {
        row[k] = *config.threshold_override;
      } else if (config.sigma_estimator == SigmaEstimator::LocalBlock) {
        row[k] = sigma_hat_local(observed, level, k, l) / nd;
      } else {
        row[k] = sigma_sq / nd;
      }
      lambda_sq_total += row[k];
    }
    block_total += blocks;
  }
  CoefficientTree kept = block_threshold_apply(
      raw, [&](int level, std::size_t k) { return lambda_sq[level - coarse][k]; }, l);
  Signal fitted = reconstruct(kept, basis);
  const double mean_lambda_sq =
      block_total == 0 ? 0.0 : lambda_sq_total / static_cast<double>(block_total);
  const std::size_t kept_count = count_nonzero_details(kept);
  return DenoiseResult{std::move(fitted), std::move(raw), std::move(kept), mean_lambda_sq,
                       coarse, finest, sigma_sq, kept_count};
}

}  // namespace nsdwav
