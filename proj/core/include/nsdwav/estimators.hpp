#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "nsdwav/wavelet.hpp"

namespace nsdwav {

enum class Method { TermByTerm, Block };

// Variance estimate feeding the block threshold: one local estimate per block
// (LocalBlock) or the global first-difference estimate (FirstDifference).
enum class SigmaEstimator { FirstDifference, LocalBlock };

struct DenoiseConfig {
  Method method = Method::Block;
  // Assumed regularity s; sets the default coarse level.
  double smoothness_s = 2.0;
  SigmaEstimator sigma_estimator = SigmaEstimator::LocalBlock;
  // Term-by-term: replaces lambda_0. Block: replaces lambda^2 for every block.
  std::optional<double> threshold_override;
  std::optional<int> coarse_level_override;

  // Throws Error{InvalidConfig} when smoothness_s <= 0 or an override is out of
  // range for a signal of finest level `finest_level`.
  void validate(int finest_level) const;
};

struct DenoiseResult {
  // sqrt(n) * idwt(kept_tree), back in the units of the observations.
  Signal fitted;
  CoefficientTree raw_tree;
  CoefficientTree kept_tree;
  // lambda_0 for term-by-term; mean lambda^2 over all blocks for block.
  double threshold_used;
  int coarse_level;
  // i_1 for term-by-term, i_2 for block.
  int finest_thresholded_level;
  // Global first-difference estimate of sigma^2.
  double sigma_sq_hat;
  std::size_t kept_detail_count;
};

// Half-open index range [first, last) of one block Gamma_ik within a level.
struct Block {
  std::size_t first;
  std::size_t last;
  std::size_t size() const noexcept { return last - first; }
  friend bool operator==(const Block&, const Block&) = default;
};

// Cascade on n^{-1/2} * Y, so entries estimate the L2 coefficients of g.
CoefficientTree empirical_tree(const Signal& observed, const WaveletBasis& basis, int coarse_level);

// sigma^2 estimate: sum_{m<n} (Y_{m+1} - Y_m)^2 / (2(n-1)).
double sigma_hat_first_difference(std::span<const double> samples);
double sigma_hat_first_difference(const Signal& observed);

// Window width used by sigma_hat_local at `level` for a signal of length n.
std::size_t local_window_width(std::size_t n, int level);
// 1-based design point index whose 2^level * x lies closest to the middle of
// block `block_index`.
std::size_t block_design_point(std::size_t n, int level, std::size_t block_index,
                               std::size_t block_length);
// First-difference variance over a periodic window of local_window_width
// samples centred at block_design_point.
double sigma_hat_local(const Signal& observed, int level, std::size_t block_index,
                       std::size_t block_length);

double universal_threshold(double sigma_sq, std::size_t n);

// Smallest i_1 with 2^{i_1} >= n / ln n.
int term_level_cutoff(std::size_t n);
// Smallest i_0 with 2^{i_0} >= n^{1/(2s+1)}.
int block_coarse_level(std::size_t n, double s);
// max(1, round(ln n)).
std::size_t block_length(std::size_t n);

// Keeps beta_ij iff |beta_ij| > lambda0 on levels coarse..min(cutoff, finest-1);
// zeroes every level above cutoff.
CoefficientTree term_threshold_apply(const CoefficientTree& tree, double lambda0, int cutoff);

std::vector<Block> block_partition(int level, std::size_t block_length);

// l^{-1} * sum over the block of beta^2, with the nominal l as divisor.
double block_energy(const CoefficientTree& tree, int level, const Block& block,
                    std::size_t block_length);

// lambda^2 for (level, block index).
using BlockThreshold = std::function<double(int level, std::size_t block_index)>;

// Keeps a whole block iff its energy exceeds lambda^2, on every detail level.
CoefficientTree block_threshold_apply(const CoefficientTree& tree,
                                      const BlockThreshold& lambda_sq_of_block,
                                      std::size_t block_length);

DenoiseResult denoise(const Signal& observed, const WaveletBasis& basis,
                      const DenoiseConfig& config);

}  // namespace nsdwav
