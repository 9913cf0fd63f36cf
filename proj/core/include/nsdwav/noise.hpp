#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace nsdwav {

// Mixes (seed, index) into an independent 64-bit stream key.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

// SplitMix64; a UniformRandomBitGenerator keyed by derive_seed so each noise
// pair gets its own stream.
class StreamEngine {
 public:
  using result_type = std::uint64_t;
  explicit StreamEngine(std::uint64_t key) noexcept : state_(key) {}
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }
  result_type operator()() noexcept;

 private:
  std::uint64_t state_;
};

struct IidGaussian {
  double sigma = 1.0;
};

// Independent bivariate-normal pairs (eps_{2t-1}, eps_{2t}) with zero means,
// variances (sigma1_sq, sigma2_sq) and correlation rho0 < 0.
struct NsdPairMixture {
  double rho0 = -0.5;
  double sigma1_sq = 1.0;
  double sigma2_sq = 9.0;
  // Divide each coordinate by its marginal sd so the sequence is identically
  // distributed with unit variance.
  bool standardize = true;
};

class NoiseModel {
 public:
  using Variant = std::variant<IidGaussian, NsdPairMixture>;

  // Throws Error{InvalidRho} for rho0 outside (-1, 0), Error{InvalidConfig}
  // for nonpositive variances.
  NoiseModel(Variant variant);  // NOLINT(google-explicit-constructor)

  const Variant& variant() const noexcept { return variant_; }
  bool is_pair_model() const noexcept { return std::holds_alternative<NsdPairMixture>(variant_); }
  // Average marginal variance of the generated sequence.
  double population_sigma_sq() const noexcept;
  // Marginal variance of 0-based index m.
  double marginal_variance(std::size_t m) const noexcept;
  // Population covariance of the two members of a pair.
  double within_pair_covariance() const noexcept;
  std::string describe() const;

 private:
  Variant variant_;
};

// Pair t (0-based) of the sequence generated with `seed`; entries 2t and 2t+1.
std::array<double, 2> generate_pair(const NoiseModel& model, std::uint64_t seed,
                                    std::size_t pair_index);

// Deterministic in (model, n, seed). Throws Error{OddLengthForPairModel} for
// odd n under the pair model.
std::vector<double> generate(const NoiseModel& model, std::size_t n, std::uint64_t seed);

struct CovDecayProfile {
  // v_hat[u-1] estimates v(u) = sum over |k-m| >= u of |Cov(eps_k, eps_m)|,
  // averaged over k.
  std::vector<double> v_hat;
  std::vector<double> std_error;
};

// Cross-fitted estimate: covariance signs come from one half of the
// replicates and magnitudes from the other, then the halves swap. This keeps
// the estimate of |Cov| unbiased at zero for uncorrelated pairs.
// Throws Error{InsufficientLength} when n < 2*u_max or replicates < 4.
CovDecayProfile cov_decay_profile(const NoiseModel& model, std::size_t u_max, std::size_t n,
                                  std::size_t replicates, std::uint64_t seed);

struct SupermodularEntry {
  std::string function;
  double dependent_mean;
  double independent_mean;
  double difference;
  double std_error;
  bool pass;
};

struct SupermodularReport {
  std::vector<SupermodularEntry> entries;
  bool all_pass() const noexcept;
};

// Compares E phi(X) with E phi(X*) for the fixed battery:
//   pair_max_product   mean_t max(x_{2t},0.1) * max(x_{2t+1},0.1)
//   exp_mean           exp(mean_i clip(x_i, -5, 5))
//   pair_product       mean_t x_{2t} * x_{2t+1}
// X* has independent coordinates with the same marginals.
SupermodularReport supermodular_check(const NoiseModel& model, std::size_t n,
                                      std::size_t replicates, std::uint64_t seed);

struct WeightedVarianceReport {
  double variance_estimate;
  double bound;  // C0 * sigma^2
  double std_error;
  double weight_norm_sq;  // C0
  bool pass;
};

// Monte Carlo Var(sum a_m eps_m) against C0 * sigma^2.
// Throws Error{LengthMismatch} for empty weights or odd length under the pair model.
WeightedVarianceReport weighted_variance_check(const NoiseModel& model,
                                               std::span<const double> weights,
                                               std::size_t replicates, std::uint64_t seed);

}  // namespace nsdwav
