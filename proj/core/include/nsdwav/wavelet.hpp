#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nsdwav {

enum class WaveletFamily { Haar, Daubechies, Coiflet };

// Orthonormal two-channel filter pair. The highpass taps follow the
// quadrature-mirror rule g_k = (-1)^k h_{L-1-k}.
class WaveletBasis {
 public:
  WaveletFamily family() const noexcept { return family_; }
  int order() const noexcept { return order_; }
  // Number of vanishing moments of the wavelet filter: order for Haar and
  // Daubechies, 2*order for Coiflets.
  int vanishing_moments() const noexcept;
  std::size_t length() const noexcept { return lowpass_.size(); }
  std::span<const double> lowpass() const noexcept { return lowpass_; }
  std::span<const double> highpass() const noexcept { return highpass_; }
  // Canonical short name: "haar", "db4", "coif3".
  std::string name() const;

  friend WaveletBasis make_basis(WaveletFamily family, int order);

 private:
  WaveletBasis(WaveletFamily family, int order, std::vector<double> lowpass);

  WaveletFamily family_;
  int order_;
  std::vector<double> lowpass_;
  std::vector<double> highpass_;
};

// Tabulated orders: Haar 1, Daubechies 1..10, Coiflet 1..5.
// Throws Error{UnsupportedOrder} otherwise.
WaveletBasis make_basis(WaveletFamily family, int order);

// Parses "haar", "dbK"/"daubechiesK", "coifK"/"coifletK".
WaveletBasis parse_basis(std::string_view name);

enum class SignalKind { Observed, Truth, Fitted };

// Samples on the design grid x_m = m/n, m = 1..n, with n a power of two.
class Signal {
 public:
  Signal(std::vector<double> samples, SignalKind kind);

  std::span<const double> samples() const noexcept { return samples_; }
  SignalKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return samples_.size(); }
  // log2 of the length.
  int finest_level() const noexcept { return finest_level_; }
  // Design point of 1-based sample m.
  double design_point(std::size_t m) const noexcept {
    return static_cast<double>(m) / static_cast<double>(samples_.size());
  }

 private:
  std::vector<double> samples_;
  SignalKind kind_;
  int finest_level_;
};

bool is_power_of_two(std::size_t n) noexcept;
// Exact log2 of a power of two.
int log2_exact(std::size_t n);

// Approximation coefficients at coarse_level plus one detail sequence per
// level in [coarse_level, finest_level); level i holds 2^i values.
class CoefficientTree {
 public:
  CoefficientTree(int coarse_level, int finest_level, std::vector<double> approx,
                  std::vector<std::vector<double>> details);

  int coarse_level() const noexcept { return coarse_level_; }
  int finest_level() const noexcept { return finest_level_; }
  std::span<const double> approx() const noexcept { return approx_; }
  std::span<double> approx() noexcept { return approx_; }
  // Detail coefficients of absolute level i, coarse_level <= i < finest_level.
  std::span<const double> detail(int level) const;
  std::span<double> detail(int level);
  std::size_t coefficient_count() const noexcept;
  // Sum of squares over approximation and detail coefficients.
  double energy() const noexcept;

  friend bool operator==(const CoefficientTree&, const CoefficientTree&) = default;

 private:
  int coarse_level_;
  int finest_level_;
  std::vector<double> approx_;
  std::vector<std::vector<double>> details_;
};

// Periodized Mallat pyramid. Analysis at stage j keeps even-indexed outputs:
// a[j] = sum_k h_k x[(2j+k) mod N], d[j] = sum_k g_k x[(2j+k) mod N].
CoefficientTree dwt(std::span<const double> samples, const WaveletBasis& basis, int coarse_level);
CoefficientTree dwt(const Signal& signal, const WaveletBasis& basis, int coarse_level);

std::vector<double> idwt_samples(const CoefficientTree& tree, const WaveletBasis& basis);
Signal idwt(const CoefficientTree& tree, const WaveletBasis& basis,
            SignalKind kind = SignalKind::Fitted);

}  // namespace nsdwav
