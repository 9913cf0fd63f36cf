#include "nsdwav/wavelet.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <numeric>

#include "nsdwav/error.hpp"

namespace nsdwav {

namespace {

#include "filter_tables.inc"

struct Table {
  const double* taps;
  std::size_t size;
};

template <std::size_t N>
constexpr Table table(const double (&taps)[N]) {
  return {taps, N};
}

constexpr std::array<Table, 10> kDaubechiesTables = {
    table(kDaubechies1), table(kDaubechies2), table(kDaubechies3), table(kDaubechies4),
    table(kDaubechies5), table(kDaubechies6), table(kDaubechies7), table(kDaubechies8),
    table(kDaubechies9), table(kDaubechies10)};

constexpr std::array<Table, 5> kCoifletTables = {table(kCoiflet1), table(kCoiflet2),
                                                 table(kCoiflet3), table(kCoiflet4),
                                                 table(kCoiflet5)};

std::string family_label(WaveletFamily family) {
  switch (family) {
    case WaveletFamily::Haar: return "haar";
    case WaveletFamily::Daubechies: return "db";
    case WaveletFamily::Coiflet: return "coif";
  }
  return "?";
}

// One analysis stage on a period of length n = input.size().
void analysis_stage(std::span<const double> input, std::span<const double> h,
                    std::span<const double> g, std::span<double> approx,
                    std::span<double> detail) {
  const std::size_t n = input.size();
  const std::size_t half = n / 2;
  for (std::size_t j = 0; j < half; ++j) {
    double a = 0.0;
    double d = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double x = input[(2 * j + k) % n];
      a += h[k] * x;
      d += g[k] * x;
    }
    approx[j] = a;
    detail[j] = d;
  }
}

// Adjoint of analysis_stage; output.size() == 2 * approx.size().
void synthesis_stage(std::span<const double> approx, std::span<const double> detail,
                     std::span<const double> h, std::span<const double> g,
                     std::span<double> output) {
  const std::size_t n = output.size();
  std::fill(output.begin(), output.end(), 0.0);
  for (std::size_t j = 0; j < approx.size(); ++j) {
    for (std::size_t k = 0; k < h.size(); ++k) {
      output[(2 * j + k) % n] += h[k] * approx[j] + g[k] * detail[j];
    }
  }
}

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::SignalTooShort: return "SignalTooShort";
    case ErrorCode::InvalidSignal: return "InvalidSignal";
    case ErrorCode::BlockOutOfRange: return "BlockOutOfRange";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::OddLengthForPairModel: return "OddLengthForPairModel";
    case ErrorCode::InvalidRho: return "InvalidRho";
    case ErrorCode::InsufficientLength: return "InsufficientLength";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ConstantSignal: return "ConstantSignal";
  }
  return "Unknown";
}

WaveletBasis::WaveletBasis(WaveletFamily family, int order, std::vector<double> lowpass)
    : family_(family), order_(order), lowpass_(std::move(lowpass)) {
  const std::size_t len = lowpass_.size();
  highpass_.resize(len);
  for (std::size_t k = 0; k < len; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    highpass_[k] = sign * lowpass_[len - 1 - k];
  }
}

int WaveletBasis::vanishing_moments() const noexcept {
  return family_ == WaveletFamily::Coiflet ? 2 * order_ : order_;
}

std::string WaveletBasis::name() const {
  if (family_ == WaveletFamily::Haar) return "haar";
  return family_label(family_) + std::to_string(order_);
}

WaveletBasis make_basis(WaveletFamily family, int order) {
  Table t{};
  switch (family) {
    case WaveletFamily::Haar:
      if (order != 1) {
        throw Error(ErrorCode::UnsupportedOrder, "Haar supports order 1 only, got " +
                                                     std::to_string(order));
      }
      t = kDaubechiesTables[0];
      break;
    case WaveletFamily::Daubechies:
      if (order < 1 || order > static_cast<int>(kDaubechiesTables.size())) {
        throw Error(ErrorCode::UnsupportedOrder,
                    "Daubechies order must be in 1..10, got " + std::to_string(order));
      }
      t = kDaubechiesTables[order - 1];
      break;
    case WaveletFamily::Coiflet:
      if (order < 1 || order > static_cast<int>(kCoifletTables.size())) {
        throw Error(ErrorCode::UnsupportedOrder,
                    "Coiflet order must be in 1..5, got " + std::to_string(order));
      }
      t = kCoifletTables[order - 1];
      break;
  }
  return WaveletBasis(family, order, std::vector<double>(t.taps, t.taps + t.size));
}

WaveletBasis parse_basis(std::string_view name) {
  auto with_order = [&](std::string_view prefix, WaveletFamily family) -> WaveletBasis {
    const std::string_view digits = name.substr(prefix.size());
    int order = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), order);
    if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
      throw Error(ErrorCode::UnsupportedOrder, "unrecognized wavelet '" + std::string(name) + "'");
    }
    return make_basis(family, order);
  };
  if (name == "haar") return make_basis(WaveletFamily::Haar, 1);
  // Longer prefixes first so "coiflet3" is not read as "coif" + "let3".
  if (name.starts_with("daubechies")) return with_order("daubechies", WaveletFamily::Daubechies);
  if (name.starts_with("db")) return with_order("db", WaveletFamily::Daubechies);
  if (name.starts_with("coiflet")) return with_order("coiflet", WaveletFamily::Coiflet);
  if (name.starts_with("coif")) return with_order("coif", WaveletFamily::Coiflet);
  throw Error(ErrorCode::UnsupportedOrder, "unrecognized wavelet '" + std::string(name) + "'");
}

bool is_power_of_two(std::size_t n) noexcept { return std::has_single_bit(n); }

int log2_exact(std::size_t n) {
  if (!is_power_of_two(n)) {
    throw Error(ErrorCode::InvalidSignal, "length " + std::to_string(n) + " is not a power of two");
  }
  return std::countr_zero(n);
}

Signal::Signal(std::vector<double> samples, SignalKind kind)
    : samples_(std::move(samples)), kind_(kind), finest_level_(0) {
  if (samples_.size() < 2) {
    throw Error(ErrorCode::SignalTooShort,
                "a signal needs at least 2 samples, got " + std::to_string(samples_.size()));
  }
  finest_level_ = log2_exact(samples_.size());
}

CoefficientTree::CoefficientTree(int coarse_level, int finest_level, std::vector<double> approx,
                                 std::vector<std::vector<double>> details)
    : coarse_level_(coarse_level),
      finest_level_(finest_level),
      approx_(std::move(approx)),
      details_(std::move(details)) {
  if (coarse_level_ < 0 || coarse_level_ > finest_level_ || finest_level_ > 62) {
    throw Error(ErrorCode::LevelOutOfRange, "coarse level " + std::to_string(coarse_level_) +
                                                " outside [0, " + std::to_string(finest_level_) +
                                                "]");
  }
  if (approx_.size() != (std::size_t{1} << coarse_level_)) {
    throw Error(ErrorCode::LengthMismatch, "approximation length must be 2^coarse_level");
  }
  if (details_.size() != static_cast<std::size_t>(finest_level_ - coarse_level_)) {
    throw Error(ErrorCode::LengthMismatch, "one detail sequence per level is required");
  }
  for (int i = coarse_level_; i < finest_level_; ++i) {
    if (details_[i - coarse_level_].size() != (std::size_t{1} << i)) {
      throw Error(ErrorCode::LengthMismatch,
                  "detail level " + std::to_string(i) + " must hold 2^" + std::to_string(i) +
                      " coefficients");
    }
  }
}

std::span<const double> CoefficientTree::detail(int level) const {
  if (level < coarse_level_ || level >= finest_level_) {
    throw Error(ErrorCode::LevelOutOfRange, "no detail level " + std::to_string(level));
  }
  return details_[level - coarse_level_];
}

std::span<double> CoefficientTree::detail(int level) {
  if (level < coarse_level_ || level >= finest_level_) {
    throw Error(ErrorCode::LevelOutOfRange, "no detail level " + std::to_string(level));
  }
  return details_[level - coarse_level_];
}

std::size_t CoefficientTree::coefficient_count() const noexcept {
  std::size_t count = approx_.size();
  for (const auto& d : details_) count += d.size();
  return count;
}

double CoefficientTree::energy() const noexcept {
  double e = std::inner_product(approx_.begin(), approx_.end(), approx_.begin(), 0.0);
  for (const auto& d : details_) e += std::inner_product(d.begin(), d.end(), d.begin(), 0.0);
  return e;
}

CoefficientTree dwt(std::span<const double> samples, const WaveletBasis& basis, int coarse_level) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::SignalTooShort, "dwt needs at least 2 samples");
  }
  const int finest = log2_exact(samples.size());
  if (coarse_level < 0 || coarse_level > finest) {
    throw Error(ErrorCode::LevelOutOfRange, "coarse level " + std::to_string(coarse_level) +
                                                " outside [0, " + std::to_string(finest) + "]");
  }
  std::vector<std::vector<double>> details(static_cast<std::size_t>(finest - coarse_level));
  std::vector<double> current(samples.begin(), samples.end());
  if (basis.family() == WaveletFamily::Haar) {
    // Unnormalized pair sums with the 2^{-k/2} factor applied once per output,
    // so dyadic inputs give exact coefficients.
    const auto scale = [&](int k) {
      return k % 2 == 0 ? std::ldexp(1.0, -k / 2) : std::ldexp(basis.lowpass()[0], -(k - 1) / 2);
    };
    for (int level = finest - 1; level >= coarse_level; --level) {
      const std::size_t half = current.size() / 2;
      std::vector<double> sums(half);
      std::vector<double> detail(half);
      const double k_scale = scale(finest - level);
      for (std::size_t j = 0; j < half; ++j) {
        sums[j] = current[2 * j] + current[2 * j + 1];
        detail[j] = (current[2 * j] - current[2 * j + 1]) * k_scale;
      }
      details[level - coarse_level] = std::move(detail);
      current = std::move(sums);
    }
    const double a_scale = scale(finest - coarse_level);
    for (double& a : current) a *= a_scale;
    return CoefficientTree(coarse_level, finest, std::move(current), std::move(details));
  }
  for (int level = finest - 1; level >= coarse_level; --level) {
    const std::size_t half = current.size() / 2;
    std::vector<double> approx(half);
    std::vector<double> detail(half);
    analysis_stage(current, basis.lowpass(), basis.highpass(), approx, detail);
    details[level - coarse_level] = std::move(detail);
    current = std::move(approx);
  }
  return CoefficientTree(coarse_level, finest, std::move(current), std::move(details));
}

CoefficientTree dwt(const Signal& signal, const WaveletBasis& basis, int coarse_level) {
  return dwt(signal.samples(), basis, coarse_level);
}

std::vector<double> idwt_samples(const CoefficientTree& tree, const WaveletBasis& basis) {
  std::vector<double> current(tree.approx().begin(), tree.approx().end());
  for (int level = tree.coarse_level(); level < tree.finest_level(); ++level) {
    std::vector<double> next(current.size() * 2);
    synthesis_stage(current, tree.detail(level), basis.lowpass(), basis.highpass(), next);
    current = std::move(next);
  }
  return current;
}

Signal idwt(const CoefficientTree& tree, const WaveletBasis& basis, SignalKind kind) {
  return Signal(idwt_samples(tree, basis), kind);
}

}  // namespace nsdwav
