#include "nsdwav/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nsdwav/error.hpp"

namespace nsdwav {

namespace {

// Spikes and Corner follow the parameterization common in the block
// thresholding literature (five Gaussian bumps; a piecewise polynomial with
// derivative jumps at 0.5 and 0.8). Constants are recorded here as data.
constexpr double kSpikesScale = 15.6676;
constexpr Spike kSpikes[] = {
    {0.23, 1.0, 500.0},  {0.33, 2.0, 2000.0},  {0.47, 4.0, 8000.0},
    {0.69, 3.0, 16000.0}, {0.83, 1.0, 32000.0},
};

double corner_value(double x) {
  if (x <= 0.5) return 623.87 * x * x * x * (1.0 - 2.0 * x);
  if (x <= 0.8) return 187.161 * (0.125 - x * x * x) * x * x * x * x;
  const double t = x - 1.0;
  return 3708.470441 * t * t * t;
}

}  // namespace

double TestFunction::operator()(double x) const {
  switch (name) {
    case TestFunctionName::Spikes: {
      double v = 0.0;
      for (const auto& s : spikes) v += s.height * std::exp(-s.rate * (x - s.location) * (x - s.location));
      return spikes_scale * v;
    }
    case TestFunctionName::Corner:
      return corner_value(x);
    case TestFunctionName::SmoothSine:
      return std::sin(2.0 * std::numbers::pi * x);
    case TestFunctionName::Polynomial:
      // Cubic vanishing at 0, 1/2 and 1; smooth but not periodic.
      return x * (x - 0.5) * (x - 1.0) * 8.0;
  }
  return 0.0;
}

std::string TestFunction::label() const {
  switch (name) {
    case TestFunctionName::Spikes: return "spikes";
    case TestFunctionName::Corner: return "corner";
    case TestFunctionName::SmoothSine: return "sine";
    case TestFunctionName::Polynomial: return "polynomial";
  }
  return "?";
}

TestFunction make_test_function(TestFunctionName name) {
  TestFunction fn{name, {}, 1.0};
  if (name == TestFunctionName::Spikes) {
    fn.spikes.assign(std::begin(kSpikes), std::end(kSpikes));
    fn.spikes_scale = kSpikesScale;
  }
  return fn;
}

TestFunction parse_test_function(std::string_view name) {
  if (name == "spikes") return make_test_function(TestFunctionName::Spikes);
  if (name == "corner") return make_test_function(TestFunctionName::Corner);
  if (name == "sine" || name == "smoothsine") return make_test_function(TestFunctionName::SmoothSine);
  if (name == "polynomial") return make_test_function(TestFunctionName::Polynomial);
  throw Error(ErrorCode::InvalidConfig, "unknown test function '" + std::string(name) + "'");
}

Signal sample(const TestFunction& fn, std::size_t n) {
  std::vector<double> values(n);
  for (std::size_t m = 1; m <= n; ++m) {
    values[m - 1] = fn(static_cast<double>(m) / static_cast<double>(n));
  }
  return Signal(std::move(values), SignalKind::Truth);
}

double grid_sd(std::span<const double> samples) {
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(samples.size());
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(samples.size()));
}

double calibrate_snr(const Signal& truth, double target_snr) {
  if (!(target_snr > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "SNR must be positive");
  }
  const double sd = grid_sd(truth.samples());
  double peak = 0.0;
  for (double v : truth.samples()) peak = std::max(peak, std::abs(v));
  if (!(sd > 1e-14 * peak)) throw Error(ErrorCode::ConstantSignal, "cannot calibrate SNR on a constant signal");
  return sd / target_snr;
}

}  // namespace nsdwav
