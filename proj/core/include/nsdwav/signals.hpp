#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nsdwav/wavelet.hpp"

namespace nsdwav {

enum class TestFunctionName { Spikes, Corner, SmoothSine, Polynomial };

struct Spike {
  double location;
  double height;
  // Gaussian rate: height * exp(-rate * (x - location)^2).
  double rate;
};

struct TestFunction {
  TestFunctionName name;
  std::vector<Spike> spikes;  // Spikes only
  double spikes_scale = 1.0;  // Spikes only

  double operator()(double x) const;
  std::string label() const;
};

TestFunction make_test_function(TestFunctionName name);
TestFunction parse_test_function(std::string_view name);

// g(x_m) for x_m = m/n, m = 1..n.
Signal sample(const TestFunction& fn, std::size_t n);

// Population sd over the grid.
double grid_sd(std::span<const double> samples);

// sigma = sd(truth) / target_snr. Throws Error{ConstantSignal} for constant truth.
double calibrate_snr(const Signal& truth, double target_snr);

}  // namespace nsdwav
