#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nsdwav {

enum class ErrorCode {
  UnsupportedOrder,
  LevelOutOfRange,
  SignalTooShort,
  InvalidSignal,
  BlockOutOfRange,
  InvalidConfig,
  OddLengthForPairModel,
  InvalidRho,
  InsufficientLength,
  LengthMismatch,
  ConstantSignal,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every library failure is reported as an Error carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nsdwav
