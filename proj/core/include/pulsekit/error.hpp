#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pulsekit {

/// Failure categories raised by the library. Each maps onto one error
/// named in the module contracts; `is_validation_error` separates bad
/// input/configuration from numerical failures on otherwise valid data.
enum class Errc {
  InvalidArgument,
  NonFiniteSample,
  ZeroVariance,
  WidthExceedsLength,
  InvalidBand,
  SignalTooShort,
  TooShort,
  DegenerateWindow,
  GuideGap,
  AllChannelsDead,
  AllRejected,
  InsufficientData,
  MisalignedSeries,
  SampleTooSmall,
  AllTied,
  RankDeficient,
  FrameSizeMismatch,
  ParseError,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

bool is_validation_error(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

inline void require(bool condition, Errc code, const char* message) {
  if (!condition) fail(code, message);
}

}  // namespace pulsekit
