#include "pulsekit/error.hpp"

namespace pulsekit {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonFiniteSample: return "NonFiniteSample";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::WidthExceedsLength: return "WidthExceedsLength";
    case Errc::InvalidBand: return "InvalidBand";
    case Errc::SignalTooShort: return "SignalTooShort";
    case Errc::TooShort: return "TooShort";
    case Errc::DegenerateWindow: return "DegenerateWindow";
    case Errc::GuideGap: return "GuideGap";
    case Errc::AllChannelsDead: return "AllChannelsDead";
    case Errc::AllRejected: return "AllRejected";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::MisalignedSeries: return "MisalignedSeries";
    case Errc::SampleTooSmall: return "SampleTooSmall";
    case Errc::AllTied: return "AllTied";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::FrameSizeMismatch: return "FrameSizeMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_validation_error(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument:
    case Errc::NonFiniteSample:
    case Errc::WidthExceedsLength:
    case Errc::InvalidBand:
    case Errc::SignalTooShort:
    case Errc::TooShort:
    case Errc::GuideGap:
    case Errc::MisalignedSeries:
    case Errc::SampleTooSmall:
    case Errc::InsufficientData:
    case Errc::FrameSizeMismatch:
    case Errc::ParseError:
    case Errc::IoError:
      return true;
    default:
      return false;
  }
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace pulsekit
