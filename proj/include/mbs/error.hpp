#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mbs {

enum class Errc {
  already_calibrated,
  invalid_calibration,
  degenerate_readings,
  empty_trace,
  invalid_trace,
  trace_too_short,
  invalid_window,
  window_too_large,
  dynamic_tail,
  no_gesture,
  invalid_height,
  empty_label,
  empty_training_set,
  unknown_label,
  empty_matrix,
  empty_column,
  insufficient_rows,
  window_too_short,
  no_static_tail,
  no_suggestions,
  illegal_event,
  session_not_final,
  invalid_spec,
  invalid_argument,
  parse_error,
  io_error,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::already_calibrated: return "AlreadyCalibrated";
    case Errc::invalid_calibration: return "InvalidCalibration";
    case Errc::degenerate_readings: return "DegenerateReadings";
    case Errc::empty_trace: return "EmptyTrace";
    case Errc::invalid_trace: return "InvalidTrace";
    case Errc::trace_too_short: return "TraceTooShort";
    case Errc::invalid_window: return "InvalidWindow";
    case Errc::window_too_large: return "WindowTooLarge";
    case Errc::dynamic_tail: return "DynamicTail";
    case Errc::no_gesture: return "NoGesture";
    case Errc::invalid_height: return "InvalidHeight";
    case Errc::empty_label: return "EmptyLabel";
    case Errc::empty_training_set: return "EmptyTrainingSet";
    case Errc::unknown_label: return "UnknownLabel";
    case Errc::empty_matrix: return "EmptyMatrix";
    case Errc::empty_column: return "EmptyColumn";
    case Errc::insufficient_rows: return "InsufficientRows";
    case Errc::window_too_short: return "WindowTooShort";
    case Errc::no_static_tail: return "NoStaticTail";
    case Errc::no_suggestions: return "NoSuggestions";
    case Errc::illegal_event: return "IllegalEvent";
    case Errc::session_not_final: return "SessionNotFinal";
    case Errc::invalid_spec: return "InvalidSpec";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::parse_error: return "ParseError";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mbs
