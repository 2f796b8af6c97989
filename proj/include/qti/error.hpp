#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qti {

// Every failure raised by the library carries one of these categories. The CLI
// maps them onto distinct exit codes.
enum class ErrorCategory {
  InvalidArgument,   // precondition violated by a caller-supplied value
  GridOverflow,      // waveform does not fit the time window / wraps around
  CarrierMismatch,   // lens input carrier differs from the envelope carrier
  Degenerate,        // degenerate input: zero envelope, M in {0,1}, D = 0 ...
  InsufficientSupport,
  PeakDetection,
  ScenarioSyntax,
  ScenarioSemantic,
  Io,
};

std::string_view category_name(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& what) {
  throw Error(category, what);
}

inline void require(bool condition, ErrorCategory category, const std::string& what) {
  if (!condition)
    throw Error(category, what);
}

}  // namespace qti
