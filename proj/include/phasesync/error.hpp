#pragma once

#include <stdexcept>
#include <string>

namespace phasesync {

enum class ErrorCode {
  invalid_input,
  invalid_band,
  invalid_order,
  series_too_short,
  undefined_mean,
  out_of_range,
  window_too_long,
  degenerate_series,
  too_few_cycles,
  infeasible,
  shape_mismatch,
  io_failure,
  bad_config,
};

// Library-wide exception carrying a stable error code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace phasesync
