#include "phasesync/circular.hpp"

#include <cmath>

#include "phasesync/error.hpp"
#include "phasesync/types.hpp"

namespace phasesync::circular {

double wrap_signed(double theta) {
  if (!std::isfinite(theta)) fail(ErrorCode::invalid_input, "wrap_signed: non-finite angle");
  double r = theta - kTwoPi * std::round(theta / kTwoPi);
  if (r >= kPi) r -= kTwoPi;
  if (r < -kPi) r += kTwoPi;
  return r;
}

double wrap_positive(double theta) {
  if (!std::isfinite(theta)) fail(ErrorCode::invalid_input, "wrap_positive: non-finite angle");
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double circular_mean(std::span<const double> angles) {
  if (angles.empty()) fail(ErrorCode::invalid_input, "circular_mean: empty input");
  double sum_sin = 0.0;
  double sum_cos = 0.0;
  for (double a : angles) {
    sum_sin += std::sin(a);
    sum_cos += std::cos(a);
  }
  if (std::hypot(sum_sin, sum_cos) <= 1e-12)
    fail(ErrorCode::undefined_mean, "circular_mean: zero resultant, direction undefined");
  return wrap_signed(std::atan2(sum_sin, sum_cos));
}

double order_function(double delta) {
  if (!(std::fabs(delta) < kTwoPi))
    fail(ErrorCode::out_of_range, "order_function: |delta| must be < 2pi");
  return (delta >= 0.0) ? delta - kPi : delta + kPi;
}

}  // namespace phasesync::circular
