#pragma once

#include <span>

namespace phasesync::circular {

// Wrap to the signed convention [-pi, pi). Throws on non-finite input.
double wrap_signed(double theta);

// Wrap to the positive convention [0, 2pi). Throws on non-finite input.
double wrap_positive(double theta);

// Mean direction: quadrant-aware arctangent of (sum sin, sum cos).
// Throws undefined_mean when the resultant length is <= 1e-12 (perfectly
// balanced angles have no mean direction).
double circular_mean(std::span<const double> angles);

// Order function for toroidal correlation: h(delta) = ((delta + 2pi) mod 2pi) - pi,
// evaluated through its exact piecewise form (delta + pi on (-2pi, 0),
// delta - pi on [0, 2pi)). Requires |delta| < 2pi.
double order_function(double delta);

}  // namespace phasesync::circular
