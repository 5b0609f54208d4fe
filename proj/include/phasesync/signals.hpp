#pragma once

#include <span>
#include <vector>

#include "phasesync/types.hpp"

namespace phasesync::signals {

// Digital transfer-function coefficients, a[0] normalized to 1.
struct FilterCoeffs {
  std::vector<double> b;  // numerator
  std::vector<double> a;  // denominator
};

// Band-pass Butterworth of analog prototype order spec.order, realized via
// the bilinear transform with frequency pre-warping. The digital filter has
// order 2*spec.order (coefficient lists of length 2*spec.order + 1).
FilterCoeffs design_butterworth_bandpass(const BandSpec& spec, double tr_seconds);

// Zero-phase filtering: forward pass, then backward pass with the same
// filter. Edges are odd-reflected over 3*(denominator order) samples and
// both passes start from steady-state initial conditions scaled to the
// first sample, which suppresses the startup transient. Output length
// equals input length. Requires series.size() > 3*(denominator order + 1).
std::vector<double> filtfilt(const FilterCoeffs& coeffs, std::span<const double> series);

// Discrete analytic signal via full-length FFT: bin 0 (and bin T/2 for even
// T) keep weight 1, bins 1..ceil(T/2)-1 are doubled, the rest are zeroed.
// Callers are expected to pass narrow-band input for the envelope/phase
// split to be meaningful; this is not enforced.
AnalyticSignal analytic_signal(std::span<const double> series);

// Per region: filtfilt, then analytic_signal, keeping the wrapped phase.
// Rows are processed independently (parallel across regions).
PhaseMatrix extract_phases(const RoiDataset& data, const BandSpec& spec);

}  // namespace phasesync::signals
