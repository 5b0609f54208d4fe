#pragma once

#include <optional>
#include <span>
#include <vector>

#include "phasesync/types.hpp"

namespace phasesync::psmetrics {

// Wrapped elementwise phase difference, [-pi, pi).
std::vector<double> phase_difference(std::span<const double> phi_x,
                                     std::span<const double> phi_y);

// Modulus of the window-mean unit phasor of the phase differences. L >= 2.
double plv_window(std::span<const double> delta_phi);

// Circular-circular correlation over one window: correlation of the sine
// deviations from the window circular means. Returns nullopt when either
// circular mean is undefined or either deviation sum is degenerate. L >= 3.
std::optional<double> circ_circ_window(std::span<const double> phi_x,
                                       std::span<const double> phi_y);

// Toroidal circular correlation over one window: order-function products
// over all strict sample pairs, inputs wrapped to [0, 2pi) internally.
// Returns nullopt on degenerate denominators. L >= 3.
std::optional<double> toroidal_window(std::span<const double> phi_x,
                                      std::span<const double> phi_y);

// Instantaneous phase coherence, 1 - |sin(delta)| elementwise.
std::vector<double> phase_coherence(std::span<const double> delta_phi);

// Cosine of the relative phase, cos(delta) elementwise.
std::vector<double> crp(std::span<const double> delta_phi);

// Windowed Pearson correlation. Returns nullopt on (numerically) zero
// variance in either window. L >= 3.
std::optional<double> csw_window(std::span<const double> x, std::span<const double> y);

// AR(1) prewhitening: estimates the lag-1 autocorrelation (mean-removed,
// normalization by T) and returns residuals e(t) = x(t) - rho*x(t-1) for
// t = 2..T, i.e. length T-1. T >= 8; constant series is an error.
std::vector<double> prewhiten_ar1(std::span<const double> x);

// Applies the windowed metric over every trailing window of the pair.
// Inputs are phase series for PLV/circ-circ/toroidal and signal series for
// CSW (and for PW-CSW, already-prewhitened signals; the caller accounts for
// the one-sample offset). Output index i corresponds to absolute time
// L-1+i; degenerate windows are flagged missing.
PsSeries sliding_apply(MetricId metric, std::span<const double> a, std::span<const double> b,
                       WindowSpec window);

// Full-length series for the instantaneous metrics (coherence, CRP).
PsSeries instantaneous_series(MetricId metric, std::span<const double> phi_x,
                              std::span<const double> phi_y);

// Metric evaluated for every region pair i < j in the documented ordering
// (ascending i, then j — the column-major lower triangle). Pairs are
// processed in parallel. Window is required for windowed metrics and must
// be absent for instantaneous ones; CSW/PW-CSW need signals, not phases,
// and are rejected here.
PsTensor pairwise_tensor(const PhaseMatrix& phases, MetricId metric,
                         std::optional<WindowSpec> window);

// CSW / PW-CSW tensor from (band-passed) signal rows.
PsTensor pairwise_tensor_from_signals(const Matrix& signals, MetricId metric, WindowSpec window);

}  // namespace phasesync::psmetrics
