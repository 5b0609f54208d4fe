#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace phasesync::oracle {

// Brute-force reference implementations of the windowed estimators, written
// as straight-line transcriptions of the defining formulas. They share no
// helpers with the production kernels (different circular-mean route,
// fmod-based order function, textbook correlation) so agreement is evidence
// rather than tautology. Degenerate windows return NaN.
double plv_direct(std::span<const double> delta_phi);
double circ_circ_direct(std::span<const double> phi_x, std::span<const double> phi_y);
double toroidal_direct(std::span<const double> phi_x, std::span<const double> phi_y);
double pearson_direct(std::span<const double> x, std::span<const double> y);

// H(e^{j 2 pi f tr}) by direct polynomial evaluation on the unit circle.
std::complex<double> freq_response(const std::vector<double>& b, const std::vector<double>& a,
                                   double freq_hz, double tr_seconds);

struct OracleEntry {
  std::string name;
  bool pass = false;
  double max_abs_dev = 0.0;
  std::string detail;
};

struct OracleReport {
  std::vector<OracleEntry> entries;
  bool all_pass = true;
};

// Randomized estimator-vs-oracle comparisons (window lengths 4..32), the
// filter frequency-response checks, sliding-window slice recomputation and
// the summary-band coverage count. perturb_toroidal injects a bias into the
// reported toroidal kernel value; tests use it to prove the harness flags a
// broken kernel.
OracleReport run_oracle_suite(std::uint64_t seed, std::size_t n_cases,
                              double perturb_toroidal = 0.0);

}  // namespace phasesync::oracle
