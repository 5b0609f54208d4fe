#pragma once

#include <complex>
#include <vector>

namespace phasesync {

// Forward/inverse DFT for arbitrary length. Power-of-two sizes use an
// iterative radix-2 transform; other sizes go through Bluestein's chirp-z
// construction, so non-composite-friendly lengths (e.g. 210) are exact to
// rounding. The inverse applies the 1/n scale.
std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x);
std::vector<std::complex<double>> idft(const std::vector<std::complex<double>>& x);

}  // namespace phasesync
