#pragma once

#include <cstddef>

namespace phasesync::kernels {

// Data-parallel inner loops shared by the metric and clustering code.
// Every entry has a scalar reference implementation and, on x86-64 with
// AVX2+FMA, a vectorized variant selected once at startup. The two variants
// are equivalence-tested against each other; they may differ only by
// floating-point reassociation of the accumulators.
struct Ops {
  const char* name;

  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);

  // out = {sum_x, sum_y, sum_xx, sum_yy, sum_xy}
  void (*pearson_sums)(const double* x, const double* y, std::size_t n, double out[5]);

  // Sine deviations from the circular means via the angle-difference
  // expansion sin(phi - mu) = sin(phi) cos(mu) - cos(phi) sin(mu), taking
  // precomputed sin/cos arrays of both phase series.
  // out = {sum dx*dy, sum dx^2, sum dy^2}
  void (*circ_dev_sums)(const double* sx, const double* cx, const double* sy, const double* cy,
                        std::size_t n, double sin_mu, double cos_mu, double sin_nu, double cos_nu,
                        double out[3]);

  // Order-function products over all strict pairs i < j of two phase series
  // wrapped to [0, 2pi). h(d) = d - pi for d >= 0, d + pi otherwise.
  // out = {sum hx*hy, sum hx^2, sum hy^2}
  void (*toroidal_sums)(const double* px, const double* py, std::size_t n, double out[3]);

  // Squared Euclidean distance (k-means inner loop).
  double (*sqdist)(const double* a, const double* b, std::size_t n);
};

const Ops& scalar_ops();

// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const Ops* avx2_ops();

// Runtime selection: AVX2 when available, scalar otherwise. The environment
// variable PHASESYNC_SIMD={auto,scalar,avx2} overrides (read once).
const Ops& active_ops();

}  // namespace phasesync::kernels
