// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and only ever called after a runtime cpuid check.

#include "phasesync/kernels.hpp"

#if defined(PHASESYNC_HAVE_AVX2)

#include <immintrin.h>

#include <cstddef>

namespace phasesync::kernels {

namespace {

constexpr double kPi = 3.14159265358979323846;

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void pearson_sums_avx2(const double* x, const double* y, std::size_t n, double out[5]) {
  __m256d ax = _mm256_setzero_pd();
  __m256d ay = _mm256_setzero_pd();
  __m256d axx = _mm256_setzero_pd();
  __m256d ayy = _mm256_setzero_pd();
  __m256d axy = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    ax = _mm256_add_pd(ax, vx);
    ay = _mm256_add_pd(ay, vy);
    axx = _mm256_fmadd_pd(vx, vx, axx);
    ayy = _mm256_fmadd_pd(vy, vy, ayy);
    axy = _mm256_fmadd_pd(vx, vy, axy);
  }
  double sx = hsum(ax), sy = hsum(ay), sxx = hsum(axx), syy = hsum(ayy), sxy = hsum(axy);
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    sx += xi;
    sy += yi;
    sxx += xi * xi;
    syy += yi * yi;
    sxy += xi * yi;
  }
  out[0] = sx;
  out[1] = sy;
  out[2] = sxx;
  out[3] = syy;
  out[4] = sxy;
}

void circ_dev_sums_avx2(const double* sx, const double* cx, const double* sy, const double* cy,
                        std::size_t n, double sin_mu, double cos_mu, double sin_nu, double cos_nu,
                        double out[3]) {
  const __m256d vsm = _mm256_set1_pd(sin_mu);
  const __m256d vcm = _mm256_set1_pd(cos_mu);
  const __m256d vsn = _mm256_set1_pd(sin_nu);
  const __m256d vcn = _mm256_set1_pd(cos_nu);
  __m256d add = _mm256_setzero_pd();
  __m256d adx2 = _mm256_setzero_pd();
  __m256d ady2 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_fmsub_pd(_mm256_loadu_pd(sx + i), vcm,
                                       _mm256_mul_pd(_mm256_loadu_pd(cx + i), vsm));
    const __m256d dy = _mm256_fmsub_pd(_mm256_loadu_pd(sy + i), vcn,
                                       _mm256_mul_pd(_mm256_loadu_pd(cy + i), vsn));
    add = _mm256_fmadd_pd(dx, dy, add);
    adx2 = _mm256_fmadd_pd(dx, dx, adx2);
    ady2 = _mm256_fmadd_pd(dy, dy, ady2);
  }
  double sdd = hsum(add), sdx2 = hsum(adx2), sdy2 = hsum(ady2);
  for (; i < n; ++i) {
    const double dx = sx[i] * cos_mu - cx[i] * sin_mu;
    const double dy = sy[i] * cos_nu - cy[i] * sin_nu;
    sdd += dx * dy;
    sdx2 += dx * dx;
    sdy2 += dy * dy;
  }
  out[0] = sdd;
  out[1] = sdx2;
  out[2] = sdy2;
}

// h(d) = d - pi for d >= 0, d + pi otherwise, as a branchless blend.
inline __m256d order_fn_vec(__m256d d, __m256d pi, __m256d mpi) {
  const __m256d ge = _mm256_cmp_pd(d, _mm256_setzero_pd(), _CMP_GE_OQ);
  return _mm256_add_pd(d, _mm256_blendv_pd(pi, mpi, ge));
}

void toroidal_sums_avx2(const double* px, const double* py, std::size_t n, double out[3]) {
  const __m256d pi = _mm256_set1_pd(kPi);
  const __m256d mpi = _mm256_set1_pd(-kPi);
  __m256d axy = _mm256_setzero_pd();
  __m256d axx = _mm256_setzero_pd();
  __m256d ayy = _mm256_setzero_pd();
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const __m256d xi = _mm256_set1_pd(px[i]);
    const __m256d yi = _mm256_set1_pd(py[i]);
    std::size_t j = i + 1;
    for (; j + 4 <= n; j += 4) {
      const __m256d hx = order_fn_vec(_mm256_sub_pd(xi, _mm256_loadu_pd(px + j)), pi, mpi);
      const __m256d hy = order_fn_vec(_mm256_sub_pd(yi, _mm256_loadu_pd(py + j)), pi, mpi);
      axy = _mm256_fmadd_pd(hx, hy, axy);
      axx = _mm256_fmadd_pd(hx, hx, axx);
      ayy = _mm256_fmadd_pd(hy, hy, ayy);
    }
    for (; j < n; ++j) {
      const double dx = px[i] - px[j];
      const double dy = py[i] - py[j];
      const double hx = (dx >= 0.0) ? dx - kPi : dx + kPi;
      const double hy = (dy >= 0.0) ? dy - kPi : dy + kPi;
      sxy += hx * hy;
      sxx += hx * hx;
      syy += hy * hy;
    }
  }
  out[0] = sxy + hsum(axy);
  out[1] = sxx + hsum(axx);
  out[2] = syy + hsum(ayy);
}

double sqdist_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

const Ops* avx2_ops_impl() {
  static const Ops ops = {
      "avx2",           sum_avx2,           dot_avx2, pearson_sums_avx2,
      circ_dev_sums_avx2, toroidal_sums_avx2, sqdist_avx2,
  };
  return &ops;
}

}  // namespace phasesync::kernels

#else

namespace phasesync::kernels {
const Ops* avx2_ops_impl() { return nullptr; }
}  // namespace phasesync::kernels

#endif  // PHASESYNC_HAVE_AVX2
