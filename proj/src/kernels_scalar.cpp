#include <cstddef>

#include "phasesync/kernels.hpp"

namespace phasesync::kernels {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void pearson_sums_scalar(const double* x, const double* y, std::size_t n, double out[5]) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
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

void circ_dev_sums_scalar(const double* sx, const double* cx, const double* sy, const double* cy,
                          std::size_t n, double sin_mu, double cos_mu, double sin_nu,
                          double cos_nu, double out[3]) {
  double sdd = 0.0, sdx2 = 0.0, sdy2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
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

inline double order_fn(double d) { return (d >= 0.0) ? d - kPi : d + kPi; }

void toroidal_sums_scalar(const double* px, const double* py, std::size_t n, double out[3]) {
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double xi = px[i];
    const double yi = py[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double hx = order_fn(xi - px[j]);
      const double hy = order_fn(yi - py[j]);
      sxy += hx * hy;
      sxx += hx * hx;
      syy += hy * hy;
    }
  }
  out[0] = sxy;
  out[1] = sxx;
  out[2] = syy;
}

double sqdist_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      "scalar",          sum_scalar,           dot_scalar, pearson_sums_scalar,
      circ_dev_sums_scalar, toroidal_sums_scalar, sqdist_scalar,
  };
  return ops;
}

}  // namespace phasesync::kernels
