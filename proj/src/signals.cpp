#include "phasesync/signals.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "phasesync/circular.hpp"
#include "phasesync/error.hpp"
#include "phasesync/fft.hpp"
#include "phasesync/parallel.hpp"

namespace phasesync::signals {

namespace {

using cplx = std::complex<double>;

// Polynomial coefficients (descending powers) from roots; roots come in
// conjugate pairs so the result is real up to rounding.
std::vector<double> poly_from_roots(const std::vector<cplx>& roots) {
  std::vector<cplx> c(roots.size() + 1, cplx(0.0, 0.0));
  c[0] = 1.0;
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j > 0; --j) c[j] -= roots[i] * c[j - 1];
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

struct Zpk {
  std::vector<cplx> zeros;
  std::vector<cplx> poles;
  double gain = 1.0;
};

// Analog low-pass prototype: poles on the unit circle's left half.
Zpk butter_prototype(int order) {
  Zpk zpk;
  zpk.poles.reserve(order);
  for (int k = 0; k < order; ++k) {
    const double ang = kPi * (2.0 * k + order + 1.0) / (2.0 * order);
    zpk.poles.emplace_back(std::cos(ang), std::sin(ang));
  }
  return zpk;
}

Zpk lowpass_to_bandpass(const Zpk& in, double w0, double bw) {
  Zpk out;
  const int degree = static_cast<int>(in.poles.size() - in.zeros.size());
  auto transform = [&](const cplx& r, std::vector<cplx>& dst) {
    const cplx t = 0.5 * bw * r;
    const cplx s = std::sqrt(t * t - w0 * w0);
    dst.push_back(t + s);
    dst.push_back(t - s);
  };
  for (const cplx& z : in.zeros) transform(z, out.zeros);
  for (const cplx& p : in.poles) transform(p, out.poles);
  for (int i = 0; i < degree; ++i) out.zeros.emplace_back(0.0, 0.0);
  out.gain = in.gain * std::pow(bw, degree);
  return out;
}

Zpk bilinear(const Zpk& in, double fs) {
  Zpk out;
  const double fs2 = 2.0 * fs;
  const int degree = static_cast<int>(in.poles.size() - in.zeros.size());
  cplx num(1.0, 0.0), den(1.0, 0.0);
  for (const cplx& z : in.zeros) {
    num *= fs2 - z;
    out.zeros.push_back((fs2 + z) / (fs2 - z));
  }
  for (const cplx& p : in.poles) {
    den *= fs2 - p;
    out.poles.push_back((fs2 + p) / (fs2 - p));
  }
  for (int i = 0; i < degree; ++i) out.zeros.emplace_back(-1.0, 0.0);
  out.gain = in.gain * (num / den).real();
  return out;
}

// Direct form II transposed, a[0] == 1, b and a the same length.
std::vector<double> lfilter(const std::vector<double>& b, const std::vector<double>& a,
                            std::span<const double> x, const std::vector<double>& zi) {
  const std::size_t order = a.size() - 1;
  std::vector<double> z = zi;
  std::vector<double> y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double xi = x[k];
    const double yi = b[0] * xi + z[0];
    y[k] = yi;
    for (std::size_t i = 0; i + 1 < order; ++i) z[i] = z[i + 1] + b[i + 1] * xi - a[i + 1] * yi;
    z[order - 1] = b[order] * xi - a[order] * yi;
  }
  return y;
}

// Steady-state initial conditions for a unit step: solve (I - A^T) zi = B
// with A the companion matrix of a. Gaussian elimination with partial
// pivoting; the system is order x order (order 10 for the default filter).
std::vector<double> lfilter_zi(const std::vector<double>& b, const std::vector<double>& a) {
  const std::size_t n = a.size() - 1;
  std::vector<double> m(n * (n + 1), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    m[i * (n + 1) + i] += 1.0;
    m[i * (n + 1) + 0] += a[i + 1];
    if (i + 1 < n) m[i * (n + 1) + (i + 1)] -= 1.0;
    m[i * (n + 1) + n] = b[i + 1] - a[i + 1] * b[0];
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(m[r * (n + 1) + col]) > std::fabs(m[pivot * (n + 1) + col])) pivot = r;
    if (m[pivot * (n + 1) + col] == 0.0)
      fail(ErrorCode::invalid_input, "filtfilt: singular steady-state system");
    if (pivot != col)
      for (std::size_t c = col; c <= n; ++c)
        std::swap(m[col * (n + 1) + c], m[pivot * (n + 1) + c]);
    const double inv = 1.0 / m[col * (n + 1) + col];
    for (std::size_t c = col; c <= n; ++c) m[col * (n + 1) + c] *= inv;
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m[r * (n + 1) + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= n; ++c) m[r * (n + 1) + c] -= f * m[col * (n + 1) + c];
    }
  }
  std::vector<double> zi(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double s = m[r * (n + 1) + n];
    for (std::size_t c = r + 1; c < n; ++c) s -= m[r * (n + 1) + c] * zi[c];
    zi[r] = s;
  }
  return zi;
}

}  // namespace

FilterCoeffs design_butterworth_bandpass(const BandSpec& spec, double tr_seconds) {
  if (!(tr_seconds > 0.0)) fail(ErrorCode::invalid_input, "design: tr_seconds must be > 0");
  spec.validate(tr_seconds);

  const double fs = 1.0 / tr_seconds;
  auto prewarp = [&](double f_hz) { return 2.0 * fs * std::tan(kPi * f_hz / fs); };
  const double w_low = prewarp(spec.low_hz);
  const double w_high = prewarp(spec.high_hz);
  const double w0 = std::sqrt(w_low * w_high);
  const double bw = w_high - w_low;

  Zpk zpk = butter_prototype(spec.order);
  zpk = lowpass_to_bandpass(zpk, w0, bw);
  zpk = bilinear(zpk, fs);

  FilterCoeffs coeffs;
  coeffs.b = poly_from_roots(zpk.zeros);
  for (double& v : coeffs.b) v *= zpk.gain;
  coeffs.a = poly_from_roots(zpk.poles);
  return coeffs;
}

std::vector<double> filtfilt(const FilterCoeffs& coeffs, std::span<const double> series) {
  if (coeffs.a.empty() || coeffs.b.empty() || coeffs.a[0] != 1.0)
    fail(ErrorCode::invalid_input, "filtfilt: malformed coefficients");
  const std::size_t ntaps = std::max(coeffs.b.size(), coeffs.a.size());
  if (series.size() <= 3 * ntaps)
    fail(ErrorCode::series_too_short,
         "filtfilt: series must be longer than 3*(filter order + 1) samples");
  for (double v : series)
    if (!std::isfinite(v)) fail(ErrorCode::invalid_input, "filtfilt: non-finite sample");

  std::vector<double> b = coeffs.b;
  std::vector<double> a = coeffs.a;
  b.resize(ntaps, 0.0);
  a.resize(ntaps, 0.0);

  const std::size_t edge = 3 * (ntaps - 1);
  const std::size_t n = series.size();

  std::vector<double> ext;
  ext.reserve(n + 2 * edge);
  for (std::size_t i = edge; i >= 1; --i) ext.push_back(2.0 * series[0] - series[i]);
  ext.insert(ext.end(), series.begin(), series.end());
  for (std::size_t i = 1; i <= edge; ++i) ext.push_back(2.0 * series[n - 1] - series[n - 1 - i]);

  const std::vector<double> zi = lfilter_zi(b, a);
  std::vector<double> z0(zi.size());

  for (std::size_t i = 0; i < zi.size(); ++i) z0[i] = zi[i] * ext.front();
  std::vector<double> y = lfilter(b, a, ext, z0);

  std::reverse(y.begin(), y.end());
  for (std::size_t i = 0; i < zi.size(); ++i) z0[i] = zi[i] * y.front();
  y = lfilter(b, a, y, z0);
  std::reverse(y.begin(), y.end());

  return {y.begin() + static_cast<std::ptrdiff_t>(edge),
          y.end() - static_cast<std::ptrdiff_t>(edge)};
}

AnalyticSignal analytic_signal(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 16) fail(ErrorCode::invalid_input, "analytic_signal: need at least 16 samples");
  for (double v : series)
    if (!std::isfinite(v)) fail(ErrorCode::invalid_input, "analytic_signal: non-finite sample");

  std::vector<std::complex<double>> spectrum(n);
  for (std::size_t i = 0; i < n; ++i) spectrum[i] = std::complex<double>(series[i], 0.0);
  spectrum = dft(spectrum);

  // Bin 0 keeps weight 1, as does bin n/2 when n is even; positive
  // frequencies double, negative frequencies vanish.
  for (std::size_t k = 1; k < (n + 1) / 2; ++k) spectrum[k] *= 2.0;
  for (std::size_t k = n / 2 + 1; k < n; ++k) spectrum[k] = 0.0;

  const std::vector<std::complex<double>> z = idft(spectrum);

  AnalyticSignal out;
  out.envelope.resize(n);
  out.phase.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.envelope[i] = std::abs(z[i]);
    out.phase[i] = circular::wrap_signed(std::atan2(z[i].imag(), z[i].real()));
  }
  return out;
}

PhaseMatrix extract_phases(const RoiDataset& data, const BandSpec& spec) {
  data.validate();
  const FilterCoeffs coeffs = design_butterworth_bandpass(spec, data.tr_seconds);

  PhaseMatrix out;
  out.tr_seconds = data.tr_seconds;
  out.phases = Matrix(data.n_regions(), data.n_samples());

  parallel_for(data.n_regions(), [&](std::size_t r) {
    const std::vector<double> filtered = filtfilt(coeffs, data.values.row(r));
    const AnalyticSignal sig = analytic_signal(filtered);
    std::copy(sig.phase.begin(), sig.phase.end(), out.phases.row(r).begin());
  });
  return out;
}

}  // namespace phasesync::signals
