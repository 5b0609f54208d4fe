#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "phasesync/circular.hpp"
#include "phasesync/error.hpp"
#include "phasesync/oracle.hpp"
#include "phasesync/rng.hpp"
#include "phasesync/signals.hpp"
#include "phasesync/types.hpp"

using namespace phasesync;

namespace {

std::vector<double> cosine_series(std::size_t n, double freq_hz, double tr, double phase0 = 0.0) {
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t)
    out[t] = std::cos(kTwoPi * freq_hz * static_cast<double>(t) * tr + phase0);
  return out;
}

// Least-squares phase of a sinusoid at a known frequency against the
// quadrature pair, over the middle half of the series.
double fitted_phase(const std::vector<double>& x, double freq_hz, double tr) {
  const std::size_t lo = x.size() / 4;
  const std::size_t hi = 3 * x.size() / 4;
  double sc = 0.0, ss = 0.0;
  for (std::size_t t = lo; t < hi; ++t) {
    const double w = kTwoPi * freq_hz * static_cast<double>(t) * tr;
    sc += x[t] * std::cos(w);
    ss += x[t] * std::sin(w);
  }
  return std::atan2(-ss, sc);
}

}  // namespace

TEST_CASE("butterworth bandpass design: shape and response") {
  const BandSpec band{0.03, 0.07, 5};
  const signals::FilterCoeffs c = signals::design_butterworth_bandpass(band, 2.0);
  CHECK(c.b.size() == 11);  // band-pass doubles the analog order
  CHECK(c.a.size() == 11);
  CHECK(c.a[0] == 1.0);

  const double g_dc = std::abs(oracle::freq_response(c.b, c.a, 0.0, 2.0));
  const double g_center = std::abs(oracle::freq_response(c.b, c.a, 0.05, 2.0));
  const double g_low = std::abs(oracle::freq_response(c.b, c.a, 0.01, 2.0));
  const double g_high = std::abs(oracle::freq_response(c.b, c.a, 0.13, 2.0));
  CHECK(g_dc <= 1e-10);
  CHECK(g_center >= 1.0 / std::sqrt(2.0));
  CHECK(g_center <= 1.0 + 1e-9);
  CHECK(g_center > g_low);
  CHECK(g_center > g_high);
}

TEST_CASE("butterworth design rejects bad bands and orders") {
  CHECK_THROWS_AS(signals::design_butterworth_bandpass(BandSpec{0.1, 0.3, 5}, 2.0), Error);
  CHECK_THROWS_AS(signals::design_butterworth_bandpass(BandSpec{0.0, 0.07, 5}, 2.0), Error);
  CHECK_THROWS_AS(signals::design_butterworth_bandpass(BandSpec{0.07, 0.03, 5}, 2.0), Error);
  try {
    signals::design_butterworth_bandpass(BandSpec{0.1, 0.4, 5}, 2.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_band);
    CHECK(std::string(e.what()).find("Nyquist") != std::string::npos);
  }
  try {
    signals::design_butterworth_bandpass(BandSpec{0.03, 0.07, 0}, 2.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_order);
  }
}

TEST_CASE("filtfilt introduces no phase shift at the passband center") {
  const BandSpec band{0.03, 0.07, 5};
  const signals::FilterCoeffs c = signals::design_butterworth_bandpass(band, 2.0);
  const std::vector<double> x = cosine_series(512, 0.05, 2.0);
  const std::vector<double> y = signals::filtfilt(c, x);
  REQUIRE(y.size() == x.size());
  const double shift =
      circular::wrap_signed(fitted_phase(y, 0.05, 2.0) - fitted_phase(x, 0.05, 2.0));
  CHECK(std::fabs(shift) < 0.01);
}

TEST_CASE("filtfilt kills DC") {
  const signals::FilterCoeffs c =
      signals::design_butterworth_bandpass(BandSpec{0.03, 0.07, 5}, 2.0);
  const std::vector<double> x(256, 3.7);
  for (double v : signals::filtfilt(c, x)) CHECK(std::fabs(v) < 1e-6);
}

TEST_CASE("filtfilt is forward-backward symmetric away from the edges") {
  // The slowest pole of this band-pass has radius ~0.952, so edge
  // transients need ~420 samples to fall below 1e-9; the operator is
  // reversal-symmetric only once both ends have decayed.
  const signals::FilterCoeffs c =
      signals::design_butterworth_bandpass(BandSpec{0.03, 0.07, 5}, 2.0);
  Rng rng = make_rng(5, 0);
  std::vector<double> x(2048);
  for (double& v : x) v = rng.normal();

  const std::vector<double> direct = signals::filtfilt(c, x);
  std::vector<double> rev(x.rbegin(), x.rend());
  std::vector<double> out = signals::filtfilt(c, rev);
  std::reverse(out.begin(), out.end());
  for (std::size_t i = x.size() / 4; i < 3 * x.size() / 4; ++i)
    CHECK(std::fabs(direct[i] - out[i]) < 1e-9);
}

TEST_CASE("filtfilt rejects short series") {
  const signals::FilterCoeffs c =
      signals::design_butterworth_bandpass(BandSpec{0.03, 0.07, 5}, 2.0);
  const std::vector<double> x(33, 0.0);  // needs > 3*(order+1) = 33
  CHECK_THROWS_AS(signals::filtfilt(c, x), Error);
  try {
    signals::filtfilt(c, x);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::series_too_short);
  }
  const std::vector<double> ok(34, 0.0);
  CHECK_NOTHROW(signals::filtfilt(c, ok));
}

TEST_CASE("analytic signal of an integer-bin cosine") {
  const std::size_t n = 64;
  std::vector<double> x(n), xs(n);
  for (std::size_t t = 0; t < n; ++t) {
    x[t] = std::cos(kTwoPi * 8.0 * static_cast<double>(t) / 64.0);
    xs[t] = std::sin(kTwoPi * 8.0 * static_cast<double>(t) / 64.0);
  }
  const AnalyticSignal a = signals::analytic_signal(x);
  const AnalyticSignal b = signals::analytic_signal(xs);
  const double step = kTwoPi * 8.0 / 64.0;
  for (std::size_t t = 0; t < n; ++t) {
    CHECK(a.envelope[t] == doctest::Approx(1.0).epsilon(1e-9));
    const double expect = circular::wrap_signed(step * static_cast<double>(t));
    CHECK(std::fabs(circular::wrap_signed(a.phase[t] - expect)) < 1e-9);
    // Hilbert of cos is sin: the sine's phase lags by pi/2
    CHECK(std::fabs(circular::wrap_signed(b.phase[t] - (a.phase[t] - kPi / 2.0))) < 1e-9);
  }
}

TEST_CASE("analytic signal round-trip and reconstruction on band-passed noise") {
  const signals::FilterCoeffs c =
      signals::design_butterworth_bandpass(BandSpec{0.03, 0.07, 5}, 2.0);
  Rng rng = make_rng(17, 0);
  std::vector<double> x(210);
  for (double& v : x) v = rng.normal();
  const std::vector<double> xf = signals::filtfilt(c, x);
  const AnalyticSignal a = signals::analytic_signal(xf);
  for (std::size_t t = 0; t < xf.size(); ++t) {
    const double re = a.envelope[t] * std::cos(a.phase[t]);
    CHECK(re == doctest::Approx(xf[t]).epsilon(1e-9));
    CHECK(a.envelope[t] >= 0.0);
    CHECK(a.phase[t] >= -kPi);
    CHECK(a.phase[t] < kPi);
  }
}

TEST_CASE("analytic signal handles odd lengths") {
  std::vector<double> x(63);
  Rng rng = make_rng(23, 0);
  for (double& v : x) v = rng.normal();
  const AnalyticSignal a = signals::analytic_signal(x);
  for (std::size_t t = 0; t < x.size(); ++t)
    CHECK(a.envelope[t] * std::cos(a.phase[t]) == doctest::Approx(x[t]).epsilon(1e-9));
}

TEST_CASE("analytic signal is linear on the complex output") {
  Rng rng = make_rng(29, 0);
  std::vector<double> x(128), y(128);
  for (double& v : x) v = rng.normal();
  for (double& v : y) v = rng.normal();
  const double ca = 1.7, cb = -0.6;
  std::vector<double> mix(128);
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = ca * x[i] + cb * y[i];

  const AnalyticSignal ax = signals::analytic_signal(x);
  const AnalyticSignal ay = signals::analytic_signal(y);
  const AnalyticSignal am = signals::analytic_signal(mix);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    const std::complex<double> zx = std::polar(ax.envelope[i], ax.phase[i]);
    const std::complex<double> zy = std::polar(ay.envelope[i], ay.phase[i]);
    const std::complex<double> zm = std::polar(am.envelope[i], am.phase[i]);
    CHECK(std::abs(zm - (ca * zx + cb * zy)) < 1e-9);
  }
}

TEST_CASE("analytic signal validates input") {
  std::vector<double> bad(32, 0.0);
  bad[3] = std::nan("");
  CHECK_THROWS_AS(signals::analytic_signal(bad), Error);
  const std::vector<double> tiny(8, 1.0);
  CHECK_THROWS_AS(signals::analytic_signal(tiny), Error);
}

TEST_CASE("extract_phases is deterministic and tracks an in-band tone") {
  const BandSpec band{0.03, 0.07, 5};
  RoiDataset data;
  data.tr_seconds = 2.0;
  data.values = Matrix(2, 420);
  const std::vector<double> tone = cosine_series(420, 0.05, 2.0);
  std::copy(tone.begin(), tone.end(), data.values.row(0).begin());
  std::copy(tone.begin(), tone.end(), data.values.row(1).begin());
  data.region_labels = {"a", "b"};

  const PhaseMatrix phases = signals::extract_phases(data, band);
  REQUIRE(phases.n_regions() == 2);
  REQUIRE(phases.n_samples() == 420);

  // identical rows in, identical phase rows out
  for (std::size_t t = 0; t < 420; ++t)
    CHECK(phases.phases.at(0, t) == phases.phases.at(1, t));

  // interior phase increments approximate 2*pi*f0*TR per sample
  const double expect = kTwoPi * 0.05 * 2.0;
  for (std::size_t t = 42; t + 1 < 378; ++t) {
    const double d =
        circular::wrap_signed(phases.phases.at(0, t + 1) - phases.phases.at(0, t));
    CHECK(std::fabs(d - expect) < 0.05);
  }
}

TEST_CASE("extract_phases output shape matches the dataset") {
  Rng rng = make_rng(31, 0);
  RoiDataset data;
  data.tr_seconds = 2.0;
  data.values = Matrix(21, 210);
  for (double& v : data.values.data()) v = rng.normal();
  const PhaseMatrix phases = signals::extract_phases(data, BandSpec{0.03, 0.07, 5});
  CHECK(phases.n_regions() == 21);
  CHECK(phases.n_samples() == 210);
  for (double p : phases.phases.data()) {
    CHECK(p >= -kPi);
    CHECK(p < kPi);
  }
}
