#include "phasesync/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "phasesync/psmetrics.hpp"
#include "phasesync/rng.hpp"
#include "phasesync/signals.hpp"
#include "phasesync/simharness.hpp"
#include "phasesync/types.hpp"

namespace phasesync::oracle {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double plv_direct(std::span<const double> delta_phi) {
  std::complex<double> acc(0.0, 0.0);
  for (double d : delta_phi) acc += std::exp(std::complex<double>(0.0, d));
  return std::abs(acc) / static_cast<double>(delta_phi.size());
}

double circ_circ_direct(std::span<const double> phi_x, std::span<const double> phi_y) {
  const std::size_t n = phi_x.size();
  double sx = 0.0, cx = 0.0, sy = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += std::sin(phi_x[i]);
    cx += std::cos(phi_x[i]);
    sy += std::sin(phi_y[i]);
    cy += std::cos(phi_y[i]);
  }
  if (std::hypot(sx, cx) <= 1e-12 || std::hypot(sy, cy) <= 1e-12) return kNan;
  const double mu = std::atan2(sx, cx);
  const double nu = std::atan2(sy, cy);
  double num = 0.0, den_x = 0.0, den_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::sin(phi_x[i] - mu);
    const double dy = std::sin(phi_y[i] - nu);
    num += dx * dy;
    den_x += dx * dx;
    den_y += dy * dy;
  }
  if (den_x < 1e-12 || den_y < 1e-12) return kNan;
  return num / std::sqrt(den_x * den_y);
}

double toroidal_direct(std::span<const double> phi_x, std::span<const double> phi_y) {
  const std::size_t n = phi_x.size();
  auto wrap_pos = [](double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
  };
  auto h = [](double d) { return std::fmod(d + kTwoPi, kTwoPi) - kPi; };
  double num = 0.0, den_x = 0.0, den_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double hx = h(wrap_pos(phi_x[i]) - wrap_pos(phi_x[j]));
      const double hy = h(wrap_pos(phi_y[i]) - wrap_pos(phi_y[j]));
      num += hx * hy;
      den_x += hx * hx;
      den_y += hy * hy;
    }
  }
  if (den_x < 1e-12 || den_y < 1e-12) return kNan;
  return num / std::sqrt(den_x * den_y);
}

double pearson_direct(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double num = 0.0, den_x = 0.0, den_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den_x += (x[i] - mx) * (x[i] - mx);
    den_y += (y[i] - my) * (y[i] - my);
  }
  if (den_x <= 0.0 || den_y <= 0.0) return kNan;
  return num / std::sqrt(den_x * den_y);
}

std::complex<double> freq_response(const std::vector<double>& b, const std::vector<double>& a,
                                   double freq_hz, double tr_seconds) {
  const double w = kTwoPi * freq_hz * tr_seconds;
  std::complex<double> num(0.0, 0.0), den(0.0, 0.0);
  for (std::size_t k = 0; k < b.size(); ++k)
    num += b[k] * std::exp(std::complex<double>(0.0, -w * static_cast<double>(k)));
  for (std::size_t k = 0; k < a.size(); ++k)
    den += a[k] * std::exp(std::complex<double>(0.0, -w * static_cast<double>(k)));
  return num / den;
}

namespace {

struct DevTracker {
  double max_dev = 0.0;
  void add(double kernel_value, double oracle_value) {
    if (std::isnan(kernel_value) && std::isnan(oracle_value)) return;
    max_dev = std::max(max_dev, std::fabs(kernel_value - oracle_value));
  }
};

std::vector<double> random_phases(std::size_t n, Rng& rng) {
  std::vector<double> out(n);
  for (double& v : out) v = -kPi + kTwoPi * rng.uniform01();
  return out;
}

OracleEntry estimator_entry(const std::string& name, double max_dev, double tol) {
  OracleEntry e;
  e.name = name;
  e.max_abs_dev = max_dev;
  e.pass = max_dev <= tol;
  e.detail = "max |kernel - oracle| = " + std::to_string(max_dev);
  return e;
}

}  // namespace

OracleReport run_oracle_suite(std::uint64_t seed, std::size_t n_cases, double perturb_toroidal) {
  OracleReport report;
  constexpr double kTol = 1e-12;

  // Windowed estimators vs their brute-force counterparts on random windows.
  DevTracker plv_dev, circ_dev, tor_dev, csw_dev;
  {
    Rng rng = make_rng(seed, 0);
    for (std::size_t c = 0; c < n_cases; ++c) {
      const std::size_t len = 4 + static_cast<std::size_t>(rng.uniform_below(29));  // 4..32
      const std::vector<double> px = random_phases(len, rng);
      const std::vector<double> py = random_phases(len, rng);

      plv_dev.add(psmetrics::plv_window(psmetrics::phase_difference(px, py)),
                  plv_direct(psmetrics::phase_difference(px, py)));

      const auto cc = psmetrics::circ_circ_window(px, py);
      circ_dev.add(cc ? *cc : kNan, circ_circ_direct(px, py));

      const auto tor = psmetrics::toroidal_window(px, py);
      tor_dev.add((tor ? *tor : kNan) + perturb_toroidal, toroidal_direct(px, py));

      std::vector<double> x(len), y(len);
      for (double& v : x) v = rng.normal();
      for (double& v : y) v = rng.normal();
      const auto cs = psmetrics::csw_window(x, y);
      csw_dev.add(cs ? *cs : kNan, pearson_direct(x, y));
    }
  }
  report.entries.push_back(estimator_entry("plv vs direct complex sum", plv_dev.max_dev, kTol));
  report.entries.push_back(estimator_entry("circ-circ vs direct formula", circ_dev.max_dev, kTol));
  report.entries.push_back(estimator_entry("toroidal vs brute-force pairs", tor_dev.max_dev, kTol));
  report.entries.push_back(estimator_entry("csw vs textbook correlation", csw_dev.max_dev, kTol));

  // Sliding output at a random index equals the kernel on the slice.
  {
    Rng rng = make_rng(seed, 1);
    DevTracker dev;
    for (std::size_t c = 0; c < std::max<std::size_t>(n_cases / 10, 10); ++c) {
      const std::size_t t_total = 40 + static_cast<std::size_t>(rng.uniform_below(81));
      const std::size_t len = 4 + static_cast<std::size_t>(rng.uniform_below(29));
      const std::vector<double> px = random_phases(t_total, rng);
      const std::vector<double> py = random_phases(t_total, rng);
      const PsSeries s = psmetrics::sliding_apply(MetricId::kPlv, px, py, WindowSpec{len});
      const std::size_t idx = static_cast<std::size_t>(rng.uniform_below(s.values.size()));
      const std::vector<double> delta = psmetrics::phase_difference(
          std::span(px).subspan(idx, len), std::span(py).subspan(idx, len));
      dev.add(s.values[idx], plv_direct(delta));
    }
    report.entries.push_back(estimator_entry("sliding window vs slice recompute", dev.max_dev, kTol));
  }

  // Filter frequency response oracle: DC gain zero, passband near unity and
  // above the stopband samples.
  {
    const BandSpec band{0.03, 0.07, 5};
    const double tr = 2.0;
    const signals::FilterCoeffs coeffs = signals::design_butterworth_bandpass(band, tr);
    const double g_dc = std::abs(freq_response(coeffs.b, coeffs.a, 0.0, tr));
    const double g_center = std::abs(freq_response(coeffs.b, coeffs.a, 0.05, tr));
    const double g_low = std::abs(freq_response(coeffs.b, coeffs.a, 0.01, tr));
    const double g_high = std::abs(freq_response(coeffs.b, coeffs.a, 0.13, tr));
    OracleEntry e;
    e.name = "butterworth frequency response";
    e.max_abs_dev = g_dc;
    e.pass = g_dc <= 1e-10 && g_center >= 1.0 / std::sqrt(2.0) && g_center <= 1.0 + 1e-9 &&
             g_center > g_low && g_center > g_high;
    e.detail = "|H(0)|=" + std::to_string(g_dc) + " |H(.05)|=" + std::to_string(g_center) +
               " |H(.01)|=" + std::to_string(g_low) + " |H(.13)|=" + std::to_string(g_high);
    report.entries.push_back(e);
  }

  // Band coverage: mean +/- 1.96 SD should hold ~95% of Gaussian draws.
  {
    Rng rng = make_rng(seed, 2);
    const std::size_t reps = 400;
    const std::size_t cols = 50;
    Matrix stack(reps, cols);
    for (double& v : stack.data()) v = rng.normal();
    const std::vector<std::uint8_t> valid(reps * cols, 1);
    const simharness::SummaryRows rows = simharness::summarize(stack, valid);
    std::size_t inside = 0;
    for (std::size_t r = 0; r < reps; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        if (stack.at(r, c) >= rows.lower95[c] && stack.at(r, c) <= rows.upper95[c]) ++inside;
    const double cover = static_cast<double>(inside) / static_cast<double>(reps * cols);
    OracleEntry e;
    e.name = "95% band coverage on gaussian columns";
    e.max_abs_dev = std::fabs(cover - 0.95);
    e.pass = cover > 0.93 && cover < 0.97;
    e.detail = "coverage = " + std::to_string(cover);
    report.entries.push_back(e);
  }

  for (const OracleEntry& e : report.entries) report.all_pass = report.all_pass && e.pass;
  return report;
}

}  // namespace phasesync::oracle
