#include "phasesync/psmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "phasesync/circular.hpp"
#include "phasesync/error.hpp"
#include "phasesync/kernels.hpp"
#include "phasesync/parallel.hpp"

namespace phasesync::psmetrics {

namespace {

constexpr double kDegenerate = 1e-12;
constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

double clamp_range(double v, MetricId metric) {
  const auto [lo, hi] = metric_range(metric);
  return std::clamp(v, lo, hi);
}

std::size_t min_window(MetricId metric) { return metric == MetricId::kPlv ? 2 : 3; }

void check_pair_lengths(std::span<const double> a, std::span<const double> b, const char* who) {
  if (a.size() != b.size())
    fail(ErrorCode::shape_mismatch, std::string(who) + ": series lengths differ");
}

// Window circular mean from precomputed sin/cos arrays; nullopt when the
// resultant is too short for a direction.
std::optional<double> window_mean(const double* sin_v, const double* cos_v, std::size_t n,
                                  const kernels::Ops& ops) {
  const double s = ops.sum(sin_v, n);
  const double c = ops.sum(cos_v, n);
  if (std::hypot(s, c) <= kDegenerate) return std::nullopt;
  return std::atan2(s, c);
}

std::optional<double> circ_circ_sums(const double* sx, const double* cx, const double* sy,
                                     const double* cy, std::size_t n, const kernels::Ops& ops) {
  const auto mu = window_mean(sx, cx, n, ops);
  const auto nu = window_mean(sy, cy, n, ops);
  if (!mu || !nu) return std::nullopt;
  double sums[3];
  ops.circ_dev_sums(sx, cx, sy, cy, n, std::sin(*mu), std::cos(*mu), std::sin(*nu),
                    std::cos(*nu), sums);
  if (sums[1] < kDegenerate || sums[2] < kDegenerate) return std::nullopt;
  return clamp_range(sums[0] / std::sqrt(sums[1] * sums[2]), MetricId::kCircCirc);
}

std::optional<double> toroidal_sums(const double* px, const double* py, std::size_t n,
                                    const kernels::Ops& ops) {
  double sums[3];
  ops.toroidal_sums(px, py, n, sums);
  if (sums[1] < kDegenerate || sums[2] < kDegenerate) return std::nullopt;
  return clamp_range(sums[0] / std::sqrt(sums[1] * sums[2]), MetricId::kToroidal);
}

// Two-pass Pearson; the variance guard scales with the window mean so a
// constant window is missing even when the mean subtraction leaves rounding
// dust.
std::optional<double> pearson(const double* x, const double* y, std::size_t n,
                              std::vector<double>& dx, std::vector<double>& dy,
                              const kernels::Ops& ops) {
  dx.resize(n);
  dy.resize(n);
  const double mx = ops.sum(x, n) / static_cast<double>(n);
  const double my = ops.sum(y, n) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) dx[i] = x[i] - mx;
  for (std::size_t i = 0; i < n; ++i) dy[i] = y[i] - my;
  const double sxx = ops.dot(dx.data(), dx.data(), n);
  const double syy = ops.dot(dy.data(), dy.data(), n);
  const double guard_x = static_cast<double>(n) * 1e-24 * (1.0 + mx * mx);
  const double guard_y = static_cast<double>(n) * 1e-24 * (1.0 + my * my);
  if (sxx <= guard_x || syy <= guard_y) return std::nullopt;
  const double sxy = ops.dot(dx.data(), dy.data(), n);
  return clamp_range(sxy / std::sqrt(sxx * syy), MetricId::kCsw);
}

}  // namespace

std::vector<double> phase_difference(std::span<const double> phi_x,
                                     std::span<const double> phi_y) {
  check_pair_lengths(phi_x, phi_y, "phase_difference");
  std::vector<double> out(phi_x.size());
  for (std::size_t i = 0; i < phi_x.size(); ++i)
    out[i] = circular::wrap_signed(phi_x[i] - phi_y[i]);
  return out;
}

double plv_window(std::span<const double> delta_phi) {
  if (delta_phi.size() < 2) fail(ErrorCode::invalid_input, "plv_window: need at least 2 samples");
  double s = 0.0, c = 0.0;
  for (double d : delta_phi) {
    s += std::sin(d);
    c += std::cos(d);
  }
  return clamp_range(std::hypot(s, c) / static_cast<double>(delta_phi.size()), MetricId::kPlv);
}

std::optional<double> circ_circ_window(std::span<const double> phi_x,
                                       std::span<const double> phi_y) {
  check_pair_lengths(phi_x, phi_y, "circ_circ_window");
  const std::size_t n = phi_x.size();
  if (n < 3) fail(ErrorCode::invalid_input, "circ_circ_window: need at least 3 samples");
  std::vector<double> sx(n), cx(n), sy(n), cy(n);
  for (std::size_t i = 0; i < n; ++i) {
    sx[i] = std::sin(phi_x[i]);
    cx[i] = std::cos(phi_x[i]);
    sy[i] = std::sin(phi_y[i]);
    cy[i] = std::cos(phi_y[i]);
  }
  return circ_circ_sums(sx.data(), cx.data(), sy.data(), cy.data(), n, kernels::active_ops());
}

std::optional<double> toroidal_window(std::span<const double> phi_x,
                                      std::span<const double> phi_y) {
  check_pair_lengths(phi_x, phi_y, "toroidal_window");
  const std::size_t n = phi_x.size();
  if (n < 3) fail(ErrorCode::invalid_input, "toroidal_window: need at least 3 samples");
  std::vector<double> px(n), py(n);
  for (std::size_t i = 0; i < n; ++i) {
    px[i] = circular::wrap_positive(phi_x[i]);
    py[i] = circular::wrap_positive(phi_y[i]);
  }
  return toroidal_sums(px.data(), py.data(), n, kernels::active_ops());
}

std::vector<double> phase_coherence(std::span<const double> delta_phi) {
  std::vector<double> out(delta_phi.size());
  for (std::size_t i = 0; i < delta_phi.size(); ++i)
    out[i] = clamp_range(1.0 - std::fabs(std::sin(delta_phi[i])), MetricId::kCoherence);
  return out;
}

std::vector<double> crp(std::span<const double> delta_phi) {
  std::vector<double> out(delta_phi.size());
  for (std::size_t i = 0; i < delta_phi.size(); ++i)
    out[i] = clamp_range(std::cos(delta_phi[i]), MetricId::kCrp);
  return out;
}

std::optional<double> csw_window(std::span<const double> x, std::span<const double> y) {
  check_pair_lengths(x, y, "csw_window");
  if (x.size() < 3) fail(ErrorCode::invalid_input, "csw_window: need at least 3 samples");
  std::vector<double> dx, dy;
  return pearson(x.data(), y.data(), x.size(), dx, dy, kernels::active_ops());
}

std::vector<double> prewhiten_ar1(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 8) fail(ErrorCode::invalid_input, "prewhiten_ar1: need at least 8 samples");
  const kernels::Ops& ops = kernels::active_ops();
  const double mean = ops.sum(x.data(), n) / static_cast<double>(n);
  double c0 = 0.0, c1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - mean;
    c0 += d * d;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) c1 += (x[i] - mean) * (x[i + 1] - mean);
  if (c0 <= static_cast<double>(n) * 1e-24 * (1.0 + mean * mean))
    fail(ErrorCode::degenerate_series, "prewhiten_ar1: zero variance");
  const double rho = c1 / c0;
  std::vector<double> out(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) out[i] = x[i + 1] - rho * x[i];
  return out;
}

PsSeries sliding_apply(MetricId metric, std::span<const double> a, std::span<const double> b,
                       WindowSpec window) {
  check_pair_lengths(a, b, "sliding_apply");
  if (!metric_is_windowed(metric))
    fail(ErrorCode::invalid_input, "sliding_apply: metric is not windowed");
  if (a.size() < window.length)
    fail(ErrorCode::window_too_long, "sliding_apply: window longer than series");
  window.validate(a.size());
  if (window.length < min_window(metric))
    fail(ErrorCode::invalid_input, "sliding_apply: window too short for metric");

  const std::size_t t_total = a.size();
  const std::size_t len = window.length;
  const std::size_t t_out = t_total - len + 1;
  const kernels::Ops& ops = kernels::active_ops();

  PsSeries series;
  series.metric = metric;
  series.window = window;
  series.time_offset = len - 1;
  series.values.assign(t_out, kMissing);
  series.valid.assign(t_out, 0);

  auto emit = [&](std::size_t i, std::optional<double> v) {
    if (v) {
      series.values[i] = *v;
      series.valid[i] = 1;
    }
  };

  switch (metric) {
    case MetricId::kPlv: {
      const std::vector<double> delta = phase_difference(a, b);
      std::vector<double> sd(t_total), cd(t_total);
      for (std::size_t i = 0; i < t_total; ++i) {
        sd[i] = std::sin(delta[i]);
        cd[i] = std::cos(delta[i]);
      }
      for (std::size_t i = 0; i < t_out; ++i) {
        const double s = ops.sum(sd.data() + i, len);
        const double c = ops.sum(cd.data() + i, len);
        emit(i, clamp_range(std::hypot(s, c) / static_cast<double>(len), MetricId::kPlv));
      }
      break;
    }
    case MetricId::kCircCirc: {
      std::vector<double> sx(t_total), cx(t_total), sy(t_total), cy(t_total);
      for (std::size_t i = 0; i < t_total; ++i) {
        sx[i] = std::sin(a[i]);
        cx[i] = std::cos(a[i]);
        sy[i] = std::sin(b[i]);
        cy[i] = std::cos(b[i]);
      }
      for (std::size_t i = 0; i < t_out; ++i)
        emit(i, circ_circ_sums(sx.data() + i, cx.data() + i, sy.data() + i, cy.data() + i, len,
                               ops));
      break;
    }
    case MetricId::kToroidal: {
      std::vector<double> px(t_total), py(t_total);
      for (std::size_t i = 0; i < t_total; ++i) {
        px[i] = circular::wrap_positive(a[i]);
        py[i] = circular::wrap_positive(b[i]);
      }
      for (std::size_t i = 0; i < t_out; ++i)
        emit(i, toroidal_sums(px.data() + i, py.data() + i, len, ops));
      break;
    }
    case MetricId::kCsw:
    case MetricId::kPwCsw: {
      std::vector<double> dx, dy;
      for (std::size_t i = 0; i < t_out; ++i)
        emit(i, pearson(a.data() + i, b.data() + i, len, dx, dy, ops));
      break;
    }
    default:
      fail(ErrorCode::invalid_input, "sliding_apply: unsupported metric");
  }
  return series;
}

PsSeries instantaneous_series(MetricId metric, std::span<const double> phi_x,
                              std::span<const double> phi_y) {
  if (metric != MetricId::kCoherence && metric != MetricId::kCrp)
    fail(ErrorCode::invalid_input, "instantaneous_series: metric is windowed");
  const std::vector<double> delta = phase_difference(phi_x, phi_y);
  PsSeries series;
  series.metric = metric;
  series.time_offset = 0;
  series.values = (metric == MetricId::kCoherence) ? phase_coherence(delta) : crp(delta);
  series.valid.assign(series.values.size(), 1);
  return series;
}

namespace {

PsTensor pairwise_impl(const Matrix& rows, MetricId metric, std::optional<WindowSpec> window) {
  const std::size_t r_total = rows.rows();
  if (r_total < 2) fail(ErrorCode::invalid_input, "pairwise_tensor: need at least 2 regions");

  const bool windowed = metric_is_windowed(metric);
  if (windowed && !window)
    fail(ErrorCode::invalid_input, "pairwise_tensor: windowed metric needs a window");
  if (!windowed && window)
    fail(ErrorCode::invalid_input, "pairwise_tensor: instantaneous metric takes no window");

  // PW-CSW rows lose one leading sample to the AR(1) residual.
  Matrix prewhitened;
  const Matrix* src = &rows;
  std::size_t extra_offset = 0;
  if (metric == MetricId::kPwCsw) {
    prewhitened = Matrix(r_total, rows.cols() - 1);
    for (std::size_t r = 0; r < r_total; ++r) {
      const std::vector<double> e = prewhiten_ar1(rows.row(r));
      std::copy(e.begin(), e.end(), prewhitened.row(r).begin());
    }
    src = &prewhitened;
    extra_offset = 1;
  }

  const auto pairs = lower_triangle_pairs(static_cast<std::uint32_t>(r_total));
  const std::size_t t_src = src->cols();
  const std::size_t t_out = windowed ? t_src - window->length + 1 : t_src;

  PsTensor tensor;
  tensor.metric = metric;
  tensor.window = window;
  tensor.n_regions = static_cast<std::uint32_t>(r_total);
  tensor.pair_index = pairs;
  tensor.time_offset = (windowed ? window->length - 1 : 0) + extra_offset;
  tensor.values = Matrix(pairs.size(), t_out);
  tensor.valid.assign(pairs.size() * t_out, 0);

  parallel_for(pairs.size(), [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    PsSeries s;
    if (windowed)
      s = sliding_apply(metric, src->row(i), src->row(j), *window);
    else
      s = instantaneous_series(metric, src->row(i), src->row(j));
    std::copy(s.values.begin(), s.values.end(), tensor.values.row(p).begin());
    std::copy(s.valid.begin(), s.valid.end(), tensor.valid.begin() + p * t_out);
  });

  return tensor;
}

}  // namespace

PsTensor pairwise_tensor(const PhaseMatrix& phases, MetricId metric,
                         std::optional<WindowSpec> window) {
  if (metric == MetricId::kCsw || metric == MetricId::kPwCsw)
    fail(ErrorCode::invalid_input, "pairwise_tensor: correlation metrics need signal input");
  return pairwise_impl(phases.phases, metric, window);
}

PsTensor pairwise_tensor_from_signals(const Matrix& signals, MetricId metric,
                                      WindowSpec window) {
  if (metric != MetricId::kCsw && metric != MetricId::kPwCsw)
    fail(ErrorCode::invalid_input, "pairwise_tensor_from_signals: phase metrics need phases");
  return pairwise_impl(signals, metric, window);
}

}  // namespace phasesync::psmetrics
