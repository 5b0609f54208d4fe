#include "phasesync/simharness.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <string>

#include "phasesync/error.hpp"
#include "phasesync/parallel.hpp"
#include "phasesync/psmetrics.hpp"
#include "phasesync/signals.hpp"
#include "phasesync/surrogates.hpp"

namespace phasesync::simharness {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxSurrogateAttempts = 64;

}  // namespace

const char* sim_name(SimId id) {
  switch (id) {
    case SimId::kNullCpp: return "null";
    case SimId::kRamp: return "ramp";
    case SimId::kSigmoid: return "sigmoid";
  }
  return "unknown";
}

std::optional<SimId> sim_from_name(const std::string& name) {
  if (name == "null" || name == "null-cpp") return SimId::kNullCpp;
  if (name == "ramp") return SimId::kRamp;
  if (name == "sigmoid") return SimId::kSigmoid;
  return std::nullopt;
}

void SimConfig::validate() const {
  if (n_samples < 16) fail(ErrorCode::bad_config, "SimConfig: n_samples must be >= 16");
  if (!(tr_seconds > 0.0)) fail(ErrorCode::bad_config, "SimConfig: tr_seconds must be > 0");
  if (!(t0_seconds < static_cast<double>(n_samples) * tr_seconds))
    fail(ErrorCode::bad_config, "SimConfig: t0 must fall inside the sampled interval");
  if (n_realizations < 1) fail(ErrorCode::bad_config, "SimConfig: need at least 1 realization");
  if (!(noise_sd >= 0.0)) fail(ErrorCode::bad_config, "SimConfig: noise_sd must be >= 0");
  band.validate(tr_seconds);
  if (metrics.empty()) fail(ErrorCode::bad_config, "SimConfig: no metrics requested");
  for (std::size_t w : windows)
    if (w < 3 || w > n_samples)
      fail(ErrorCode::bad_config, "SimConfig: window " + std::to_string(w) + " out of range");
}

const SimCell* SimSummary::find(MetricId metric, std::optional<std::size_t> window_length) const {
  for (const SimCell& cell : cells) {
    if (cell.metric != metric) continue;
    if (window_length && (!cell.window || cell.window->length != *window_length)) continue;
    if (!window_length && cell.window) continue;
    return &cell;
  }
  return nullptr;
}

std::pair<std::vector<double>, std::vector<double>> gen_null_pair(const SimConfig& config,
                                                                  Rng& rng) {
  std::vector<double> x(config.n_samples), y(config.n_samples);
  for (double& v : x) v = rng.normal();
  for (double& v : y) v = rng.normal();
  return {std::move(x), std::move(y)};
}

double ramp_shift(const SimConfig& config, std::size_t t) {
  const double ts = static_cast<double>(t) * config.tr_seconds;
  if (ts <= config.t0_seconds) return 0.0;
  if (config.raw_ramp) return 4.0 * kPi * (ts - config.t0_seconds);
  const double t_end = static_cast<double>(config.n_samples - 1) * config.tr_seconds;
  return 4.0 * kPi * (ts - config.t0_seconds) / (t_end - config.t0_seconds);
}

double sigmoid_shift(const SimConfig& config, std::size_t t) {
  const double ts = static_cast<double>(t) * config.tr_seconds;
  return config.sigmoid_a / (1.0 + std::exp(config.sigmoid_b * (ts - config.t0_seconds)));
}

namespace {

std::pair<std::vector<double>, std::vector<double>> gen_shifted_pair(
    const SimConfig& config, Rng& rng, double (*shift_fn)(const SimConfig&, std::size_t)) {
  const double w0 = kTwoPi * config.f0_hz;
  std::vector<double> x(config.n_samples), y(config.n_samples);
  for (std::size_t t = 0; t < config.n_samples; ++t) {
    const double ts = static_cast<double>(t) * config.tr_seconds;
    x[t] = config.amp_x * std::cos(w0 * ts) + config.noise_sd * rng.normal();
  }
  for (std::size_t t = 0; t < config.n_samples; ++t) {
    const double ts = static_cast<double>(t) * config.tr_seconds;
    y[t] = config.amp_y * std::cos(w0 * ts + shift_fn(config, t)) +
           config.noise_sd * rng.normal();
  }
  return {std::move(x), std::move(y)};
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> gen_ramp_pair(const SimConfig& config,
                                                                  Rng& rng) {
  return gen_shifted_pair(config, rng, ramp_shift);
}

std::pair<std::vector<double>, std::vector<double>> gen_sigmoid_pair(const SimConfig& config,
                                                                     Rng& rng) {
  return gen_shifted_pair(config, rng, sigmoid_shift);
}

SummaryRows summarize(const Matrix& replicate_stack, const std::vector<std::uint8_t>& valid,
                      bool se_of_mean) {
  const std::size_t n_reps = replicate_stack.rows();
  const std::size_t n_cols = replicate_stack.cols();
  if (n_reps < 2) fail(ErrorCode::invalid_input, "summarize: need at least 2 replicates");
  if (valid.size() != n_reps * n_cols)
    fail(ErrorCode::shape_mismatch, "summarize: validity mask size mismatch");

  SummaryRows out;
  out.mean.assign(n_cols, kNan);
  out.lower95.assign(n_cols, kNan);
  out.upper95.assign(n_cols, kNan);
  out.n_valid.assign(n_cols, 0);

  for (std::size_t c = 0; c < n_cols; ++c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < n_reps; ++r) {
      if (!valid[r * n_cols + c]) continue;
      sum += replicate_stack.at(r, c);
      ++n;
    }
    out.n_valid[c] = static_cast<std::uint32_t>(n);
    if (n == 0) continue;  // all-missing column stays flagged invalid
    const double mean = sum / static_cast<double>(n);
    out.mean[c] = mean;
    double ss = 0.0;
    for (std::size_t r = 0; r < n_reps; ++r) {
      if (!valid[r * n_cols + c]) continue;
      const double d = replicate_stack.at(r, c) - mean;
      ss += d * d;
    }
    const double sd = (n > 1) ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    const double half = 1.96 * (se_of_mean ? sd / std::sqrt(static_cast<double>(n)) : sd);
    out.lower95[c] = mean - half;
    out.upper95[c] = mean + half;
  }
  return out;
}

SimSummary run_simulation(const SimConfig& config) {
  config.validate();

  struct CellSpec {
    MetricId metric;
    std::optional<WindowSpec> window;
    std::size_t t_out;
  };
  std::vector<CellSpec> cell_specs;
  for (MetricId metric : config.metrics) {
    if (metric == MetricId::kCsw || metric == MetricId::kPwCsw)
      fail(ErrorCode::bad_config, "run_simulation: correlation baselines are not simulated");
    if (metric_is_windowed(metric)) {
      for (std::size_t w : config.windows)
        cell_specs.push_back({metric, WindowSpec{w}, config.n_samples - w + 1});
    } else {
      cell_specs.push_back({metric, std::nullopt, config.n_samples});
    }
  }

  std::vector<Matrix> stacks;
  std::vector<std::vector<std::uint8_t>> valids;
  stacks.reserve(cell_specs.size());
  for (const CellSpec& cs : cell_specs) {
    stacks.emplace_back(config.n_realizations, cs.t_out);
    valids.emplace_back(config.n_realizations * cs.t_out, 0);
  }

  const signals::FilterCoeffs coeffs =
      signals::design_butterworth_bandpass(config.band, config.tr_seconds);
  std::atomic<std::size_t> retries{0};

  parallel_for(config.n_realizations, [&](std::size_t rep) {
    std::vector<double> phi_x, phi_y;
    bool done = false;
    for (int attempt = 0; attempt < kMaxSurrogateAttempts && !done; ++attempt) {
      Rng rng = make_rng(config.seed,
                         rep + static_cast<std::uint64_t>(attempt) * config.n_realizations);
      auto [x, y] = (config.sim_id == SimId::kNullCpp)  ? gen_null_pair(config, rng)
                    : (config.sim_id == SimId::kRamp)   ? gen_ramp_pair(config, rng)
                                                        : gen_sigmoid_pair(config, rng);
      if (config.filtering) {
        x = signals::filtfilt(coeffs, x);
        y = signals::filtfilt(coeffs, y);
      }
      phi_x = signals::analytic_signal(x).phase;
      phi_y = signals::analytic_signal(y).phase;
      if (config.sim_id == SimId::kNullCpp) {
        try {
          phi_y = surrogates::cpp_surrogate(phi_y, rng);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::too_few_cycles) throw;
          retries.fetch_add(1);
          continue;  // next sub-stream
        }
      }
      done = true;
    }
    if (!done)
      fail(ErrorCode::too_few_cycles, "run_simulation: surrogate generation kept failing");

    for (std::size_t ci = 0; ci < cell_specs.size(); ++ci) {
      const CellSpec& cs = cell_specs[ci];
      const PsSeries series =
          cs.window ? psmetrics::sliding_apply(cs.metric, phi_x, phi_y, *cs.window)
                    : psmetrics::instantaneous_series(cs.metric, phi_x, phi_y);
      auto row = stacks[ci].row(rep);
      std::copy(series.values.begin(), series.values.end(), row.begin());
      std::copy(series.valid.begin(), series.valid.end(),
                valids[ci].begin() + rep * cs.t_out);
    }
  });

  SimSummary summary;
  summary.config = config;
  summary.surrogate_retries = retries.load();
  for (std::size_t ci = 0; ci < cell_specs.size(); ++ci) {
    const CellSpec& cs = cell_specs[ci];
    SummaryRows rows = summarize(stacks[ci], valids[ci], config.band_se_of_mean);
    SimCell cell;
    cell.metric = cs.metric;
    cell.window = cs.window;
    cell.time_offset = cs.window ? cs.window->length - 1 : 0;
    cell.mean = std::move(rows.mean);
    cell.lower95 = std::move(rows.lower95);
    cell.upper95 = std::move(rows.upper95);
    cell.n_valid = std::move(rows.n_valid);
    summary.cells.push_back(std::move(cell));
  }
  return summary;
}

}  // namespace phasesync::simharness
