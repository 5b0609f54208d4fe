#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phasesync/error.hpp"

namespace phasesync {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Dense row-major matrix of doubles. Rows are series (regions/pairs),
// columns are time points.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// R regions x T samples of real-valued signal with its sampling interval.
struct RoiDataset {
  Matrix values;  // [R x T]
  double tr_seconds = 0.0;
  std::vector<std::string> region_labels;

  std::size_t n_regions() const noexcept { return values.rows(); }
  std::size_t n_samples() const noexcept { return values.cols(); }

  void validate() const {
    if (n_regions() < 1) fail(ErrorCode::invalid_input, "RoiDataset: need at least one region");
    if (n_samples() < 16) fail(ErrorCode::invalid_input, "RoiDataset: need at least 16 samples");
    if (!(tr_seconds > 0.0)) fail(ErrorCode::invalid_input, "RoiDataset: tr_seconds must be > 0");
    if (!region_labels.empty() && region_labels.size() != n_regions())
      fail(ErrorCode::invalid_input, "RoiDataset: label count does not match region count");
    for (double v : values.data())
      if (!std::isfinite(v)) fail(ErrorCode::invalid_input, "RoiDataset: non-finite sample");
  }
};

// Band-pass specification. Edges must lie strictly inside (0, Nyquist).
struct BandSpec {
  double low_hz = 0.03;
  double high_hz = 0.07;
  int order = 5;

  void validate(double tr_seconds) const {
    if (order < 1) fail(ErrorCode::invalid_order, "BandSpec: order must be >= 1");
    const double nyquist = 0.5 / tr_seconds;
    if (!(low_hz > 0.0) || !(high_hz > low_hz) || !(high_hz < nyquist))
      fail(ErrorCode::invalid_band,
           "BandSpec: need 0 < low < high < Nyquist (" + std::to_string(nyquist) + " Hz)");
  }
};

// Envelope and wrapped instantaneous phase of one series.
struct AnalyticSignal {
  std::vector<double> envelope;      // >= 0
  std::vector<double> phase;         // [-pi, pi)
};

// R x T wrapped instantaneous phases.
struct PhaseMatrix {
  Matrix phases;  // [R x T], radians in [-pi, pi)
  double tr_seconds = 0.0;

  std::size_t n_regions() const noexcept { return phases.rows(); }
  std::size_t n_samples() const noexcept { return phases.cols(); }
};

enum class MetricId : std::uint32_t {
  kPlv = 0,
  kCircCirc = 1,
  kToroidal = 2,
  kCoherence = 3,
  kCrp = 4,
  kCsw = 5,
  kPwCsw = 6,
};

const char* metric_name(MetricId id);
std::optional<MetricId> metric_from_name(const std::string& name);

// PLV and coherence live in [0,1]; everything else in [-1,1].
inline std::pair<double, double> metric_range(MetricId id) {
  return (id == MetricId::kPlv || id == MetricId::kCoherence) ? std::pair{0.0, 1.0}
                                                              : std::pair{-1.0, 1.0};
}

inline bool metric_is_windowed(MetricId id) {
  return id == MetricId::kPlv || id == MetricId::kCircCirc || id == MetricId::kToroidal ||
         id == MetricId::kCsw || id == MetricId::kPwCsw;
}

// Trailing window of L samples: the window ending at time t covers
// samples [t-L+1 .. t] and the output is indexed at t.
struct WindowSpec {
  std::size_t length = 2;

  void validate(std::size_t n_samples) const {
    if (length < 2) fail(ErrorCode::invalid_input, "WindowSpec: length must be >= 2");
    if (length > n_samples)
      fail(ErrorCode::window_too_long, "WindowSpec: window longer than series");
  }
};

// One synchronization series. values[i] corresponds to absolute time index
// time_offset + i; degenerate windows carry valid[i] == 0 and a NaN value.
struct PsSeries {
  std::vector<double> values;
  std::vector<std::uint8_t> valid;
  MetricId metric = MetricId::kPlv;
  std::optional<WindowSpec> window;
  std::size_t time_offset = 0;

  std::size_t size() const noexcept { return values.size(); }
};

// Per-pair synchronization series stacked into a [P x T'] matrix.
// pair_index[p] = (i, j) with i < j; rows follow the column-major lower
// triangle of the R x R matrix: (0,1), (0,2), (1,2), (0,3), ...
struct PsTensor {
  Matrix values;                                    // [P x T']
  std::vector<std::uint8_t> valid;                  // parallel to values, row-major
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pair_index;
  MetricId metric = MetricId::kPlv;
  std::optional<WindowSpec> window;
  std::size_t time_offset = 0;
  std::uint32_t n_regions = 0;

  std::size_t n_pairs() const noexcept { return values.rows(); }
  std::size_t n_times() const noexcept { return values.cols(); }
};

// Deterministic pair ordering shared by PsTensor producers and consumers.
std::vector<std::pair<std::uint32_t, std::uint32_t>> lower_triangle_pairs(std::uint32_t n_regions);

}  // namespace phasesync
