#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "phasesync/rng.hpp"
#include "phasesync/types.hpp"

namespace phasesync::simharness {

enum class SimId { kNullCpp, kRamp, kSigmoid };

const char* sim_name(SimId id);
std::optional<SimId> sim_from_name(const std::string& name);

struct SimConfig {
  SimId sim_id = SimId::kNullCpp;
  double tr_seconds = 2.0;
  std::size_t n_samples = 210;
  double f0_hz = 0.05;
  double t0_seconds = 170.0;
  double sigmoid_a = kTwoPi;
  double sigmoid_b = -0.01;
  double amp_x = 1.0;
  double amp_y = 1.0;
  double noise_sd = 1.0;
  BandSpec band{0.03, 0.07, 5};
  std::vector<std::size_t> windows{30, 60, 120};
  std::vector<MetricId> metrics{MetricId::kPlv, MetricId::kCircCirc, MetricId::kToroidal,
                                MetricId::kCoherence, MetricId::kCrp};
  std::size_t n_realizations = 1000;
  std::uint64_t seed = 0;
  bool filtering = true;

  // Ramp shift normalized to reach 4pi at the final sample; the raw
  // unbounded reading 4pi*(t - t0) is available behind this flag.
  bool raw_ramp = false;

  // Band half-width: 1.96 * SD across replicates by default; SD/sqrt(n)
  // (standard error of the mean) behind this flag.
  bool band_se_of_mean = false;

  void validate() const;
};

// Per-time-point mean and 95% band for one metric/window cell.
struct SimCell {
  MetricId metric = MetricId::kPlv;
  std::optional<WindowSpec> window;
  std::size_t time_offset = 0;
  std::vector<double> mean;
  std::vector<double> lower95;
  std::vector<double> upper95;
  std::vector<std::uint32_t> n_valid;
};

struct SimSummary {
  SimConfig config;
  std::vector<SimCell> cells;
  std::size_t surrogate_retries = 0;

  const SimCell* find(MetricId metric, std::optional<std::size_t> window_length) const;
};

// Signal generators. Each consumes the stream in a fixed order (all of x,
// then all of y), so a replicate is a pure function of (seed, stream id).
std::pair<std::vector<double>, std::vector<double>> gen_null_pair(const SimConfig& config,
                                                                  Rng& rng);
std::pair<std::vector<double>, std::vector<double>> gen_ramp_pair(const SimConfig& config,
                                                                  Rng& rng);
std::pair<std::vector<double>, std::vector<double>> gen_sigmoid_pair(const SimConfig& config,
                                                                     Rng& rng);

// Deterministic phase-shift trajectories (radians, at sample index t).
double ramp_shift(const SimConfig& config, std::size_t t);
double sigmoid_shift(const SimConfig& config, std::size_t t);

// Pointwise mean, sample SD and mean +/- 1.96*SD band over the valid
// entries of a replicate stack [n_realizations x T'].
struct SummaryRows {
  std::vector<double> mean;
  std::vector<double> lower95;
  std::vector<double> upper95;
  std::vector<std::uint32_t> n_valid;
};
SummaryRows summarize(const Matrix& replicate_stack, const std::vector<std::uint8_t>& valid,
                      bool se_of_mean = false);

// Full Monte-Carlo loop: generate -> (filter) -> phases -> (sim 1: CPP on
// one phase series) -> metrics -> pointwise summary. Replicates run in
// parallel on private RNG sub-streams; replicate r attempt k uses stream
// r + k*n_realizations, so failed surrogate draws are re-drawn
// deterministically and counted.
SimSummary run_simulation(const SimConfig& config);

}  // namespace phasesync::simharness
