#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "phasesync/simharness.hpp"
#include "phasesync/types.hpp"

namespace phasesync::cli {

// Each command prints diagnostics to stderr and returns the process exit
// code: 0 success, 1 compute failure, 2 configuration/input failure.

struct SimulateOptions {
  simharness::SimConfig config;
  std::string out_dir = ".";
};
int cmd_simulate(const SimulateOptions& options);

struct AnalyzeOptions {
  std::string manifest_path;
  std::string out_dir = ".";
  std::vector<MetricId> metrics = {MetricId::kPlv,       MetricId::kCircCirc,
                                   MetricId::kToroidal,  MetricId::kCoherence,
                                   MetricId::kCrp,       MetricId::kCsw,
                                   MetricId::kPwCsw};
  std::size_t window_length = 28;
  BandSpec band{0.03, 0.07, 5};
  bool write_csv = true;
  bool write_binary = true;
  bool write_phases = false;  // also emit per-subject phase matrices as CSV
};
int cmd_analyze(const AnalyzeOptions& options);

struct StatesOptions {
  std::vector<std::string> tensor_files;  // used when non-empty, else input_dir is scanned
  std::string input_dir;
  std::optional<MetricId> metric_filter;
  std::optional<std::size_t> forced_k = 2;
  std::pair<std::size_t, std::size_t> k_range{2, 6};
  std::size_t restarts = 200;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  bool kmeans_plus_plus = false;
};
int cmd_states(const StatesOptions& options);

struct OracleOptions {
  std::uint64_t seed = 20260101;
  std::size_t n_cases = 1000;
  double perturb_toroidal = 0.0;  // test fixture: bias the toroidal kernel
};
int cmd_oracle_check(const OracleOptions& options, std::ostream& out);

// Full flag-parsing entry point used by the binary.
int run_main(int argc, const char* const* argv);

}  // namespace phasesync::cli
