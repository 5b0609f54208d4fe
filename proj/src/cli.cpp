#include "phasesync/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config_file.hpp"
#include "phasesync/error.hpp"
#include "phasesync/io.hpp"
#include "phasesync/kernels.hpp"
#include "phasesync/oracle.hpp"
#include "phasesync/parallel.hpp"
#include "phasesync/psmetrics.hpp"
#include "phasesync/signals.hpp"
#include "phasesync/states.hpp"

namespace phasesync::cli {

namespace fs = std::filesystem;

namespace {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::degenerate_series:
    case ErrorCode::too_few_cycles:
    case ErrorCode::undefined_mean:
      return 1;
    default:
      return 2;
  }
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec && !fs::is_directory(out_dir))
    fail(ErrorCode::bad_config, "cannot create output directory: " + out_dir);
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    fail(ErrorCode::bad_config, what + ": cannot parse number '" + s + "'");
  }
}

std::vector<MetricId> parse_metric_list(const std::vector<std::string>& names) {
  std::vector<MetricId> out;
  for (const std::string& name : names) {
    const auto id = metric_from_name(name);
    if (!id) fail(ErrorCode::bad_config, "unknown metric: " + name);
    out.push_back(*id);
  }
  if (out.empty()) fail(ErrorCode::bad_config, "empty metric list");
  return out;
}

nlohmann::json band_json(const BandSpec& band) {
  return {{"low_hz", band.low_hz}, {"high_hz", band.high_hz}, {"order", band.order}};
}

std::string filter_tag(bool on) { return on ? "on" : "off"; }

}  // namespace

int cmd_simulate(const SimulateOptions& options) {
  return guarded([&] {
    options.config.validate();
    ensure_out_dir(options.out_dir);
    const auto t_start = std::chrono::steady_clock::now();

    const simharness::SimSummary summary = simharness::run_simulation(options.config);

    const std::string stem = std::string("sim-") + simharness::sim_name(options.config.sim_id) +
                             "_filter-" + filter_tag(options.config.filtering);
    nlohmann::json outputs = nlohmann::json::array();
    for (const simharness::SimCell& cell : summary.cells) {
      std::string name = stem + "_" + metric_name(cell.metric);
      if (cell.window) name += "_w" + std::to_string(cell.window->length);
      name += ".csv";
      io::write_sim_cell_csv((fs::path(options.out_dir) / name).string(), cell,
                             options.config.tr_seconds);
      outputs.push_back(name);
    }

    const double wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    const simharness::SimConfig& c = options.config;
    nlohmann::json manifest = {
        {"command", "simulate"},
        {"sim", simharness::sim_name(c.sim_id)},
        {"filtering", c.filtering},
        {"seed", c.seed},
        {"n_realizations", c.n_realizations},
        {"n_samples", c.n_samples},
        {"tr_seconds", c.tr_seconds},
        {"f0_hz", c.f0_hz},
        {"t0_seconds", c.t0_seconds},
        {"sigmoid_a", c.sigmoid_a},
        {"sigmoid_b", c.sigmoid_b},
        {"amp_x", c.amp_x},
        {"amp_y", c.amp_y},
        {"noise_sd", c.noise_sd},
        {"band", band_json(c.band)},
        {"windows", c.windows},
        {"raw_ramp", c.raw_ramp},
        {"band_se_of_mean", c.band_se_of_mean},
        {"shift_unit", "radians"},
        {"surrogate_retries", summary.surrogate_retries},
        {"wall_seconds", wall_s},
        {"kernels", kernels::active_ops().name},
        {"outputs", outputs},
    };
    nlohmann::json metric_names = nlohmann::json::array();
    for (MetricId m : c.metrics) metric_names.push_back(metric_name(m));
    manifest["metrics"] = metric_names;
    io::write_file_atomic((fs::path(options.out_dir) / (stem + "_manifest.json")).string(),
                          manifest.dump(2) + "\n");
    return 0;
  });
}

int cmd_analyze(const AnalyzeOptions& options) {
  return guarded([&] {
    const io::SubjectManifest manifest = io::read_subject_manifest(options.manifest_path);
    options.band.validate(manifest.tr_seconds);
    if (options.window_length < 3)
      fail(ErrorCode::bad_config, "analyze: window must be at least 3 samples");
    ensure_out_dir(options.out_dir);

    const bool wants_signals =
        std::any_of(options.metrics.begin(), options.metrics.end(), [](MetricId m) {
          return m == MetricId::kCsw || m == MetricId::kPwCsw;
        });

    std::size_t n_regions = 0, n_samples = 0;
    nlohmann::json outputs = nlohmann::json::array();
    const signals::FilterCoeffs coeffs =
        signals::design_butterworth_bandpass(options.band, manifest.tr_seconds);

    for (const std::string& csv_path : manifest.csv_paths) {
      if (!fs::exists(csv_path))
        fail(ErrorCode::io_failure, "analyze: missing subject file " + csv_path);
      const RoiDataset data = io::read_roi_csv(csv_path, manifest.tr_seconds);
      if (n_regions == 0) {
        n_regions = data.n_regions();
        n_samples = data.n_samples();
        if (n_regions < 2) fail(ErrorCode::bad_config, "analyze: need at least 2 regions");
        if (options.window_length > n_samples)
          fail(ErrorCode::bad_config, "analyze: window longer than the series");
      } else if (data.n_regions() != n_regions || data.n_samples() != n_samples) {
        fail(ErrorCode::shape_mismatch,
             "analyze: " + csv_path + " has shape " + std::to_string(data.n_regions()) + "x" +
                 std::to_string(data.n_samples()) + ", expected " + std::to_string(n_regions) +
                 "x" + std::to_string(n_samples));
      }

      const PhaseMatrix phases = signals::extract_phases(data, options.band);
      Matrix filtered;
      if (wants_signals) {
        filtered = Matrix(data.n_regions(), data.n_samples());
        parallel_for(data.n_regions(), [&](std::size_t r) {
          const std::vector<double> f = signals::filtfilt(coeffs, data.values.row(r));
          std::copy(f.begin(), f.end(), filtered.row(r).begin());
        });
      }

      const std::string stem = fs::path(csv_path).stem().string();
      if (options.write_phases) {
        io::write_phase_csv((fs::path(options.out_dir) / (stem + "_phases.csv")).string(),
                            phases, data.region_labels);
        outputs.push_back(stem + "_phases.csv");
      }
      for (MetricId metric : options.metrics) {
        PsTensor tensor;
        const WindowSpec window{options.window_length};
        if (metric == MetricId::kCsw || metric == MetricId::kPwCsw)
          tensor = psmetrics::pairwise_tensor_from_signals(filtered, metric, window);
        else if (metric_is_windowed(metric))
          tensor = psmetrics::pairwise_tensor(phases, metric, window);
        else
          tensor = psmetrics::pairwise_tensor(phases, metric, std::nullopt);

        const std::string base = stem + "_" + metric_name(metric);
        if (options.write_binary) {
          io::write_tensor_binary((fs::path(options.out_dir) / (base + ".pst")).string(), tensor);
          outputs.push_back(base + ".pst");
        }
        if (options.write_csv) {
          io::write_tensor_csv((fs::path(options.out_dir) / (base + ".csv")).string(), tensor);
          outputs.push_back(base + ".csv");
        }
      }
    }

    nlohmann::json metric_names = nlohmann::json::array();
    for (MetricId m : options.metrics) metric_names.push_back(metric_name(m));
    const nlohmann::json run_manifest = {
        {"command", "analyze"},
        {"input_manifest", options.manifest_path},
        {"tr_seconds", manifest.tr_seconds},
        {"n_subjects", manifest.csv_paths.size()},
        {"n_regions", n_regions},
        {"n_samples", n_samples},
        {"window", options.window_length},
        {"band", band_json(options.band)},
        {"metrics", metric_names},
        {"kernels", kernels::active_ops().name},
        {"outputs", outputs},
    };
    io::write_file_atomic((fs::path(options.out_dir) / "analyze_manifest.json").string(),
                          run_manifest.dump(2) + "\n");
    return 0;
  });
}

int cmd_states(const StatesOptions& options) {
  return guarded([&] {
    std::vector<std::string> files = options.tensor_files;
    if (files.empty()) {
      if (options.input_dir.empty())
        fail(ErrorCode::bad_config, "states: no tensor files and no input directory");
      if (!fs::is_directory(options.input_dir))
        fail(ErrorCode::bad_config, "states: not a directory: " + options.input_dir);
      for (const auto& entry : fs::directory_iterator(options.input_dir))
        if (entry.path().extension() == ".pst") files.push_back(entry.path().string());
      std::sort(files.begin(), files.end());
    }
    if (files.empty()) fail(ErrorCode::bad_config, "states: no tensor inputs found");

    std::vector<PsTensor> tensors;
    std::vector<std::string> stems;
    for (const std::string& file : files) {
      PsTensor t = io::read_tensor_binary(file);
      if (options.metric_filter && t.metric != *options.metric_filter) continue;
      tensors.push_back(std::move(t));
      stems.push_back(fs::path(file).stem().string());
    }
    if (tensors.empty())
      fail(ErrorCode::bad_config, "states: no tensors match the requested metric");
    ensure_out_dir(options.out_dir);

    Rng rng = make_rng(options.seed, 0);
    const states::StatePipelineResult result =
        states::run_state_pipeline(tensors, options.k_range, options.restarts, rng,
                                   options.forced_k, options.kmeans_plus_plus);

    for (std::size_t s = 0; s < result.state.state_matrices.size(); ++s) {
      const Matrix& m = result.state.state_matrices[s];
      std::string out = "region";
      for (std::size_t r = 0; r < m.rows(); ++r) out += ",region_" + std::to_string(r);
      out += '\n';
      for (std::size_t r = 0; r < m.rows(); ++r) {
        out += "region_" + std::to_string(r);
        for (std::size_t c = 0; c < m.cols(); ++c) out += "," + io::format_double(m.at(r, c));
        out += '\n';
      }
      io::write_file_atomic(
          (fs::path(options.out_dir) / ("state_" + std::to_string(s + 1) + "_centroid.csv"))
              .string(),
          out);
    }

    {
      std::string out = "subject,time_index,state\n";
      for (std::size_t c = 0; c < result.state.labels.size(); ++c) {
        const std::uint32_t subject = result.group.col_subject[c];
        out += stems[subject] + "," + std::to_string(result.group.col_time[c]) + "," +
               std::to_string(result.state.labels[c]) + "\n";
      }
      io::write_file_atomic((fs::path(options.out_dir) / "state_labels.csv").string(), out);
    }

    nlohmann::json dbi = nlohmann::json::object();
    for (const auto& [k, v] : result.state.dbi_by_k) dbi[std::to_string(k)] = v;
    nlohmann::json dropped = nlohmann::json::array();
    for (std::size_t d : result.group.dropped_per_subject) dropped.push_back(d);
    const nlohmann::json report = {
        {"command", "states"},
        {"metric", metric_name(result.group.metric)},
        {"n_subjects", tensors.size()},
        {"n_regions", result.group.n_regions},
        {"columns", result.state.labels.size()},
        {"dropped_columns_per_subject", dropped},
        {"k", result.state.k},
        {"k_range", {options.k_range.first, options.k_range.second}},
        {"forced_k", options.forced_k.has_value()},
        {"dbi_by_k", dbi},
        {"inertia", result.state.inertia},
        {"restarts", options.restarts},
        {"init", options.kmeans_plus_plus ? "kmeans++" : "uniform"},
        {"seed", options.seed},
        {"kernels", kernels::active_ops().name},
    };
    io::write_file_atomic((fs::path(options.out_dir) / "states_report.json").string(),
                          report.dump(2) + "\n");
    return 0;
  });
}

int cmd_oracle_check(const OracleOptions& options, std::ostream& out) {
  return guarded([&] {
    const oracle::OracleReport report =
        oracle::run_oracle_suite(options.seed, options.n_cases, options.perturb_toroidal);
    for (const oracle::OracleEntry& e : report.entries)
      out << (e.pass ? "[PASS] " : "[FAIL] ") << e.name << " — " << e.detail << "\n";
    out << (report.all_pass ? "all oracles passed\n" : "oracle failures detected\n");
    return report.all_pass ? 0 : 1;
  });
}

namespace {

// Flags override config-file values; the config file supplies the rest.
struct SimulateFlags {
  std::string config_path, out_dir, sim = "null", filter = "on", metrics, windows, band;
  std::uint64_t seed = 0;
  std::int64_t reps = -1, n_samples = -1;
  double tr = -1.0;
  bool raw_ramp = false, se_band = false;
};

SimulateOptions build_simulate_options(const SimulateFlags& flags, const CLI::App& cmd) {
  SimulateOptions opt;
  if (!flags.config_path.empty()) {
    const ConfigMap config = ConfigMap::from_file(flags.config_path);
    const auto sim = simharness::sim_from_name(config.get_string("sim", "null"));
    if (!sim) fail(ErrorCode::bad_config, "config: unknown sim");
    opt.config.sim_id = *sim;
    opt.config.filtering = config.get_bool("filter", true);
    opt.config.seed = static_cast<std::uint64_t>(config.get_int("seed", 0));
    opt.config.n_realizations = static_cast<std::size_t>(config.get_int("reps", 1000));
    opt.config.n_samples = static_cast<std::size_t>(config.get_int("n_samples", 210));
    opt.config.tr_seconds = config.get_double("tr_seconds", 2.0);
    opt.config.f0_hz = config.get_double("f0_hz", 0.05);
    opt.config.t0_seconds = config.get_double("t0_seconds", 170.0);
    opt.config.noise_sd = config.get_double("noise_sd", 1.0);
    opt.config.amp_x = config.get_double("amp_x", 1.0);
    opt.config.amp_y = config.get_double("amp_y", 1.0);
    opt.config.band.low_hz = config.get_double("band.low", opt.config.band.low_hz);
    opt.config.band.high_hz = config.get_double("band.high", opt.config.band.high_hz);
    opt.config.band.order = static_cast<int>(config.get_int("band.order", 5));
    opt.config.raw_ramp = config.get_bool("raw_ramp", false);
    opt.config.band_se_of_mean = config.get_bool("band_se_of_mean", false);
    if (config.has("windows")) {
      opt.config.windows.clear();
      for (double w : config.get_number_list("windows"))
        opt.config.windows.push_back(static_cast<std::size_t>(w));
    }
    if (config.has("metrics"))
      opt.config.metrics = parse_metric_list(config.get_string_list("metrics"));
    opt.out_dir = config.get_string("out", ".");
  }

  if (cmd.count("--sim")) {
    const auto sim = simharness::sim_from_name(flags.sim);
    if (!sim) fail(ErrorCode::bad_config, "unknown sim: " + flags.sim);
    opt.config.sim_id = *sim;
  }
  if (cmd.count("--filter")) opt.config.filtering = flags.filter == "on";
  if (cmd.count("--seed")) opt.config.seed = flags.seed;
  if (cmd.count("--reps")) opt.config.n_realizations = static_cast<std::size_t>(flags.reps);
  if (cmd.count("--samples")) opt.config.n_samples = static_cast<std::size_t>(flags.n_samples);
  if (cmd.count("--tr")) opt.config.tr_seconds = flags.tr;
  if (cmd.count("--metrics")) opt.config.metrics = parse_metric_list(split_list(flags.metrics));
  if (cmd.count("--windows")) {
    opt.config.windows.clear();
    for (const std::string& w : split_list(flags.windows))
      opt.config.windows.push_back(static_cast<std::size_t>(parse_number(w, "--windows")));
  }
  if (cmd.count("--band")) {
    const auto parts = split_list(flags.band);
    if (parts.size() != 2) fail(ErrorCode::bad_config, "--band expects low,high");
    opt.config.band.low_hz = parse_number(parts[0], "--band");
    opt.config.band.high_hz = parse_number(parts[1], "--band");
  }
  if (cmd.count("--raw-ramp")) opt.config.raw_ramp = flags.raw_ramp;
  if (cmd.count("--se-band")) opt.config.band_se_of_mean = flags.se_band;
  if (cmd.count("--out")) opt.out_dir = flags.out_dir;
  return opt;
}

}  // namespace

int run_main(int argc, const char* const* argv) {
  CLI::App app{"windowed and instantaneous phase synchronization toolkit"};
  app.require_subcommand(1);

  // simulate
  SimulateFlags sim_flags;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "run a simulation study");
  sim_cmd->add_option("--config", sim_flags.config_path, "TOML or JSON config");
  sim_cmd->add_option("--out", sim_flags.out_dir, "output directory");
  sim_cmd->add_option("--sim", sim_flags.sim, "null | ramp | sigmoid");
  sim_cmd->add_option("--filter", sim_flags.filter, "on | off")
      ->check(CLI::IsMember({"on", "off"}));
  sim_cmd->add_option("--seed", sim_flags.seed, "RNG seed");
  sim_cmd->add_option("--reps", sim_flags.reps, "number of realizations");
  sim_cmd->add_option("--samples", sim_flags.n_samples, "samples per series");
  sim_cmd->add_option("--tr", sim_flags.tr, "sampling interval in seconds");
  sim_cmd->add_option("--metrics", sim_flags.metrics, "comma list of metrics");
  sim_cmd->add_option("--windows", sim_flags.windows, "comma list of window lengths");
  sim_cmd->add_option("--band", sim_flags.band, "low,high in Hz");
  sim_cmd->add_flag("--raw-ramp", sim_flags.raw_ramp, "use the unnormalized ramp shift");
  sim_cmd->add_flag("--se-band", sim_flags.se_band, "band = 1.96*SD/sqrt(n)");

  // analyze
  AnalyzeOptions analyze_opt;
  std::string analyze_metrics, analyze_band, analyze_format = "both";
  std::int64_t analyze_window = -1;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "pairwise tensors from ROI datasets");
  analyze_cmd->add_option("--manifest", analyze_opt.manifest_path,
                          "JSON manifest: tr_seconds + subject CSV paths")
      ->required();
  analyze_cmd->add_option("--out", analyze_opt.out_dir, "output directory");
  analyze_cmd->add_option("--metrics", analyze_metrics, "comma list of metrics");
  analyze_cmd->add_option("--window", analyze_window, "window length in samples");
  analyze_cmd->add_option("--band", analyze_band, "low,high in Hz");
  analyze_cmd->add_option("--format", analyze_format, "csv | bin | both")
      ->check(CLI::IsMember({"csv", "bin", "both"}));
  analyze_cmd->add_flag("--write-phases", analyze_opt.write_phases,
                        "also emit per-subject phase matrices as CSV");

  // states
  StatesOptions states_opt;
  std::string states_metric, states_k_range;
  std::int64_t states_k = -1;
  bool states_sweep_only = false;
  CLI::App* states_cmd = app.add_subcommand("states", "cluster tensors into recurring states");
  states_cmd->add_option("--input", states_opt.input_dir, "directory of .pst tensors");
  states_cmd->add_option("--tensors", states_opt.tensor_files, "explicit tensor files");
  states_cmd->add_option("--metric", states_metric, "only use tensors of this metric");
  states_cmd->add_option("--k", states_k, "forced number of states");
  states_cmd->add_option("--k-range", states_k_range, "DBI sweep range, e.g. 2..6");
  states_cmd->add_option("--restarts", states_opt.restarts, "k-means restarts");
  states_cmd->add_option("--seed", states_opt.seed, "RNG seed");
  states_cmd->add_option("--out", states_opt.out_dir, "output directory");
  states_cmd->add_flag("--select-by-dbi", states_sweep_only,
                       "pick k by minimum DBI instead of forcing it");
  states_cmd->add_flag("--kmeans-plus-plus", states_opt.kmeans_plus_plus,
                       "D^2-weighted centroid seeding");

  // oracle-check
  OracleOptions oracle_opt;
  CLI::App* oracle_cmd = app.add_subcommand("oracle-check", "run the estimator oracle suite");
  oracle_cmd->add_option("--seed", oracle_opt.seed, "RNG seed");
  oracle_cmd->add_option("--cases", oracle_opt.n_cases, "random windows per estimator");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  return guarded([&]() -> int {
    if (sim_cmd->parsed()) return cmd_simulate(build_simulate_options(sim_flags, *sim_cmd));
    if (analyze_cmd->parsed()) {
      if (analyze_cmd->count("--metrics"))
        analyze_opt.metrics = parse_metric_list(split_list(analyze_metrics));
      if (analyze_cmd->count("--window"))
        analyze_opt.window_length = static_cast<std::size_t>(analyze_window);
      if (analyze_cmd->count("--band")) {
        const auto parts = split_list(analyze_band);
        if (parts.size() != 2) fail(ErrorCode::bad_config, "--band expects low,high");
        analyze_opt.band.low_hz = parse_number(parts[0], "--band");
        analyze_opt.band.high_hz = parse_number(parts[1], "--band");
      }
      analyze_opt.write_csv = analyze_format != "bin";
      analyze_opt.write_binary = analyze_format != "csv";
      return cmd_analyze(analyze_opt);
    }
    if (states_cmd->parsed()) {
      if (states_cmd->count("--metric")) {
        const auto id = metric_from_name(states_metric);
        if (!id) fail(ErrorCode::bad_config, "unknown metric: " + states_metric);
        states_opt.metric_filter = id;
      }
      if (states_cmd->count("--k-range")) {
        const std::size_t sep = states_k_range.find("..");
        if (sep == std::string::npos)
          fail(ErrorCode::bad_config, "--k-range expects the form a..b");
        states_opt.k_range.first =
            static_cast<std::size_t>(parse_number(states_k_range.substr(0, sep), "--k-range"));
        states_opt.k_range.second = static_cast<std::size_t>(
            parse_number(states_k_range.substr(sep + 2), "--k-range"));
      }
      if (states_cmd->count("--k")) states_opt.forced_k = static_cast<std::size_t>(states_k);
      if (states_sweep_only) states_opt.forced_k.reset();
      if (states_opt.forced_k) {
        states_opt.k_range.first = std::min(states_opt.k_range.first, *states_opt.forced_k);
        states_opt.k_range.second = std::max(states_opt.k_range.second, *states_opt.forced_k);
      }
      return cmd_states(states_opt);
    }
    if (oracle_cmd->parsed()) return cmd_oracle_check(oracle_opt, std::cout);
    fail(ErrorCode::bad_config, "no subcommand given");
  });
}

}  // namespace phasesync::cli
